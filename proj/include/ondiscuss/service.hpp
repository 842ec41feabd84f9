#pragma once

#include <cstdint>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "ondiscuss/canvas.hpp"
#include "ondiscuss/codebook.hpp"
#include "ondiscuss/ena.hpp"
#include "ondiscuss/lda.hpp"
#include "ondiscuss/store.hpp"

namespace httplib {
class Server;
}

namespace ondiscuss {

struct ServiceConfig {
  std::filesystem::path data_dir = "data";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string canvas_base_url;  // empty: Canvas disabled
  std::string canvas_token;
  std::string pseudonym_salt;
  std::string instructor_token;  // empty: no authentication
  std::size_t recompute_limit = 5000;  // posts; larger corpora compute in the background
  std::string codebook_corpus = "discussion";  // or a CSV path of prior-semester posts
  std::uint64_t lda_seed = 7;
  std::filesystem::path webui_dir;  // static bundle mounted at /ui
  std::filesystem::path stopwords_path;  // empty: bundled list

  /// ONDISCUSS_DATA_DIR, ONDISCUSS_HOST, ONDISCUSS_PORT, CANVAS_BASE_URL,
  /// CANVAS_TOKEN, ONDISCUSS_PSEUDONYM_SALT, ONDISCUSS_INSTRUCTOR_TOKEN,
  /// ONDISCUSS_RECOMPUTE_LIMIT, ONDISCUSS_CODEBOOK_CORPUS, ONDISCUSS_LDA_SEED,
  /// ONDISCUSS_WEBUI_DIR, ONDISCUSS_STOPWORDS.
  static ServiceConfig from_env();
};

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lowercase names
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

/// A computed model for one (discussion, codebook version, scope) key.
struct ModelEntry {
  EnaModel model;
  Codebook codebook;
  std::string payload;  // serialized once, served verbatim
};

/// Transport-independent request handling. All public members are safe to call
/// from concurrent request threads.
class Service {
 public:
  explicit Service(ServiceConfig config, std::shared_ptr<HttpTransport> canvas_transport = nullptr);
  ~Service();

  Response handle(const Request& request);

  const ServiceConfig& config() const { return config_; }
  DataStore& store() { return store_; }

  /// Latest codebook, generating version 1 with the topic model when none
  /// exists. Throws kNotFound for discussions that were never ingested.
  CodebookRecord latest_codebook(const std::string& discussion_id);

  /// Applies the batch on top of base_version. Throws kVersionConflict when
  /// base_version is not the latest, and ValidationError listing every failing
  /// edit otherwise; nothing is stored on failure.
  CodebookRecord edit_codebook(const std::string& discussion_id, std::int64_t base_version,
                               std::span<const CodebookEdit> edits, const std::string& author);

  /// Cached or freshly computed; concurrent callers for one key share a single
  /// computation. nullptr means the computation is still running in the
  /// background (only when wait is false and the corpus exceeds the limit).
  std::shared_ptr<const ModelEntry> model(const std::string& discussion_id,
                                          std::optional<std::int64_t> version, Scope scope,
                                          bool wait = true, bool* cache_hit = nullptr);

  /// Drops the cached corpus and models of a re-ingested discussion.
  void invalidate(const std::string& discussion_id);

 private:
  using ModelKey = std::tuple<std::string, std::int64_t, Scope>;

  struct Loaded {
    DiscussionSummary summary;
    std::map<std::string, std::string> identities;
    Corpus corpus;
  };

  std::shared_ptr<const Loaded> loaded(const std::string& discussion_id);
  std::shared_ptr<const ModelEntry> compute_model(const std::string& discussion_id,
                                                  const Codebook& codebook, Scope scope);
  std::optional<std::string> discussion_link(const DiscussionSummary& summary) const;
  std::mutex& discussion_mutex(const std::string& discussion_id);
  std::vector<Post> codebook_corpus(const DiscussionRecord& record) const;

  Response route(const Request& request);
  Response list_course(const std::string& course_id);
  Response get_codebook(const std::string& discussion_id);
  Response put_codebook(const std::string& discussion_id, const Request& request);
  Response get_model(const std::string& discussion_id, const Request& request);
  Response get_student(const std::string& discussion_id, const std::string& student_id,
                       const Request& request);
  Response get_export(const std::string& discussion_id, const Request& request);
  Response ingest(const std::string& course_id, const std::string& discussion_id);

  ServiceConfig config_;
  DataStore store_;
  StopwordList stopwords_;
  std::shared_ptr<HttpTransport> canvas_transport_;

  std::mutex mutex_;  // guards the maps below
  std::map<std::string, std::unique_ptr<std::mutex>> discussion_mutexes_;
  std::map<std::string, std::shared_future<std::shared_ptr<const Loaded>>> loaded_;
  std::map<ModelKey, std::shared_future<std::shared_ptr<const ModelEntry>>> models_;
  std::vector<std::thread> workers_;
};

/// Binds a Service to cpp-httplib. The /ui mount serves config.webui_dir.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  /// Binds to config host/port (port 0 picks a free port) and returns the port.
  int bind();
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  Service& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace ondiscuss
