#include "ondiscuss/service.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>

#include "httplib.h"

#include "json.hpp"
#include "ondiscuss/assets.hpp"
#include "ondiscuss/csv.hpp"
#include "ondiscuss/error.hpp"
#include "ondiscuss/json_io.hpp"
#include "ondiscuss/pipeline.hpp"

namespace ondiscuss {

using nlohmann::json;

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

Response json_response(int status, const json& body) {
  Response r;
  r.status = status;
  r.body = body.dump();
  return r;
}

Response error_response(int status, std::string_view kind, const std::string& message) {
  return json_response(status, json{{"error", kind}, {"message", message}});
}

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound:
    case ErrorKind::kUnknownStudent:
    case ErrorKind::kCourseNotFound:
      return 404;
    case ErrorKind::kVersionConflict:
      return 409;
    case ErrorKind::kAuthFailed:
    case ErrorKind::kRateLimited:
    case ErrorKind::kUpstream:
      return 502;
    case ErrorKind::kIo:
    case ErrorKind::kNoNonzeroUnits:
    case ErrorKind::kPipelineMismatch:
    case ErrorKind::kMixedCodebookVersions:
      return 500;
    default:
      return 422;
  }
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < path.size()) {
    std::size_t slash = path.find('/', pos);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > pos) out.emplace_back(path.substr(pos, slash - pos));
    pos = slash + 1;
  }
  return out;
}

Timestamp now_seconds() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

json codebook_json(const CodebookRecord& r) {
  return json{{"version", r.codebook.version},
              {"author", r.author},
              {"created_at", format_timestamp(r.created_at)},
              {"codebook", r.codebook},
              {"overlaps", matcher_overlaps(r.codebook)}};
}

std::optional<std::int64_t> parse_version(const std::map<std::string, std::string>& query) {
  auto it = query.find("version");
  if (it == query.end() || it->second.empty() || it->second == "latest") return std::nullopt;
  char* end = nullptr;
  const long long v = std::strtoll(it->second.c_str(), &end, 10);
  if (*end != '\0' || v < 1) throw Error(ErrorKind::kNotFound, "no codebook version " + it->second);
  return v;
}

Scope scope_param(const std::map<std::string, std::string>& query) {
  auto it = query.find("scope");
  if (it == query.end() || it->second.empty()) return Scope::kAll;
  const auto s = parse_scope(it->second);
  if (!s) throw Error(ErrorKind::kMalformedPayload, "scope must be \"all\" or \"initial_only\"");
  return *s;
}

CanvasConfig canvas_config(const ServiceConfig& c) {
  CanvasConfig out;
  out.base_url = c.canvas_base_url;
  out.token = c.canvas_token;
  out.pseudonym_salt = c.pseudonym_salt;
  return out;
}

}  // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  c.data_dir = env_or("ONDISCUSS_DATA_DIR", c.data_dir.string());
  c.host = env_or("ONDISCUSS_HOST", c.host);
  c.port = std::atoi(env_or("ONDISCUSS_PORT", std::to_string(c.port)).c_str());
  c.canvas_base_url = env_or("CANVAS_BASE_URL", "");
  c.canvas_token = env_or("CANVAS_TOKEN", "");
  c.pseudonym_salt = env_or("ONDISCUSS_PSEUDONYM_SALT", "");
  c.instructor_token = env_or("ONDISCUSS_INSTRUCTOR_TOKEN", "");
  c.recompute_limit = std::strtoull(
      env_or("ONDISCUSS_RECOMPUTE_LIMIT", std::to_string(c.recompute_limit)).c_str(), nullptr, 10);
  c.codebook_corpus = env_or("ONDISCUSS_CODEBOOK_CORPUS", c.codebook_corpus);
  c.lda_seed = std::strtoull(env_or("ONDISCUSS_LDA_SEED", std::to_string(c.lda_seed)).c_str(), nullptr, 10);
  c.webui_dir = env_or("ONDISCUSS_WEBUI_DIR", "");
  c.stopwords_path = env_or("ONDISCUSS_STOPWORDS", "");
  return c;
}

Service::Service(ServiceConfig config, std::shared_ptr<HttpTransport> canvas_transport)
    : config_(std::move(config)),
      store_(config_.data_dir),
      stopwords_(config_.stopwords_path.empty() ? StopwordList::bundled()
                                                : StopwordList::load(config_.stopwords_path)),
      canvas_transport_(std::move(canvas_transport)) {
  if (!canvas_transport_ && !config_.canvas_base_url.empty()) canvas_transport_ = make_http_transport();
}

Service::~Service() {
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mutex_);
    workers.swap(workers_);
  }
  for (std::thread& t : workers) t.join();
}

std::mutex& Service::discussion_mutex(const std::string& discussion_id) {
  std::lock_guard lock(mutex_);
  auto& m = discussion_mutexes_[discussion_id];
  if (!m) m = std::make_unique<std::mutex>();
  return *m;
}

std::shared_ptr<const Service::Loaded> Service::loaded(const std::string& discussion_id) {
  std::promise<std::shared_ptr<const Loaded>> promise;
  std::shared_future<std::shared_ptr<const Loaded>> fut;
  bool owner = false;
  {
    std::lock_guard lock(mutex_);
    auto it = loaded_.find(discussion_id);
    if (it != loaded_.end()) {
      fut = it->second;
    } else {
      fut = promise.get_future().share();
      loaded_.emplace(discussion_id, fut);
      owner = true;
    }
  }
  if (owner) {
    try {
      std::optional<DiscussionRecord> record = store_.load_discussion(discussion_id);
      if (!record) throw Error(ErrorKind::kNotFound, "discussion " + discussion_id + " was not ingested");
      PipelineOptions options;
      options.stopwords = &stopwords_;
      auto l = std::make_shared<Loaded>();
      l->summary = std::move(record->summary);
      l->identities = std::move(record->identities);
      l->corpus = Corpus::prepare(discussion_id, std::move(record->posts), options);
      promise.set_value(std::move(l));
    } catch (...) {
      promise.set_exception(std::current_exception());
      std::lock_guard lock(mutex_);
      loaded_.erase(discussion_id);
    }
  }
  return fut.get();
}

std::vector<Post> Service::codebook_corpus(const DiscussionRecord& record) const {
  if (config_.codebook_corpus.empty() || config_.codebook_corpus == "discussion") return record.posts;
  return import_csv(read_file(config_.codebook_corpus)).posts;
}

std::optional<std::string> Service::discussion_link(const DiscussionSummary& summary) const {
  if (config_.canvas_base_url.empty() || summary.course_id.empty()) return std::nullopt;
  return discussion_url(config_.canvas_base_url, summary.course_id, summary.discussion_id);
}

CodebookRecord Service::latest_codebook(const std::string& discussion_id) {
  check_identifier(discussion_id);
  std::lock_guard lock(discussion_mutex(discussion_id));
  if (auto latest = store_.latest_codebook(discussion_id)) return *latest;
  std::optional<DiscussionRecord> record = store_.load_discussion(discussion_id);
  if (!record) throw Error(ErrorKind::kNotFound, "discussion " + discussion_id + " was not ingested");
  PipelineOptions options;
  options.stopwords = &stopwords_;
  const std::vector<Post> corpus = codebook_corpus(*record);
  CodebookRecord generated{generate_codebook(corpus, discussion_id, config_.lda_seed, {}, options),
                           "topic-model", now_seconds()};
  store_.append_codebook(discussion_id, generated);
  return generated;
}

CodebookRecord Service::edit_codebook(const std::string& discussion_id, std::int64_t base_version,
                                      std::span<const CodebookEdit> edits,
                                      const std::string& author) {
  latest_codebook(discussion_id);
  std::lock_guard lock(discussion_mutex(discussion_id));
  const CodebookRecord latest = *store_.latest_codebook(discussion_id);
  if (base_version != latest.codebook.version) {
    throw Error(ErrorKind::kVersionConflict,
                "base version " + std::to_string(base_version) + " is not the latest (" +
                    std::to_string(latest.codebook.version) + ")");
  }
  // Each edit is checked against the state left by the edits before it, so
  // one bad edit does not hide problems in the rest of the batch.
  Codebook next = latest.codebook;
  std::vector<std::string> violations;
  for (std::size_t i = 0; i < edits.size(); ++i) {
    try {
      next = apply_edit(next, edits[i], stopwords_);
    } catch (const Error& e) {
      violations.push_back("edit " + std::to_string(i) + ": " + e.what());
    }
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  next.version = latest.codebook.version + 1;
  if (auto v = validate(next); !v.empty()) throw ValidationError(std::move(v));
  CodebookRecord record{std::move(next), author.empty() ? "instructor" : author, now_seconds()};
  store_.append_codebook(discussion_id, record);
  return record;
}

std::shared_ptr<const ModelEntry> Service::compute_model(const std::string& discussion_id,
                                                         const Codebook& codebook, Scope scope) {
  const auto l = loaded(discussion_id);
  auto entry = std::make_shared<ModelEntry>();
  entry->model = build_model(l->corpus, codebook, scope);
  entry->codebook = codebook;
  entry->payload = model_payload(entry->model, codebook, discussion_link(l->summary)).dump();
  store_.save_model(discussion_id, codebook.version, scope, entry->payload);
  return entry;
}

std::shared_ptr<const ModelEntry> Service::model(const std::string& discussion_id,
                                                 std::optional<std::int64_t> version, Scope scope,
                                                 bool wait, bool* cache_hit) {
  Codebook codebook;
  if (version) {
    check_identifier(discussion_id);
    auto cb = store_.codebook_at(discussion_id, *version);
    if (!cb) {
      throw Error(ErrorKind::kNotFound, "discussion " + discussion_id + " has no codebook version " +
                                            std::to_string(*version));
    }
    codebook = std::move(*cb);
  } else {
    codebook = latest_codebook(discussion_id).codebook;
  }

  const ModelKey key{discussion_id, codebook.version, scope};
  auto promise = std::make_shared<std::promise<std::shared_ptr<const ModelEntry>>>();
  std::shared_future<std::shared_ptr<const ModelEntry>> fut;
  bool owner = false;
  {
    std::lock_guard lock(mutex_);
    auto it = models_.find(key);
    if (it != models_.end()) {
      fut = it->second;
    } else {
      fut = promise->get_future().share();
      models_.emplace(key, fut);
      owner = true;
    }
  }
  if (cache_hit) *cache_hit = !owner;

  if (owner) {
    auto run = [this, key, discussion_id, codebook, scope, promise] {
      try {
        promise->set_value(compute_model(discussion_id, codebook, scope));
      } catch (...) {
        promise->set_exception(std::current_exception());
        std::lock_guard lock(mutex_);
        models_.erase(key);
      }
    };
    bool background = false;
    if (!wait) {
      try {
        background = loaded(discussion_id)->corpus.posts.size() > config_.recompute_limit;
      } catch (...) {
        // Surfaces through run() below.
      }
    }
    if (background) {
      std::lock_guard lock(mutex_);
      workers_.emplace_back(run);
    } else {
      run();
    }
  }
  if (!wait && fut.wait_for(std::chrono::seconds(0)) != std::future_status::ready) return nullptr;
  return fut.get();
}

void Service::invalidate(const std::string& discussion_id) {
  std::lock_guard lock(mutex_);
  loaded_.erase(discussion_id);
  for (auto it = models_.begin(); it != models_.end();) {
    if (std::get<0>(it->first) == discussion_id) {
      it = models_.erase(it);
    } else {
      ++it;
    }
  }
}

Response Service::handle(const Request& request) {
  try {
    return route(request);
  } catch (const ValidationError& e) {
    return json_response(422, json{{"error", "Validation"},
                                   {"message", e.what()},
                                   {"violations", e.violations()}});
  } catch (const Error& e) {
    return error_response(status_for(e.kind()), to_string(e.kind()), e.what());
  } catch (const json::exception& e) {
    return error_response(400, "MalformedPayload", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

Response Service::route(const Request& request) {
  const std::vector<std::string> parts = split_path(request.path);
  const std::string& method = request.method;

  if (method == "GET" && parts.size() == 1 && parts[0] == "manual") {
    Response r;
    r.content_type = "text/html; charset=utf-8";
    r.body = std::string(assets::kManualHtml);
    return r;
  }

  if (!config_.instructor_token.empty()) {
    auto it = request.headers.find("authorization");
    if (it == request.headers.end() || it->second != "Bearer " + config_.instructor_token) {
      Response r = error_response(401, "Unauthorized", "missing or invalid bearer token");
      r.headers["WWW-Authenticate"] = "Bearer";
      return r;
    }
  }

  auto method_not_allowed = [] { return error_response(405, "MethodNotAllowed", "method not allowed"); };

  if (parts.size() >= 3 && parts[0] == "courses" && parts[2] == "discussions") {
    check_identifier(parts[1]);
    if (parts.size() == 3) return method == "GET" ? list_course(parts[1]) : method_not_allowed();
    if (parts.size() == 5 && parts[4] == "ingest") {
      check_identifier(parts[3]);
      return method == "POST" ? ingest(parts[1], parts[3]) : method_not_allowed();
    }
  }

  if (parts.size() >= 3 && parts[0] == "discussions") {
    const std::string& id = parts[1];
    check_identifier(id);
    if (parts.size() == 3 && parts[2] == "codebook") {
      if (method == "GET") return get_codebook(id);
      if (method == "PUT") return put_codebook(id, request);
      return method_not_allowed();
    }
    if (parts.size() == 3 && parts[2] == "codebooks") {
      if (method != "GET") return method_not_allowed();
      latest_codebook(id);
      json history = json::array();
      for (const CodebookRecord& r : store_.codebook_history(id)) history.push_back(codebook_json(r));
      return json_response(200, history);
    }
    if (parts.size() == 3 && parts[2] == "model") {
      return method == "GET" ? get_model(id, request) : method_not_allowed();
    }
    if (parts.size() == 4 && parts[2] == "students") {
      return method == "GET" ? get_student(id, parts[3], request) : method_not_allowed();
    }
    if (parts.size() == 3 && parts[2] == "export.csv") {
      return method == "GET" ? get_export(id, request) : method_not_allowed();
    }
  }

  return error_response(404, "NotFound", "no route for " + method + " " + request.path);
}

Response Service::list_course(const std::string& course_id) {
  auto with_ingested = [&](const std::vector<DiscussionSummary>& discussions) {
    std::map<std::string, DiscussionSummary> local;
    for (DiscussionSummary& s : store_.ingested_discussions(course_id)) local.emplace(s.discussion_id, s);
    json out = json::array();
    for (const DiscussionSummary& s : discussions) {
      json j = s;
      j["ingested"] = local.contains(s.discussion_id);
      out.push_back(std::move(j));
    }
    return out;
  };

  if (config_.canvas_base_url.empty() || !canvas_transport_) {
    const auto local = store_.ingested_discussions(course_id);
    return json_response(200, json{{"course_id", course_id},
                                   {"source", "local"},
                                   {"stale", false},
                                   {"discussions", with_ingested(local)}});
  }

  CanvasClient client(canvas_config(config_), canvas_transport_);
  try {
    CourseListing listing{client.fetch_discussions(course_id), now_seconds()};
    store_.save_course_listing(course_id, listing);
    return json_response(200, json{{"course_id", course_id},
                                   {"source", "canvas"},
                                   {"stale", false},
                                   {"fetched_at", format_timestamp(listing.fetched_at)},
                                   {"discussions", with_ingested(listing.discussions)}});
  } catch (const Error& e) {
    const bool transient = e.kind() == ErrorKind::kUpstream || e.kind() == ErrorKind::kRateLimited ||
                           e.kind() == ErrorKind::kAuthFailed;
    if (!transient) throw;
    auto cached = store_.load_course_listing(course_id);
    if (!cached) throw;
    Response r = json_response(200, json{{"course_id", course_id},
                                         {"source", "cache"},
                                         {"stale", true},
                                         {"warning", e.what()},
                                         {"fetched_at", format_timestamp(cached->fetched_at)},
                                         {"discussions", with_ingested(cached->discussions)}});
    r.headers["Warning"] = "110 - \"Response is stale\"";
    return r;
  }
}

Response Service::ingest(const std::string& course_id, const std::string& discussion_id) {
  if (config_.canvas_base_url.empty() || !canvas_transport_) {
    return error_response(503, "CanvasDisabled", "no Canvas base URL is configured");
  }
  CanvasClient client(canvas_config(config_), canvas_transport_);
  DiscussionRecord record = ingest_canvas(client, course_id, discussion_id);
  {
    std::lock_guard lock(discussion_mutex(discussion_id));
    store_.save_discussion(record);
  }
  invalidate(discussion_id);
  json out = record.summary;
  out["ingested"] = true;
  return json_response(200, out);
}

Response Service::get_codebook(const std::string& discussion_id) {
  return json_response(200, codebook_json(latest_codebook(discussion_id)));
}

Response Service::put_codebook(const std::string& discussion_id, const Request& request) {
  const json body = json::parse(request.body);
  if (!body.is_object() || !body.contains("base_version") || !body.contains("edits") ||
      !body["edits"].is_array()) {
    throw Error(ErrorKind::kMalformedPayload, "expected {\"base_version\", \"edits\": [...]}");
  }
  const auto base = body["base_version"].get<std::int64_t>();
  const auto edits = body["edits"].get<std::vector<CodebookEdit>>();
  const std::string author = body.value("author", std::string("instructor"));
  try {
    return json_response(200, codebook_json(edit_codebook(discussion_id, base, edits, author)));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kVersionConflict) throw;
    return json_response(409, json{{"error", "VersionConflict"},
                                   {"message", e.what()},
                                   {"latest", codebook_json(latest_codebook(discussion_id))}});
  }
}

Response Service::get_model(const std::string& discussion_id, const Request& request) {
  const Scope scope = scope_param(request.query);
  const auto version = parse_version(request.query);
  bool hit = false;
  const auto entry = model(discussion_id, version, scope, false, &hit);
  if (!entry) {
    Response r = json_response(202, json{{"status", "pending"}, {"discussion_id", discussion_id}});
    r.headers["Retry-After"] = "2";
    return r;
  }
  Response r;
  r.body = entry->payload;
  r.headers["X-Cache"] = hit ? "hit" : "miss";
  return r;
}

Response Service::get_student(const std::string& discussion_id, const std::string& student_id,
                              const Request& request) {
  const Scope scope = scope_param(request.query);
  const auto entry = model(discussion_id, parse_version(request.query), scope);
  const auto l = loaded(discussion_id);
  const IndividualNetwork network = individual_network(entry->model, l->corpus, student_id);
  std::optional<CanvasLinks> links;
  if (auto url = discussion_link(l->summary)) {
    auto it = l->identities.find(student_id);
    links = canvas_links(config_.canvas_base_url, l->summary.course_id, discussion_id,
                         it == l->identities.end() ? std::nullopt : l->summary.assignment_id,
                         it == l->identities.end() ? std::string_view{} : std::string_view(it->second));
  }
  return json_response(200, individual_payload(entry->model, network, entry->codebook, links));
}

Response Service::get_export(const std::string& discussion_id, const Request& request) {
  const auto entry = model(discussion_id, parse_version(request.query), Scope::kAll);
  const auto l = loaded(discussion_id);
  Response r;
  r.content_type = "text/csv; charset=utf-8";
  r.body = export_csv(l->corpus.posts, entry->model.coded, entry->codebook);
  r.headers["Content-Disposition"] = "attachment; filename=\"" + discussion_id + "-v" +
                                     std::to_string(entry->codebook.version) + ".csv\"";
  return r;
}

HttpServer::HttpServer(Service& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    for (const auto& [k, v] : req.headers) {
      std::string name = k;
      for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      r.headers.emplace(std::move(name), v);
    }
    r.body = req.body;
    Response out = service_.handle(r);
    res.status = out.status;
    for (const auto& [k, v] : out.headers) res.set_header(k, v);
    res.set_content(out.body, out.content_type);
  };
  const char* pattern = R"((/(manual|courses|discussions)(/.*)?))";
  server_->Get(pattern, forward);
  server_->Put(pattern, forward);
  server_->Post(pattern, forward);
  server_->Delete(pattern, forward);
  const auto& webui = service_.config().webui_dir;
  if (!webui.empty()) server_->set_mount_point("/ui", webui.string());
  server_->Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/ui/"); });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  const ServiceConfig& c = service_.config();
  if (c.port == 0) return server_->bind_to_any_port(c.host);
  if (!server_->bind_to_port(c.host, c.port)) {
    throw Error(ErrorKind::kIo, "cannot bind " + c.host + ":" + std::to_string(c.port));
  }
  return c.port;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

}  // namespace ondiscuss
