#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ondiscuss/codebook.hpp"
#include "ondiscuss/ena.hpp"
#include "ondiscuss/post.hpp"

namespace ondiscuss {

struct DiscussionRecord {
  DiscussionSummary summary;
  std::vector<Post> posts;
  std::map<std::string, std::string> identities;  // pseudonym -> LMS user id
};

struct CodebookRecord {
  Codebook codebook;
  std::string author;
  Timestamp created_at{};
};

struct CourseListing {
  std::vector<DiscussionSummary> discussions;
  Timestamp fetched_at{};
};

/// JSON documents under one data directory:
///
///   {root}/{discussion}/discussion.json            summary, posts, identities
///   {root}/{discussion}/codebooks.json             append-only version list
///   {root}/{discussion}/{version}/model-{scope}.json
///   {root}/_courses/{course}.json                  last Canvas listing
///
/// Files are replaced by rename, so readers never see partial writes.
/// Identifiers must match [A-Za-z0-9._-]+ and may not start with '.' or '_'.
class DataStore {
 public:
  explicit DataStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  void save_discussion(const DiscussionRecord& record);
  std::optional<DiscussionRecord> load_discussion(const std::string& discussion_id) const;
  /// Summaries of ingested discussions belonging to the course, by id.
  std::vector<DiscussionSummary> ingested_discussions(const std::string& course_id) const;

  void save_course_listing(const std::string& course_id, const CourseListing& listing);
  std::optional<CourseListing> load_course_listing(const std::string& course_id) const;

  std::vector<CodebookRecord> codebook_history(const std::string& discussion_id) const;
  std::optional<CodebookRecord> latest_codebook(const std::string& discussion_id) const;
  std::optional<Codebook> codebook_at(const std::string& discussion_id, std::int64_t version) const;
  /// The codebook's version must be exactly latest + 1 (1 for the first);
  /// anything else throws kVersionConflict.
  void append_codebook(const std::string& discussion_id, const CodebookRecord& record);

  std::filesystem::path model_path(const std::string& discussion_id, std::int64_t version,
                                   Scope scope) const;
  void save_model(const std::string& discussion_id, std::int64_t version, Scope scope,
                  const std::string& payload);

 private:
  std::filesystem::path discussion_dir(const std::string& discussion_id) const;

  std::filesystem::path root_;
  mutable std::mutex mutex_;
};

/// Throws kMalformedPayload unless `id` is a safe path component.
void check_identifier(const std::string& id);

void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace ondiscuss
