#include "ondiscuss/store.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ondiscuss/error.hpp"
#include "ondiscuss/json_io.hpp"

namespace ondiscuss {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kIo, path.string() + ": " + e.what());
  }
}

json record_json(const CodebookRecord& r) {
  return json{{"version", r.codebook.version},
              {"author", r.author},
              {"created_at", format_timestamp(r.created_at)},
              {"codebook", r.codebook}};
}

CodebookRecord record_from_json(const json& j) {
  CodebookRecord r;
  r.codebook = j.at("codebook").get<Codebook>();
  r.author = j.value("author", std::string{});
  r.created_at = parse_timestamp(j.value("created_at", std::string{})).value_or(Timestamp{});
  return r;
}

}  // namespace

void check_identifier(const std::string& id) {
  const bool ok = !id.empty() && id.size() <= 128 && id.front() != '.' && id.front() != '_' &&
                  std::all_of(id.begin(), id.end(), [](char c) {
                    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
                  });
  if (!ok) throw Error(ErrorKind::kMalformedPayload, "bad identifier \"" + id + "\"");
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw Error(ErrorKind::kIo, "short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::kIo, "rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

DataStore::DataStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + root_.string() + ": " + ec.message());
}

fs::path DataStore::discussion_dir(const std::string& discussion_id) const {
  check_identifier(discussion_id);
  return root_ / discussion_id;
}

void DataStore::save_discussion(const DiscussionRecord& record) {
  const fs::path dir = discussion_dir(record.summary.discussion_id);
  json j{{"summary", record.summary}, {"posts", record.posts}, {"identities", record.identities}};
  std::lock_guard lock(mutex_);
  write_file_atomic(dir / "discussion.json", j.dump(1));
}

std::optional<DiscussionRecord> DataStore::load_discussion(const std::string& discussion_id) const {
  const fs::path path = discussion_dir(discussion_id) / "discussion.json";
  std::lock_guard lock(mutex_);
  if (!fs::exists(path)) return std::nullopt;
  const json j = load_json(path);
  DiscussionRecord r;
  try {
    r.summary = j.at("summary").get<DiscussionSummary>();
    r.posts = j.at("posts").get<std::vector<Post>>();
    r.identities = j.value("identities", std::map<std::string, std::string>{});
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kIo, path.string() + ": " + e.what());
  }
  return r;
}

std::vector<DiscussionSummary> DataStore::ingested_discussions(const std::string& course_id) const {
  std::vector<DiscussionSummary> out;
  std::vector<std::string> ids;
  {
    std::lock_guard lock(mutex_);
    for (const auto& entry : fs::directory_iterator(root_)) {
      if (entry.is_directory() && fs::exists(entry.path() / "discussion.json")) {
        ids.push_back(entry.path().filename().string());
      }
    }
  }
  std::sort(ids.begin(), ids.end());
  for (const std::string& id : ids) {
    auto rec = load_discussion(id);
    if (rec && rec->summary.course_id == course_id) out.push_back(rec->summary);
  }
  return out;
}

void DataStore::save_course_listing(const std::string& course_id, const CourseListing& listing) {
  check_identifier(course_id);
  json j{{"fetched_at", format_timestamp(listing.fetched_at)}, {"discussions", listing.discussions}};
  std::lock_guard lock(mutex_);
  write_file_atomic(root_ / "_courses" / (course_id + ".json"), j.dump(1));
}

std::optional<CourseListing> DataStore::load_course_listing(const std::string& course_id) const {
  check_identifier(course_id);
  const fs::path path = root_ / "_courses" / (course_id + ".json");
  std::lock_guard lock(mutex_);
  if (!fs::exists(path)) return std::nullopt;
  const json j = load_json(path);
  CourseListing l;
  l.discussions = j.at("discussions").get<std::vector<DiscussionSummary>>();
  l.fetched_at = parse_timestamp(j.value("fetched_at", std::string{})).value_or(Timestamp{});
  return l;
}

std::vector<CodebookRecord> DataStore::codebook_history(const std::string& discussion_id) const {
  const fs::path path = discussion_dir(discussion_id) / "codebooks.json";
  std::lock_guard lock(mutex_);
  std::vector<CodebookRecord> out;
  if (!fs::exists(path)) return out;
  for (const json& j : load_json(path)) out.push_back(record_from_json(j));
  return out;
}

std::optional<CodebookRecord> DataStore::latest_codebook(const std::string& discussion_id) const {
  auto history = codebook_history(discussion_id);
  if (history.empty()) return std::nullopt;
  return std::move(history.back());
}

std::optional<Codebook> DataStore::codebook_at(const std::string& discussion_id,
                                               std::int64_t version) const {
  auto history = codebook_history(discussion_id);
  if (version < 1 || version > static_cast<std::int64_t>(history.size())) return std::nullopt;
  return history[static_cast<std::size_t>(version - 1)].codebook;
}

void DataStore::append_codebook(const std::string& discussion_id, const CodebookRecord& record) {
  const fs::path path = discussion_dir(discussion_id) / "codebooks.json";
  std::lock_guard lock(mutex_);
  json history = fs::exists(path) ? load_json(path) : json::array();
  const auto expected = static_cast<std::int64_t>(history.size()) + 1;
  if (record.codebook.version != expected) {
    throw Error(ErrorKind::kVersionConflict, "expected version " + std::to_string(expected) +
                                                 ", got " + std::to_string(record.codebook.version));
  }
  history.push_back(record_json(record));
  write_file_atomic(path, history.dump(1));
}

fs::path DataStore::model_path(const std::string& discussion_id, std::int64_t version,
                               Scope scope) const {
  return discussion_dir(discussion_id) / std::to_string(version) /
         ("model-" + std::string(to_string(scope)) + ".json");
}

void DataStore::save_model(const std::string& discussion_id, std::int64_t version, Scope scope,
                           const std::string& payload) {
  const fs::path path = model_path(discussion_id, version, scope);
  std::lock_guard lock(mutex_);
  write_file_atomic(path, payload);
}

}  // namespace ondiscuss
