#include "ondiscuss/csv.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <unordered_map>

#include "ondiscuss/error.hpp"

namespace ondiscuss {
namespace {

std::optional<bool> parse_flag(std::string_view s) {
  if (s == "1" || s == "true" || s == "TRUE" || s == "True") return true;
  if (s == "0" || s == "false" || s == "FALSE" || s == "False") return false;
  return std::nullopt;
}

[[noreturn]] void bad_row(std::size_t line, const std::string& why) {
  throw Error(ErrorKind::kBadRow, "line " + std::to_string(line) + ": " + why);
}

}  // namespace

std::vector<CsvRecord> parse_csv(std::string_view s) {
  std::vector<CsvRecord> out;
  std::size_t i = 0;
  std::size_t line = 1;
  if (s.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  while (i < s.size()) {
    CsvRecord rec;
    rec.line = line;
    std::string field;
    bool record_done = false;
    while (!record_done) {
      field.clear();
      if (i < s.size() && s[i] == '"') {
        ++i;
        for (;;) {
          if (i >= s.size()) bad_row(rec.line, "unterminated quoted field");
          const char c = s[i++];
          if (c == '"') {
            if (i < s.size() && s[i] == '"') {
              field.push_back('"');
              ++i;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line;
            field.push_back(c);
          }
        }
        if (i < s.size() && s[i] != ',' && s[i] != '\r' && s[i] != '\n') {
          bad_row(rec.line, "text after closing quote");
        }
      } else {
        while (i < s.size() && s[i] != ',' && s[i] != '\r' && s[i] != '\n') {
          if (s[i] == '"') bad_row(rec.line, "quote inside unquoted field");
          field.push_back(s[i++]);
        }
      }
      rec.fields.push_back(field);
      if (i >= s.size()) {
        record_done = true;
      } else if (s[i] == ',') {
        ++i;
      } else {
        if (s[i] == '\r') ++i;
        if (i < s.size() && s[i] == '\n') ++i;
        ++line;
        record_done = true;
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string csv_field(std::string_view v) {
  if (v.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(v);
  std::string out;
  out.reserve(v.size() + 2);
  out.push_back('"');
  for (char c : v) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string export_csv(std::span<const Post> posts, std::span<const CodedUtterance> utterances,
                       const Codebook& codebook) {
  std::unordered_map<std::string_view, const Post*> by_id;
  for (const Post& p : posts) by_id.emplace(p.post_id, &p);

  std::vector<std::pair<const Post*, const CodedUtterance*>> rows;
  for (const CodedUtterance& u : utterances) {
    auto it = by_id.find(u.post_id);
    if (it != by_id.end()) rows.emplace_back(it->second, &u);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.first->author_id != b.first->author_id) return a.first->author_id < b.first->author_id;
    if (a.first->created_at != b.first->created_at) return a.first->created_at < b.first->created_at;
    return a.first->post_id < b.first->post_id;
  });

  std::string out;
  for (std::size_t c = 0; c < kCsvFixedColumns.size(); ++c) {
    if (c) out.push_back(',');
    out.append(kCsvFixedColumns[c]);
  }
  for (std::size_t t = 0; t < kNumTopics; ++t) {
    out.push_back(',');
    out.append(csv_field(t < codebook.topics.size() ? codebook.topics[t].name : std::to_string(t)));
  }
  out.append("\r\n");
  for (const auto& [post, coded] : rows) {
    out.append(csv_field(post->author_id)).push_back(',');
    out.append(csv_field(post->post_id)).push_back(',');
    out.append(post->is_initial() ? "1" : "0").push_back(',');
    out.append(format_timestamp(post->created_at)).push_back(',');
    out.append(csv_field(post->raw_text));
    for (bool code : coded->codes) out.append(code ? ",1" : ",0");
    out.append("\r\n");
  }
  return out;
}

ImportedCsv import_csv(std::string_view bytes, const std::string& discussion_id,
                       const std::string& course_id) {
  const std::vector<CsvRecord> records = parse_csv(bytes);
  if (records.empty()) throw Error(ErrorKind::kBadHeader, "empty file");
  const std::vector<std::string>& header = records.front().fields;

  std::array<std::size_t, kCsvFixedColumns.size()> fixed{};
  for (std::size_t c = 0; c < kCsvFixedColumns.size(); ++c) {
    auto it = std::find(header.begin(), header.end(), kCsvFixedColumns[c]);
    if (it == header.end()) {
      throw Error(ErrorKind::kBadHeader, "missing column " + std::string(kCsvFixedColumns[c]));
    }
    fixed[c] = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<std::size_t> extra;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (std::find(fixed.begin(), fixed.end(), c) == fixed.end()) extra.push_back(c);
  }

  ImportedCsv out;
  const bool has_codes = extra.size() == kNumTopics;
  if (has_codes) {
    for (std::size_t c : extra) out.topic_names.push_back(header[c]);
  }

  for (std::size_t r = 1; r < records.size(); ++r) {
    const CsvRecord& rec = records[r];
    // A trailing empty line parses as one empty field.
    if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;
    if (rec.fields.size() != header.size()) {
      bad_row(rec.line, "expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(rec.fields.size()));
    }
    Post p;
    p.discussion_id = discussion_id;
    p.course_id = course_id;
    p.author_id = rec.fields[fixed[0]];
    p.post_id = rec.fields[fixed[1]];
    if (p.author_id.empty() || p.post_id.empty()) bad_row(rec.line, "empty StudentID or PostID");
    const auto initial = parse_flag(rec.fields[fixed[2]]);
    if (!initial) bad_row(rec.line, "IsInitial must be 0 or 1");
    if (!*initial) p.parent_post_id = std::string{};
    const auto ts = parse_timestamp(rec.fields[fixed[3]]);
    if (!ts) bad_row(rec.line, "bad Timestamp \"" + rec.fields[fixed[3]] + "\"");
    p.created_at = *ts;
    p.raw_text = rec.fields[fixed[4]];
    if (has_codes) {
      CodeVector codes{};
      for (std::size_t t = 0; t < kNumTopics; ++t) {
        const auto v = parse_flag(rec.fields[extra[t]]);
        if (!v) bad_row(rec.line, "code column \"" + header[extra[t]] + "\" must be 0 or 1");
        codes[t] = *v;
      }
      out.codes.push_back(codes);
    }
    out.posts.push_back(std::move(p));
  }
  return out;
}

}  // namespace ondiscuss
