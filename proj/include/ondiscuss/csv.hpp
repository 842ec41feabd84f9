#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ondiscuss/codebook.hpp"
#include "ondiscuss/coder.hpp"
#include "ondiscuss/post.hpp"

namespace ondiscuss {

/// Fixed leading columns of the ENA Web Tool export, followed by one 0/1
/// column per topic named after the topic.
inline constexpr std::array<std::string_view, 5> kCsvFixedColumns = {
    "StudentID", "PostID", "IsInitial", "Timestamp", "Text"};

struct CsvRecord {
  std::size_t line = 0;  // 1-based physical line where the record starts
  std::vector<std::string> fields;
};

/// RFC 4180 reader. Accepts CRLF or LF record separators; quoted fields may
/// contain separators, quotes ("") and line breaks. Throws kBadRow on an
/// unterminated quote or stray text after a closing quote.
std::vector<CsvRecord> parse_csv(std::string_view bytes);

/// Quotes the field when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view value);

/// UTF-8, CRLF-separated. Rows are ordered by (student, timestamp, post id).
/// Utterances whose post is missing from `posts` are skipped.
std::string export_csv(std::span<const Post> posts, std::span<const CodedUtterance> utterances,
                       const Codebook& codebook);

struct ImportedCsv {
  std::vector<Post> posts;
  std::vector<std::string> topic_names;  // empty when the file has no code columns
  std::vector<CodeVector> codes;         // aligned with posts, or empty
};

/// Columns are located by header name and extra columns are ignored. Exactly
/// five non-fixed columns are read as code columns. Replies get an empty
/// parent id since the file only records whether a post is initial.
ImportedCsv import_csv(std::string_view bytes, const std::string& discussion_id = {},
                       const std::string& course_id = {});

}  // namespace ondiscuss
