#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ondiscuss {

using Timestamp = std::chrono::sys_seconds;

/// Parses "YYYY-MM-DDTHH:MM:SS" with an optional fractional part and a "Z" or
/// "+HH:MM" suffix. Returns nullopt on anything else.
std::optional<Timestamp> parse_timestamp(std::string_view text);
/// Always "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(Timestamp ts);

/// One discussion utterance.
///
/// A post without parent_post_id is an initial post. Posts imported from CSV
/// only know whether they are initial; their replies carry an empty parent id.
struct Post {
  std::string post_id;
  std::string discussion_id;
  std::string course_id;
  std::string author_id;  // pseudonymized student identifier
  std::optional<std::string> parent_post_id;
  Timestamp created_at{};
  std::string raw_text;
  bool had_media = false;

  bool is_initial() const { return !parent_post_id.has_value(); }
  bool operator==(const Post&) const = default;
};

struct DiscussionSummary {
  std::string discussion_id;
  std::string course_id;
  std::string title;
  std::optional<std::string> assignment_id;
  std::int64_t post_count = 0;

  bool operator==(const DiscussionSummary&) const = default;
};

}  // namespace ondiscuss
