#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ondiscuss/text.hpp"

namespace ondiscuss {

inline constexpr std::size_t kNumTopics = 5;
inline constexpr std::size_t kMaxKeywordStems = 3;

/// An instructor-facing phrase and the stem sequence it matches.
struct Keyword {
  std::string display;
  std::vector<std::string> matcher;

  /// Tokenizes, drops stopwords and stems `display`. Throws kEmptyName when no
  /// content word remains and kPhraseTooLong above kMaxKeywordStems stems.
  static Keyword from_phrase(std::string_view display,
                             const StopwordList& stopwords = StopwordList::bundled());
  /// For keywords that are already stems, e.g. "rest_api" from the topic model.
  /// The display form is kept verbatim; the matcher splits on underscores.
  static Keyword from_stems(std::string_view joined);

  bool operator==(const Keyword&) const = default;
};

struct Topic {
  std::string name;
  std::vector<Keyword> keywords;

  bool operator==(const Topic&) const = default;
};

struct Codebook {
  std::string discussion_id;
  std::int64_t version = 1;
  std::vector<Topic> topics;

  bool operator==(const Codebook&) const = default;
};

enum class EditKind { kRenameTopic, kAddKeyword, kRemoveKeyword, kReplaceKeyword };

std::string_view to_string(EditKind kind);
/// Accepts the snake_case names ("rename_topic", ...). Throws kMalformedPayload.
EditKind parse_edit_kind(std::string_view name);

/// payload by kind:
///   rename_topic    {new name}
///   add_keyword     {phrase}
///   remove_keyword  {display}
///   replace_keyword {old display, new phrase}
struct CodebookEdit {
  EditKind kind = EditKind::kAddKeyword;
  std::size_t topic_index = 0;
  std::vector<std::string> payload;

  static CodebookEdit rename(std::size_t topic, std::string name) {
    return {EditKind::kRenameTopic, topic, {std::move(name)}};
  }
  static CodebookEdit add(std::size_t topic, std::string phrase) {
    return {EditKind::kAddKeyword, topic, {std::move(phrase)}};
  }
  static CodebookEdit remove(std::size_t topic, std::string display) {
    return {EditKind::kRemoveKeyword, topic, {std::move(display)}};
  }
  static CodebookEdit replace(std::size_t topic, std::string old_display, std::string phrase) {
    return {EditKind::kReplaceKeyword, topic, {std::move(old_display), std::move(phrase)}};
  }
};

/// Returns a copy with the edit applied and version + 1. The input is not
/// modified. Keywords are identified by exact display text.
Codebook apply_edit(const Codebook& codebook, const CodebookEdit& edit,
                    const StopwordList& stopwords = StopwordList::bundled());

/// Applies the whole batch or nothing; the result is version + 1 regardless of
/// batch size.
Codebook apply_edits(const Codebook& codebook, std::span<const CodebookEdit> edits,
                     const StopwordList& stopwords = StopwordList::bundled());

/// Human-readable invariant violations; empty when the codebook is valid.
std::vector<std::string> validate(const Codebook& codebook);

/// Keywords within one topic whose display forms differ but whose matchers are
/// identical ("black box" / "black-box"). Legal, reported for the editor.
std::vector<std::string> matcher_overlaps(const Codebook& codebook);

/// Builds a version-1 codebook from topic names and display phrases. Phrases
/// that repeat an earlier display in the same topic are skipped.
Codebook make_codebook(std::string discussion_id,
                       std::span<const std::pair<std::string, std::vector<std::string>>> topics,
                       const StopwordList& stopwords = StopwordList::bundled());

}  // namespace ondiscuss
