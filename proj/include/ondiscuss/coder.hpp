#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ondiscuss/codebook.hpp"
#include "ondiscuss/post.hpp"
#include "ondiscuss/text.hpp"

namespace ondiscuss {

/// Byte span [start, end) of a keyword hit in the raw post text.
struct KeywordMatch {
  std::string keyword;  // display form
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const KeywordMatch&) const = default;
};

using CodeVector = std::array<bool, kNumTopics>;

struct CodedUtterance {
  std::string post_id;
  std::string student_id;
  bool is_initial = true;
  std::int64_t codebook_version = 0;
  CodeVector codes{};
  std::array<std::vector<KeywordMatch>, kNumTopics> matches;

  bool operator==(const CodedUtterance&) const = default;
};

/// Codebook indexed by the first stem of each matcher.
class CompiledCodebook {
 public:
  explicit CompiledCodebook(const Codebook& codebook);

  const Codebook& codebook() const { return *codebook_; }

  CodedUtterance code(const TokenizedDoc& doc, const Post& post) const;

 private:
  struct Entry {
    std::size_t topic;
    std::size_t slot;  // index into keyword_refs_
  };
  const Codebook* codebook_;
  std::vector<const Keyword*> keyword_refs_;
  std::unordered_map<std::string, std::vector<Entry>> by_first_stem_;
};

/// A keyword matches where its stems appear on consecutive tokens of the
/// stopword-filtered sequence. Different keywords may overlap; one keyword is
/// scanned left to right without overlapping itself.
CodedUtterance code_post(const TokenizedDoc& doc, const Post& post, const Codebook& codebook);

std::vector<CodedUtterance> code_corpus(std::span<const TokenizedDoc> docs,
                                        std::span<const Post> posts, const Codebook& codebook);

}  // namespace ondiscuss
