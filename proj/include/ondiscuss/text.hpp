#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ondiscuss/post.hpp"

namespace ondiscuss {

/// A word of a post. Offsets are byte offsets into the raw post text.
struct Token {
  std::string surface;  // lowercased source text at [start, end)
  std::string stem;     // equals surface until stemmed
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Token&) const = default;
};

struct TokenizedDoc {
  std::string post_id;
  std::vector<Token> tokens;             // after stopword removal and stemming
  std::vector<std::string> ngram_tokens; // tokens after collocation joining

  bool operator==(const TokenizedDoc&) const = default;
};

/// Splits on every non-ASCII-letter byte, so hyphens, underscores, digits and
/// punctuation all separate words.
std::vector<Token> tokenize(std::string_view raw_text);

/// Classic Porter (1980) stemmer. Expects a lowercase ASCII word.
std::string porter_stem(std::string_view word);

class StopwordList {
 public:
  /// The list bundled with the library (assets/stopwords.txt).
  static const StopwordList& bundled();
  /// One word per line, LF endings; blank lines are ignored.
  static StopwordList parse(std::string_view text);
  static StopwordList load(const std::filesystem::path& path);

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

std::vector<Token> remove_stopwords(std::vector<Token> tokens,
                                    const StopwordList& stopwords = StopwordList::bundled());

/// Fills Token::stem. Results are memoized per thread.
void stem_tokens(std::span<Token> tokens);

/// tokenize -> remove_stopwords -> stem.
std::vector<Token> analyze(std::string_view raw_text,
                           const StopwordList& stopwords = StopwordList::bundled());

struct CollocationOptions {
  std::int64_t min_count = 5;
  double min_score = 10.0;
  double discount = 5.0;  // subtracted from the pair count before scoring
};

/// Underscore-joined 2- and 3-grams of stems with their corpus counts.
class CollocationTable {
 public:
  void insert(std::string phrase, std::int64_t count);
  bool contains(std::string_view phrase) const;
  std::int64_t count(std::string_view phrase) const;
  const std::map<std::string, std::int64_t, std::less<>>& phrases() const { return phrases_; }
  bool empty() const { return phrases_.empty(); }
  std::size_t size() const { return phrases_.size(); }

  /// Greedy left-to-right joining, preferring a trigram over a bigram at the
  /// same position.
  std::vector<std::string> join(std::span<const Token> tokens) const;

 private:
  std::map<std::string, std::int64_t, std::less<>> phrases_;
};

/// A bigram (a, b) is kept when count(ab) >= min_count and
/// (count(ab) - discount) * N / (count(a) * count(b)) >= min_score, where N is
/// the number of tokens in the corpus. Trigrams extend an accepted bigram by one
/// adjacent token and are scored the same way, treating the bigram as a unit.
CollocationTable detect_collocations(std::span<const TokenizedDoc> corpus,
                                     const CollocationOptions& options = {});

struct PipelineOptions {
  CollocationOptions collocations;
  const StopwordList* stopwords = nullptr;  // null: bundled list
};

/// Per post: analyze, then join collocations detected over the whole corpus.
std::vector<TokenizedDoc> preprocess_corpus(std::span<const Post> posts,
                                            const PipelineOptions& options = {});

/// Same, with a fixed collocation table.
std::vector<TokenizedDoc> preprocess_corpus(std::span<const Post> posts,
                                            const CollocationTable& table,
                                            const StopwordList& stopwords = StopwordList::bundled());

inline constexpr std::string_view kStopwordListVersion = "en-1";

}  // namespace ondiscuss
