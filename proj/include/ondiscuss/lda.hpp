#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ondiscuss/codebook.hpp"
#include "ondiscuss/text.hpp"

namespace ondiscuss {

struct LdaOptions {
  std::size_t num_topics = kNumTopics;
  double alpha = 0.5;
  double beta = 0.01;
  std::size_t iterations = 1000;
};

/// Row-major dense matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

struct LdaModel {
  std::size_t num_topics = kNumTopics;
  std::vector<std::string> vocab;  // sorted
  Matrix topic_word;               // K x V, rows sum to 1
  Matrix doc_topic;                // D x K, rows sum to 1
  double alpha = 0.5;
  double beta = 0.01;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
};

/// The generator is std::mt19937_64 seeded with `seed`; uniforms are built from
/// its top 53 bits so results do not depend on the standard library's
/// distributions.
class LdaRandom {
 public:
  explicit LdaRandom(std::uint64_t seed);
  double uniform();  // [0, 1)
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

/// Collapsed Gibbs sampling over doc.ngram_tokens. Empty documents are not
/// sampled and get uniform doc_topic rows. Bitwise deterministic for a given
/// input and seed.
LdaModel fit_lda(std::span<const TokenizedDoc> docs, std::uint64_t seed,
                 const LdaOptions& options = {});

/// Same, over plain term sequences.
LdaModel fit_lda(std::span<const std::vector<std::string>> docs, std::uint64_t seed,
                 const LdaOptions& options = {});

/// Topics named "0".."4" holding their ten most probable terms, ties broken
/// alphabetically. Keywords keep the stemmed, underscore-joined form.
Codebook extract_codebook(const LdaModel& model, std::string discussion_id,
                          std::size_t keywords_per_topic = 10);

}  // namespace ondiscuss
