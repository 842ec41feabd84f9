#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "ondiscuss/error.hpp"
#include "ondiscuss/lda.hpp"

using namespace ondiscuss;

namespace {

void check_rows_normalized(const Matrix& m) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto row = m.row(r);
    double sum = 0;
    for (double v : row) {
      CHECK(v >= 0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kIo;
}

}  // namespace

TEST_CASE("generator is portable") {
  LdaRandom a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differs |= x != c.uniform();
  }
  CHECK(differs);
  // std::mt19937_64 is fully specified; its 10000th output from the default
  // seed is fixed by the standard.
  std::mt19937_64 e;
  e.discard(9999);
  CHECK(e() == 9981545732273789042ull);
  for (int i = 0; i < 1000; ++i) CHECK(a.below(7) < 7);
}

TEST_CASE("planted topics are recovered") {
  const auto planted = fixtures::planted_corpus(1);
  const LdaModel model = fit_lda(std::span<const std::vector<std::string>>(planted.docs), 1);
  CHECK(model.num_topics == 5);
  CHECK(model.vocab.size() == 50);
  CHECK(std::is_sorted(model.vocab.begin(), model.vocab.end()));
  check_rows_normalized(model.topic_word);
  check_rows_normalized(model.doc_topic);
  CHECK(model.doc_topic.rows == 500);

  const Codebook cb = extract_codebook(model, "planted");
  REQUIRE(cb.topics.size() == 5);
  for (std::size_t t = 0; t < 5; ++t) {
    CHECK(cb.topics[t].name == std::to_string(t));
    CHECK(cb.topics[t].keywords.size() == 10);
  }
  CHECK(validate(cb).empty());
  const auto overlaps = fixtures::aligned_overlaps(cb, planted.topics);
  for (std::size_t o : overlaps) CHECK(o == 10);
}

TEST_CASE("fits are bitwise deterministic per seed") {
  const auto planted = fixtures::planted_corpus(2, 100, 30);
  std::span<const std::vector<std::string>> docs(planted.docs);
  LdaOptions quick;
  quick.iterations = 100;
  const LdaModel a = fit_lda(docs, 11, quick);
  const LdaModel b = fit_lda(docs, 11, quick);
  CHECK(a.topic_word == b.topic_word);
  CHECK(a.doc_topic == b.doc_topic);
  const LdaModel c = fit_lda(docs, 12, quick);
  CHECK(extract_codebook(c, "x").topics.size() == 5);
}

TEST_CASE("boundary corpora") {
  const std::vector<std::vector<std::string>> one = {{"a", "b", "c", "d", "e"}};
  const LdaModel model = fit_lda(std::span<const std::vector<std::string>>(one), 3);
  CHECK(model.topic_word.rows == 5);
  CHECK(model.topic_word.cols == 5);
  check_rows_normalized(model.topic_word);
  const Codebook cb = extract_codebook(model, "tiny");
  for (const Topic& t : cb.topics) CHECK(t.keywords.size() == 5);

  const std::vector<std::vector<std::string>> empty = {{}, {}};
  CHECK(kind_of([&] { fit_lda(std::span<const std::vector<std::string>>(empty), 1); }) ==
        ErrorKind::kEmptyCorpus);
  const std::vector<std::vector<std::string>> small = {{"a", "b", "a", "c", "d"}};
  CHECK(kind_of([&] { fit_lda(std::span<const std::vector<std::string>>(small), 1); }) ==
        ErrorKind::kVocabTooSmall);

  const std::vector<std::vector<std::string>> gaps = {{}, {"a", "b", "c", "d", "e", "f"}, {}};
  const LdaModel g = fit_lda(std::span<const std::vector<std::string>>(gaps), 5);
  REQUIRE(g.doc_topic.rows == 3);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(g.doc_topic(0, k) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(g.doc_topic(2, k) == doctest::Approx(0.2).epsilon(1e-12));
  }
}

TEST_CASE("extract_codebook ranks by probability with alphabetical ties") {
  LdaModel m;
  m.vocab = {"alpha", "beta", "delta", "gamma"};
  m.topic_word = Matrix(5, 4);
  for (std::size_t k = 0; k < 5; ++k) {
    m.topic_word(k, 0) = 0.1;
    m.topic_word(k, 1) = 0.4;
    m.topic_word(k, 2) = 0.4;
    m.topic_word(k, 3) = 0.1;
  }
  const Codebook cb = extract_codebook(m, "ties", 3);
  const auto& kws = cb.topics[0].keywords;
  REQUIRE(kws.size() == 3);
  CHECK(kws[0].display == "beta");
  CHECK(kws[1].display == "delta");
  CHECK(kws[2].display == "alpha");

  m.vocab = {"categori_partit", "rest_api", "x", "y"};
  const Codebook joined = extract_codebook(m, "j", 4);
  const Keyword& k = joined.topics[0].keywords[0];
  CHECK(k.display == "rest_api");
  CHECK(k.matcher == std::vector<std::string>{"rest", "api"});
}

TEST_CASE("five by ten for any seed on a realistic corpus") {
  const auto posts = fixtures::synthetic_discussion(120, 60, fixtures::learning_course_codebook(), 9);
  const auto docs = preprocess_corpus(posts);
  LdaOptions quick;
  quick.iterations = 150;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const Codebook cb = extract_codebook(fit_lda(docs, seed, quick), "real");
    REQUIRE(cb.topics.size() == 5);
    for (const Topic& t : cb.topics) CHECK(t.keywords.size() == 10);
    CHECK(validate(cb).empty());
  }
}
