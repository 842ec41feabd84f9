#include "ondiscuss/lda.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "ondiscuss/error.hpp"

namespace ondiscuss {

LdaRandom::LdaRandom(std::uint64_t seed) : engine_(seed) {}

double LdaRandom::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t LdaRandom::below(std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
}

LdaModel fit_lda(std::span<const std::vector<std::string>> docs, std::uint64_t seed,
                 const LdaOptions& options) {
  const std::size_t K = options.num_topics;
  std::map<std::string, std::size_t> index;
  std::size_t total_tokens = 0;
  for (const auto& d : docs) {
    for (const std::string& w : d) index.emplace(w, 0);
    total_tokens += d.size();
  }
  if (total_tokens == 0) throw Error(ErrorKind::kEmptyCorpus, "all documents are empty");
  if (index.size() < K) {
    throw Error(ErrorKind::kVocabTooSmall, std::to_string(index.size()) + " terms for " +
                                               std::to_string(K) + " topics");
  }

  LdaModel model;
  model.num_topics = K;
  model.alpha = options.alpha;
  model.beta = options.beta;
  model.iterations = options.iterations;
  model.seed = seed;
  model.vocab.reserve(index.size());
  for (auto& [term, id] : index) {
    id = model.vocab.size();
    model.vocab.push_back(term);
  }
  const std::size_t V = model.vocab.size();
  const std::size_t D = docs.size();

  std::vector<std::vector<std::size_t>> words(D);
  std::vector<std::vector<std::size_t>> assign(D);
  std::vector<std::int64_t> doc_topic(D * K, 0);
  std::vector<std::int64_t> topic_word(K * V, 0);
  std::vector<std::int64_t> topic_total(K, 0);

  LdaRandom rng(seed);
  for (std::size_t d = 0; d < D; ++d) {
    words[d].reserve(docs[d].size());
    assign[d].reserve(docs[d].size());
    for (const std::string& w : docs[d]) {
      const std::size_t v = index.at(w);
      const std::size_t z = rng.below(K);
      words[d].push_back(v);
      assign[d].push_back(z);
      ++doc_topic[d * K + z];
      ++topic_word[z * V + v];
      ++topic_total[z];
    }
  }

  const double v_beta = static_cast<double>(V) * options.beta;
  std::vector<double> cumulative(K);
  for (std::size_t iter = 0; iter < options.iterations; ++iter) {
    for (std::size_t d = 0; d < D; ++d) {
      std::int64_t* nd = &doc_topic[d * K];
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const std::size_t v = words[d][i];
        std::size_t z = assign[d][i];
        --nd[z];
        --topic_word[z * V + v];
        --topic_total[z];

        double acc = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          acc += (static_cast<double>(nd[k]) + options.alpha) *
                 (static_cast<double>(topic_word[k * V + v]) + options.beta) /
                 (static_cast<double>(topic_total[k]) + v_beta);
          cumulative[k] = acc;
        }
        const double u = rng.uniform() * acc;
        z = 0;
        while (z + 1 < K && cumulative[z] <= u) ++z;

        assign[d][i] = z;
        ++nd[z];
        ++topic_word[z * V + v];
        ++topic_total[z];
      }
    }
  }

  model.topic_word = Matrix(K, V);
  for (std::size_t k = 0; k < K; ++k) {
    const double denom = static_cast<double>(topic_total[k]) + v_beta;
    for (std::size_t v = 0; v < V; ++v) {
      model.topic_word(k, v) = (static_cast<double>(topic_word[k * V + v]) + options.beta) / denom;
    }
  }
  model.doc_topic = Matrix(D, K);
  const double k_alpha = static_cast<double>(K) * options.alpha;
  for (std::size_t d = 0; d < D; ++d) {
    const double n = static_cast<double>(words[d].size());
    for (std::size_t k = 0; k < K; ++k) {
      model.doc_topic(d, k) = words[d].empty()
                                  ? 1.0 / static_cast<double>(K)
                                  : (static_cast<double>(doc_topic[d * K + k]) + options.alpha) /
                                        (n + k_alpha);
    }
  }
  return model;
}

LdaModel fit_lda(std::span<const TokenizedDoc> docs, std::uint64_t seed,
                 const LdaOptions& options) {
  std::vector<std::vector<std::string>> terms;
  terms.reserve(docs.size());
  for (const TokenizedDoc& d : docs) terms.push_back(d.ngram_tokens);
  return fit_lda(std::span<const std::vector<std::string>>(terms), seed, options);
}

Codebook extract_codebook(const LdaModel& model, std::string discussion_id,
                          std::size_t keywords_per_topic) {
  Codebook cb;
  cb.discussion_id = std::move(discussion_id);
  cb.version = 1;
  const std::size_t V = model.vocab.size();
  std::vector<std::size_t> order(V);
  for (std::size_t k = 0; k < model.num_topics; ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto row = model.topic_word.row(k);
    // vocab is sorted, so index order is alphabetical order.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
    Topic topic;
    topic.name = std::to_string(k);
    const std::size_t n = std::min(keywords_per_topic, V);
    for (std::size_t i = 0; i < n; ++i) topic.keywords.push_back(Keyword::from_stems(model.vocab[order[i]]));
    cb.topics.push_back(std::move(topic));
  }
  return cb;
}

}  // namespace ondiscuss
