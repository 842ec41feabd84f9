#include "ondiscuss/text.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "ondiscuss/assets.hpp"
#include "ondiscuss/error.hpp"

namespace ondiscuss {
namespace {

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

char to_lower_ascii(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

const std::string& cached_stem(const std::string& word) {
  thread_local std::unordered_map<std::string, std::string> cache;
  auto it = cache.find(word);
  if (it == cache.end()) it = cache.emplace(word, porter_stem(word)).first;
  return it->second;
}

struct PairHash {
  std::size_t operator()(const std::pair<std::string, std::string>& p) const {
    const std::size_t h = std::hash<std::string>{}(p.first);
    return h ^ (std::hash<std::string>{}(p.second) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }
};

using PairCounts = std::unordered_map<std::pair<std::string, std::string>, std::int64_t, PairHash>;

bool passes(std::int64_t joint, std::int64_t left, std::int64_t right, std::int64_t total,
            const CollocationOptions& options) {
  if (joint < options.min_count || left <= 0 || right <= 0) return false;
  const double score = (static_cast<double>(joint) - options.discount) * static_cast<double>(total) /
                       (static_cast<double>(left) * static_cast<double>(right));
  return score >= options.min_score;
}

}  // namespace

std::vector<Token> tokenize(std::string_view raw_text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = raw_text.size();
  while (i < n) {
    while (i < n && !is_ascii_letter(raw_text[i])) ++i;
    if (i >= n) break;
    const std::size_t start = i;
    std::string surface;
    while (i < n && is_ascii_letter(raw_text[i])) surface.push_back(to_lower_ascii(raw_text[i++]));
    Token t;
    t.stem = surface;
    t.surface = std::move(surface);
    t.start = start;
    t.end = i;
    out.push_back(std::move(t));
  }
  return out;
}

const StopwordList& StopwordList::bundled() {
  static const StopwordList list = parse(assets::kStopwords);
  return list;
}

StopwordList StopwordList::parse(std::string_view text) {
  StopwordList list;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      std::string word;
      for (char c : line) word.push_back(to_lower_ascii(c));
      list.words_.insert(std::move(word));
    }
    pos = nl + 1;
  }
  return list;
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read stopword list " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool StopwordList::contains(std::string_view word) const {
  return words_.find(std::string(word)) != words_.end();
}

std::vector<Token> remove_stopwords(std::vector<Token> tokens, const StopwordList& stopwords) {
  std::erase_if(tokens, [&](const Token& t) { return stopwords.contains(t.surface); });
  return tokens;
}

void stem_tokens(std::span<Token> tokens) {
  for (Token& t : tokens) t.stem = cached_stem(t.surface);
}

std::vector<Token> analyze(std::string_view raw_text, const StopwordList& stopwords) {
  std::vector<Token> tokens = remove_stopwords(tokenize(raw_text), stopwords);
  stem_tokens(tokens);
  return tokens;
}

void CollocationTable::insert(std::string phrase, std::int64_t count) {
  phrases_[std::move(phrase)] = count;
}

bool CollocationTable::contains(std::string_view phrase) const {
  return phrases_.find(phrase) != phrases_.end();
}

std::int64_t CollocationTable::count(std::string_view phrase) const {
  auto it = phrases_.find(phrase);
  return it == phrases_.end() ? 0 : it->second;
}

std::vector<std::string> CollocationTable::join(std::span<const Token> tokens) const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  std::size_t i = 0;
  std::string candidate;
  while (i < tokens.size()) {
    if (!phrases_.empty() && i + 1 < tokens.size()) {
      candidate = tokens[i].stem + "_" + tokens[i + 1].stem;
      if (i + 2 < tokens.size()) {
        std::string tri = candidate + "_" + tokens[i + 2].stem;
        if (contains(tri)) {
          out.push_back(std::move(tri));
          i += 3;
          continue;
        }
      }
      if (contains(candidate)) {
        out.push_back(candidate);
        i += 2;
        continue;
      }
    }
    out.push_back(tokens[i].stem);
    ++i;
  }
  return out;
}

CollocationTable detect_collocations(std::span<const TokenizedDoc> corpus,
                                     const CollocationOptions& options) {
  std::unordered_map<std::string, std::int64_t> unigrams;
  PairCounts bigrams;
  std::int64_t total = 0;
  for (const TokenizedDoc& doc : corpus) {
    const auto& toks = doc.tokens;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      ++unigrams[toks[i].stem];
      ++total;
      if (i + 1 < toks.size()) ++bigrams[{toks[i].stem, toks[i + 1].stem}];
    }
  }

  CollocationTable table;
  std::unordered_map<std::string, std::int64_t> accepted;  // "a_b" -> count
  for (const auto& [pair, joint] : bigrams) {
    if (passes(joint, unigrams[pair.first], unigrams[pair.second], total, options)) {
      std::string phrase = pair.first + "_" + pair.second;
      accepted.emplace(phrase, joint);
      table.insert(std::move(phrase), joint);
    }
  }
  if (accepted.empty()) return table;

  // Trigram candidates: an accepted bigram extended by its left or right
  // neighbour, scored with the bigram acting as a single token.
  std::unordered_map<std::string, std::int64_t> trigrams;
  for (const TokenizedDoc& doc : corpus) {
    const auto& toks = doc.tokens;
    for (std::size_t i = 0; i + 2 < toks.size(); ++i) {
      const std::string left = toks[i].stem + "_" + toks[i + 1].stem;
      const std::string right = toks[i + 1].stem + "_" + toks[i + 2].stem;
      if (accepted.count(left) || accepted.count(right)) {
        ++trigrams[left + "_" + toks[i + 2].stem];
      }
    }
  }
  for (const auto& [phrase, joint] : trigrams) {
    const std::size_t u1 = phrase.find('_');
    const std::size_t u2 = phrase.find('_', u1 + 1);
    const std::string a = phrase.substr(0, u1);
    const std::string b = phrase.substr(u1 + 1, u2 - u1 - 1);
    const std::string c = phrase.substr(u2 + 1);
    bool keep = false;
    if (auto it = accepted.find(a + "_" + b); it != accepted.end()) {
      keep = passes(joint, it->second, unigrams[c], total, options);
    }
    if (!keep) {
      if (auto it = accepted.find(b + "_" + c); it != accepted.end()) {
        keep = passes(joint, unigrams[a], it->second, total, options);
      }
    }
    if (keep) table.insert(phrase, joint);
  }
  return table;
}

std::vector<TokenizedDoc> preprocess_corpus(std::span<const Post> posts,
                                            const CollocationTable& table,
                                            const StopwordList& stopwords) {
  std::vector<TokenizedDoc> docs;
  docs.reserve(posts.size());
  for (const Post& p : posts) {
    TokenizedDoc doc;
    doc.post_id = p.post_id;
    doc.tokens = analyze(p.raw_text, stopwords);
    doc.ngram_tokens = table.join(doc.tokens);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<TokenizedDoc> preprocess_corpus(std::span<const Post> posts,
                                            const PipelineOptions& options) {
  const StopwordList& stopwords = options.stopwords ? *options.stopwords : StopwordList::bundled();
  std::vector<TokenizedDoc> docs = preprocess_corpus(posts, CollocationTable{}, stopwords);
  const CollocationTable table = detect_collocations(docs, options.collocations);
  for (TokenizedDoc& doc : docs) doc.ngram_tokens = table.join(doc.tokens);
  return docs;
}

}  // namespace ondiscuss
