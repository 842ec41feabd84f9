#include "ondiscuss/coder.hpp"

#include <algorithm>

#include "ondiscuss/error.hpp"

namespace ondiscuss {

CompiledCodebook::CompiledCodebook(const Codebook& codebook) : codebook_(&codebook) {
  const std::size_t topics = std::min(codebook.topics.size(), kNumTopics);
  for (std::size_t t = 0; t < topics; ++t) {
    for (const Keyword& kw : codebook.topics[t].keywords) {
      if (kw.matcher.empty()) continue;
      by_first_stem_[kw.matcher.front()].push_back({t, keyword_refs_.size()});
      keyword_refs_.push_back(&kw);
    }
  }
}

CodedUtterance CompiledCodebook::code(const TokenizedDoc& doc, const Post& post) const {
  if (doc.post_id != post.post_id) {
    throw Error(ErrorKind::kPipelineMismatch,
                "document " + doc.post_id + " does not belong to post " + post.post_id);
  }
  CodedUtterance out;
  out.post_id = post.post_id;
  out.student_id = post.author_id;
  out.is_initial = post.is_initial();
  out.codebook_version = codebook_->version;

  const auto& toks = doc.tokens;
  // First token index at which each keyword may match again.
  std::vector<std::size_t> next_allowed(keyword_refs_.size(), 0);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    auto hit = by_first_stem_.find(toks[i].stem);
    if (hit == by_first_stem_.end()) continue;
    for (const Entry& e : hit->second) {
      if (i < next_allowed[e.slot]) continue;
      const std::vector<std::string>& m = keyword_refs_[e.slot]->matcher;
      if (i + m.size() > toks.size()) continue;
      bool ok = true;
      for (std::size_t k = 1; k < m.size() && ok; ++k) ok = toks[i + k].stem == m[k];
      if (!ok) continue;
      out.matches[e.topic].push_back(
          {keyword_refs_[e.slot]->display, toks[i].start, toks[i + m.size() - 1].end});
      next_allowed[e.slot] = i + m.size();
    }
  }
  for (std::size_t t = 0; t < kNumTopics; ++t) out.codes[t] = !out.matches[t].empty();
  return out;
}

CodedUtterance code_post(const TokenizedDoc& doc, const Post& post, const Codebook& codebook) {
  return CompiledCodebook(codebook).code(doc, post);
}

std::vector<CodedUtterance> code_corpus(std::span<const TokenizedDoc> docs,
                                        std::span<const Post> posts, const Codebook& codebook) {
  if (docs.size() != posts.size()) {
    throw Error(ErrorKind::kPipelineMismatch, std::to_string(docs.size()) + " documents for " +
                                                  std::to_string(posts.size()) + " posts");
  }
  const CompiledCodebook compiled(codebook);
  std::vector<CodedUtterance> out;
  out.reserve(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i) out.push_back(compiled.code(docs[i], posts[i]));
  return out;
}

}  // namespace ondiscuss
