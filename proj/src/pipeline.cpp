#include "ondiscuss/pipeline.hpp"

#include "ondiscuss/csv.hpp"
#include "ondiscuss/error.hpp"

namespace ondiscuss {

DiscussionRecord ingest_canvas(CanvasClient& client, const std::string& course_id,
                               const std::string& discussion_id) {
  DiscussionRecord record;
  bool found = false;
  for (DiscussionSummary& s : client.fetch_discussions(course_id)) {
    if (s.discussion_id == discussion_id) {
      record.summary = std::move(s);
      found = true;
      break;
    }
  }
  if (!found) {
    throw Error(ErrorKind::kNotFound, "course " + course_id + " has no discussion " + discussion_id);
  }
  FetchedDiscussion fetched = client.fetch_posts(course_id, discussion_id);
  record.posts = std::move(fetched.posts);
  record.identities = std::move(fetched.identities);
  record.summary.post_count = static_cast<std::int64_t>(record.posts.size());
  return record;
}

DiscussionRecord ingest_csv(std::string_view bytes, const std::string& discussion_id,
                            const std::string& course_id, const std::string& title) {
  ImportedCsv imported = import_csv(bytes, discussion_id, course_id);
  DiscussionRecord record;
  record.summary.discussion_id = discussion_id;
  record.summary.course_id = course_id;
  record.summary.title = title.empty() ? discussion_id : title;
  record.summary.post_count = static_cast<std::int64_t>(imported.posts.size());
  record.posts = std::move(imported.posts);
  return record;
}

Codebook generate_codebook(std::span<const Post> corpus, const std::string& discussion_id,
                           std::uint64_t seed, const LdaOptions& lda,
                           const PipelineOptions& pipeline) {
  const std::vector<TokenizedDoc> docs = preprocess_corpus(corpus, pipeline);
  return extract_codebook(fit_lda(docs, seed, lda), discussion_id);
}

}  // namespace ondiscuss
