#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "ondiscuss/canvas.hpp"
#include "ondiscuss/codebook.hpp"
#include "ondiscuss/lda.hpp"
#include "ondiscuss/store.hpp"
#include "ondiscuss/text.hpp"

namespace ondiscuss {

/// Pulls one discussion and its posts. Throws kNotFound when the course does
/// not list the discussion.
DiscussionRecord ingest_canvas(CanvasClient& client, const std::string& course_id,
                               const std::string& discussion_id);

/// Posts from an exported or text-only CSV. Any code columns are ignored.
DiscussionRecord ingest_csv(std::string_view bytes, const std::string& discussion_id,
                            const std::string& course_id, const std::string& title = {});

/// Initial codebook: preprocess `corpus`, fit LDA with `seed`, take the top ten
/// terms of each of the five topics.
Codebook generate_codebook(std::span<const Post> corpus, const std::string& discussion_id,
                           std::uint64_t seed, const LdaOptions& lda = {},
                           const PipelineOptions& pipeline = {});

}  // namespace ondiscuss
