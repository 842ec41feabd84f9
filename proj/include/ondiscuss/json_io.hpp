#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "ondiscuss/canvas.hpp"
#include "ondiscuss/codebook.hpp"
#include "ondiscuss/coder.hpp"
#include "ondiscuss/ena.hpp"
#include "ondiscuss/post.hpp"

namespace ondiscuss {

void to_json(nlohmann::json& j, const Post& p);
void from_json(const nlohmann::json& j, Post& p);
void to_json(nlohmann::json& j, const DiscussionSummary& s);
void from_json(const nlohmann::json& j, DiscussionSummary& s);
void to_json(nlohmann::json& j, const Keyword& k);
void from_json(const nlohmann::json& j, Keyword& k);
void to_json(nlohmann::json& j, const Topic& t);
void from_json(const nlohmann::json& j, Topic& t);
void to_json(nlohmann::json& j, const Codebook& c);
void from_json(const nlohmann::json& j, Codebook& c);
void to_json(nlohmann::json& j, const CodebookEdit& e);
/// Throws kMalformedPayload on unknown kinds or missing fields.
void from_json(const nlohmann::json& j, CodebookEdit& e);
void to_json(nlohmann::json& j, const CodedUtterance& u);
void to_json(nlohmann::json& j, const UnitResult& u);

/// Rendering payload: nodes at code positions, all ten edges with their group
/// weights, unit points and centroids, projection statistics, and the codebook
/// the model was built from.
nlohmann::json model_payload(const EnaModel& model, const Codebook& codebook,
                             const std::optional<std::string>& discussion_url = std::nullopt);

/// A student's network plus each in-scope post with its per-topic match spans.
nlohmann::json individual_payload(const EnaModel& model, const IndividualNetwork& network,
                                  const Codebook& codebook, const std::optional<CanvasLinks>& links);

}  // namespace ondiscuss
