#include "ondiscuss/json_io.hpp"

#include "ondiscuss/error.hpp"

namespace ondiscuss {

using nlohmann::json;

namespace {

json point_json(const Point2& p) { return json::array({p[0], p[1]}); }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
T required(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::kMalformedPayload, std::string("missing field \"") + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kMalformedPayload, std::string("field \"") + key + "\": " + e.what());
  }
}

}  // namespace

void to_json(json& j, const Post& p) {
  j = json{{"post_id", p.post_id},
           {"discussion_id", p.discussion_id},
           {"course_id", p.course_id},
           {"author_id", p.author_id},
           {"parent_post_id", p.parent_post_id ? json(*p.parent_post_id) : json(nullptr)},
           {"created_at", format_timestamp(p.created_at)},
           {"raw_text", p.raw_text},
           {"had_media", p.had_media}};
}

void from_json(const json& j, Post& p) {
  p.post_id = required<std::string>(j, "post_id");
  p.discussion_id = j.value("discussion_id", std::string{});
  p.course_id = j.value("course_id", std::string{});
  p.author_id = required<std::string>(j, "author_id");
  if (j.contains("parent_post_id") && !j["parent_post_id"].is_null()) {
    p.parent_post_id = j["parent_post_id"].get<std::string>();
  } else {
    p.parent_post_id.reset();
  }
  const auto ts = parse_timestamp(required<std::string>(j, "created_at"));
  if (!ts) throw Error(ErrorKind::kMalformedPayload, "bad created_at");
  p.created_at = *ts;
  p.raw_text = j.value("raw_text", std::string{});
  p.had_media = j.value("had_media", false);
}

void to_json(json& j, const DiscussionSummary& s) {
  j = json{{"discussion_id", s.discussion_id},
           {"course_id", s.course_id},
           {"title", s.title},
           {"assignment_id", s.assignment_id ? json(*s.assignment_id) : json(nullptr)},
           {"post_count", s.post_count}};
}

void from_json(const json& j, DiscussionSummary& s) {
  s.discussion_id = required<std::string>(j, "discussion_id");
  s.course_id = j.value("course_id", std::string{});
  s.title = j.value("title", std::string{});
  if (j.contains("assignment_id") && !j["assignment_id"].is_null()) {
    s.assignment_id = j["assignment_id"].get<std::string>();
  } else {
    s.assignment_id.reset();
  }
  s.post_count = j.value("post_count", std::int64_t{0});
}

void to_json(json& j, const Keyword& k) { j = json{{"display", k.display}, {"matcher", k.matcher}}; }

void from_json(const json& j, Keyword& k) {
  k.display = required<std::string>(j, "display");
  k.matcher = required<std::vector<std::string>>(j, "matcher");
}

void to_json(json& j, const Topic& t) { j = json{{"name", t.name}, {"keywords", t.keywords}}; }

void from_json(const json& j, Topic& t) {
  t.name = required<std::string>(j, "name");
  t.keywords.clear();
  if (j.contains("keywords")) {
    for (const json& k : j["keywords"]) t.keywords.push_back(k.get<Keyword>());
  }
}

void to_json(json& j, const Codebook& c) {
  j = json{{"discussion_id", c.discussion_id}, {"version", c.version}, {"topics", c.topics}};
}

void from_json(const json& j, Codebook& c) {
  c.discussion_id = j.value("discussion_id", std::string{});
  c.version = required<std::int64_t>(j, "version");
  c.topics.clear();
  for (const json& t : required<json>(j, "topics")) c.topics.push_back(t.get<Topic>());
}

void to_json(json& j, const CodebookEdit& e) {
  j = json{{"kind", std::string(to_string(e.kind))}, {"topic_index", e.topic_index}, {"payload", e.payload}};
}

void from_json(const json& j, CodebookEdit& e) {
  e.kind = parse_edit_kind(required<std::string>(j, "kind"));
  e.topic_index = required<std::size_t>(j, "topic_index");
  const json& payload = required<json>(j, "payload");
  e.payload.clear();
  if (payload.is_string()) {
    e.payload.push_back(payload.get<std::string>());
  } else if (payload.is_array()) {
    for (const json& s : payload) {
      if (!s.is_string()) throw Error(ErrorKind::kMalformedPayload, "payload entries must be strings");
      e.payload.push_back(s.get<std::string>());
    }
  } else {
    throw Error(ErrorKind::kMalformedPayload, "payload must be a string or array of strings");
  }
}

void to_json(json& j, const CodedUtterance& u) {
  json matches = json::array();
  for (std::size_t t = 0; t < kNumTopics; ++t) {
    json spans = json::array();
    for (const KeywordMatch& m : u.matches[t]) {
      spans.push_back({{"keyword", m.keyword}, {"start", m.start}, {"end", m.end}});
    }
    matches.push_back(std::move(spans));
  }
  j = json{{"post_id", u.post_id},
           {"student_id", u.student_id},
           {"is_initial", u.is_initial},
           {"codebook_version", u.codebook_version},
           {"codes", u.codes},
           {"matches", std::move(matches)}};
}

void to_json(json& j, const UnitResult& u) {
  j = json{{"student_id", u.student_id},
           {"raw_counts", u.raw_counts},
           {"normalized", u.normalized},
           {"point", point_json(u.point)},
           {"centroid", point_json(u.centroid)}};
}

namespace {

json nodes_json(const EnaModel& model, const Codebook& codebook) {
  json nodes = json::array();
  for (std::size_t k = 0; k < kNumTopics; ++k) {
    nodes.push_back({{"index", k},
                     {"name", k < codebook.topics.size() ? codebook.topics[k].name : std::to_string(k)},
                     {"x", model.code_positions[k][0]},
                     {"y", model.code_positions[k][1]}});
  }
  return nodes;
}

json edges_json(const ConnectionVector& weights) {
  json edges = json::array();
  for (std::size_t e = 0; e < kNumEdges; ++e) {
    const auto [i, j] = edge_codes(e);
    edges.push_back({{"source", i}, {"target", j}, {"weight", weights[e]}});
  }
  return edges;
}

}  // namespace

json model_payload(const EnaModel& model, const Codebook& codebook,
                   const std::optional<std::string>& discussion_url) {
  json basis = json::array();
  for (const auto& row : model.basis) basis.push_back(json::array({row[0], row[1]}));
  json payload{
      {"discussion_id", model.discussion_id},
      {"codebook_version", model.codebook_version},
      {"scope", std::string(to_string(model.scope))},
      {"codebook", codebook},
      {"nodes", nodes_json(model, codebook)},
      {"edges", edges_json(model.group_mean)},
      {"group_mean", model.group_mean},
      {"units", model.units},
      {"basis", std::move(basis)},
      {"variance_explained", model.variance_explained},
      {"dimension_defined", model.dimension_defined},
      {"fit", json::array({optional_json(model.fit[0]), optional_json(model.fit[1])})},
      {"notes", model.notes},
  };
  if (discussion_url) payload["discussion_url"] = *discussion_url;
  return payload;
}

json individual_payload(const EnaModel& model, const IndividualNetwork& network,
                        const Codebook& codebook, const std::optional<CanvasLinks>& links) {
  json posts = json::array();
  for (const StudentPost& sp : network.posts) {
    json coded = sp.coded;
    posts.push_back({{"post_id", sp.post.post_id},
                     {"created_at", format_timestamp(sp.post.created_at)},
                     {"is_initial", sp.post.is_initial()},
                     {"had_media", sp.post.had_media},
                     {"text", sp.post.raw_text},
                     {"codes", coded["codes"]},
                     {"matches", coded["matches"]}});
  }
  json payload{
      {"discussion_id", model.discussion_id},
      {"codebook_version", model.codebook_version},
      {"scope", std::string(to_string(model.scope))},
      {"student_id", network.unit.student_id},
      {"unit", network.unit},
      {"nodes", nodes_json(model, codebook)},
      {"edges", edges_json(network.unit.normalized)},
      {"posts", std::move(posts)},
  };
  if (links) {
    payload["discussion_url"] = links->discussion_url;
    payload["speedgrader_url"] = links->speedgrader_url ? json(*links->speedgrader_url) : json(nullptr);
  }
  return payload;
}

}  // namespace ondiscuss
