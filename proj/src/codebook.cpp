#include "ondiscuss/codebook.hpp"

#include <algorithm>
#include <set>

#include "ondiscuss/error.hpp"

namespace ondiscuss {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

bool is_lower_stem(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

Topic& topic_at(Codebook& cb, std::size_t index) {
  if (index >= cb.topics.size() || index >= kNumTopics) {
    throw Error(ErrorKind::kTopicIndexOutOfRange, "topic index " + std::to_string(index));
  }
  return cb.topics[index];
}

const std::string& payload_at(const CodebookEdit& edit, std::size_t i) {
  if (edit.payload.size() <= i) {
    throw Error(ErrorKind::kEmptyName, std::string(to_string(edit.kind)) + " is missing its payload");
  }
  return edit.payload[i];
}

auto find_display(Topic& topic, std::string_view display) {
  return std::find_if(topic.keywords.begin(), topic.keywords.end(),
                      [&](const Keyword& k) { return k.display == display; });
}

void apply_in_place(Codebook& cb, const CodebookEdit& edit, const StopwordList& stopwords) {
  Topic& topic = topic_at(cb, edit.topic_index);
  switch (edit.kind) {
    case EditKind::kRenameTopic: {
      std::string name = trim(payload_at(edit, 0));
      if (name.empty()) throw Error(ErrorKind::kEmptyName, "topic name is empty");
      for (std::size_t i = 0; i < cb.topics.size(); ++i) {
        if (i != edit.topic_index && cb.topics[i].name == name) {
          throw Error(ErrorKind::kDuplicateTopicName, "topic \"" + name + "\" already exists");
        }
      }
      topic.name = std::move(name);
      break;
    }
    case EditKind::kAddKeyword: {
      Keyword kw = Keyword::from_phrase(payload_at(edit, 0), stopwords);
      if (find_display(topic, kw.display) != topic.keywords.end()) {
        throw Error(ErrorKind::kDuplicateKeyword,
                    "\"" + kw.display + "\" already in topic \"" + topic.name + "\"");
      }
      topic.keywords.push_back(std::move(kw));
      break;
    }
    case EditKind::kRemoveKeyword: {
      const std::string display = trim(payload_at(edit, 0));
      auto it = find_display(topic, display);
      if (it == topic.keywords.end()) {
        throw Error(ErrorKind::kUnknownKeyword,
                    "\"" + display + "\" not in topic \"" + topic.name + "\"");
      }
      topic.keywords.erase(it);
      break;
    }
    case EditKind::kReplaceKeyword: {
      const std::string old_display = trim(payload_at(edit, 0));
      Keyword kw = Keyword::from_phrase(payload_at(edit, 1), stopwords);
      auto it = find_display(topic, old_display);
      if (it == topic.keywords.end()) {
        throw Error(ErrorKind::kUnknownKeyword,
                    "\"" + old_display + "\" not in topic \"" + topic.name + "\"");
      }
      auto clash = find_display(topic, kw.display);
      if (clash != topic.keywords.end() && clash != it) {
        throw Error(ErrorKind::kDuplicateKeyword,
                    "\"" + kw.display + "\" already in topic \"" + topic.name + "\"");
      }
      *it = std::move(kw);
      break;
    }
  }
}

}  // namespace

Keyword Keyword::from_phrase(std::string_view display, const StopwordList& stopwords) {
  Keyword kw;
  kw.display = trim(display);
  if (kw.display.empty()) throw Error(ErrorKind::kEmptyName, "keyword is empty");
  for (const Token& t : analyze(kw.display, stopwords)) kw.matcher.push_back(t.stem);
  if (kw.matcher.empty()) {
    throw Error(ErrorKind::kEmptyName, "keyword \"" + kw.display + "\" has no content words");
  }
  if (kw.matcher.size() > kMaxKeywordStems) {
    throw Error(ErrorKind::kPhraseTooLong, "keyword \"" + kw.display + "\" has " +
                                               std::to_string(kw.matcher.size()) + " content words");
  }
  return kw;
}

Keyword Keyword::from_stems(std::string_view joined) {
  Keyword kw;
  kw.display = std::string(joined);
  std::size_t pos = 0;
  while (pos <= joined.size()) {
    std::size_t u = joined.find('_', pos);
    if (u == std::string_view::npos) u = joined.size();
    if (u > pos) kw.matcher.emplace_back(joined.substr(pos, u - pos));
    pos = u + 1;
  }
  if (kw.matcher.empty()) throw Error(ErrorKind::kEmptyName, "keyword is empty");
  if (kw.matcher.size() > kMaxKeywordStems) {
    throw Error(ErrorKind::kPhraseTooLong, "keyword \"" + kw.display + "\"");
  }
  return kw;
}

std::string_view to_string(EditKind kind) {
  switch (kind) {
    case EditKind::kRenameTopic: return "rename_topic";
    case EditKind::kAddKeyword: return "add_keyword";
    case EditKind::kRemoveKeyword: return "remove_keyword";
    case EditKind::kReplaceKeyword: return "replace_keyword";
  }
  return "unknown";
}

EditKind parse_edit_kind(std::string_view name) {
  for (EditKind k : {EditKind::kRenameTopic, EditKind::kAddKeyword, EditKind::kRemoveKeyword,
                     EditKind::kReplaceKeyword}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::kMalformedPayload, "unknown edit kind \"" + std::string(name) + "\"");
}

Codebook apply_edit(const Codebook& codebook, const CodebookEdit& edit,
                    const StopwordList& stopwords) {
  Codebook next = codebook;
  apply_in_place(next, edit, stopwords);
  next.version = codebook.version + 1;
  return next;
}

Codebook apply_edits(const Codebook& codebook, std::span<const CodebookEdit> edits,
                     const StopwordList& stopwords) {
  Codebook next = codebook;
  for (const CodebookEdit& e : edits) apply_in_place(next, e, stopwords);
  next.version = codebook.version + 1;
  return next;
}

std::vector<std::string> validate(const Codebook& cb) {
  std::vector<std::string> out;
  if (cb.version < 1) out.push_back("version must be >= 1");
  if (cb.topics.size() != kNumTopics) {
    out.push_back("topic count " + std::to_string(cb.topics.size()) + " != 5");
  }
  std::set<std::string> names;
  for (std::size_t t = 0; t < cb.topics.size(); ++t) {
    const Topic& topic = cb.topics[t];
    const std::string where = "topic " + std::to_string(t);
    if (topic.name.empty()) out.push_back(where + ": empty name");
    if (!names.insert(topic.name).second) {
      out.push_back(where + ": duplicate topic name \"" + topic.name + "\"");
    }
    std::set<std::string> displays;
    for (const Keyword& k : topic.keywords) {
      if (k.display.empty()) out.push_back(where + ": keyword with empty display");
      if (!displays.insert(k.display).second) {
        out.push_back(where + ": duplicate keyword \"" + k.display + "\"");
      }
      if (k.matcher.empty() || k.matcher.size() > kMaxKeywordStems) {
        out.push_back(where + ": keyword \"" + k.display + "\" has " +
                      std::to_string(k.matcher.size()) + " stems");
      }
      if (!std::all_of(k.matcher.begin(), k.matcher.end(), is_lower_stem)) {
        out.push_back(where + ": keyword \"" + k.display + "\" has an invalid stem");
      }
    }
  }
  return out;
}

std::vector<std::string> matcher_overlaps(const Codebook& cb) {
  std::vector<std::string> out;
  for (const Topic& topic : cb.topics) {
    for (std::size_t i = 0; i < topic.keywords.size(); ++i) {
      for (std::size_t j = i + 1; j < topic.keywords.size(); ++j) {
        if (topic.keywords[i].matcher == topic.keywords[j].matcher) {
          out.push_back("topic \"" + topic.name + "\": \"" + topic.keywords[i].display +
                        "\" and \"" + topic.keywords[j].display + "\" match the same words");
        }
      }
    }
  }
  return out;
}

Codebook make_codebook(std::string discussion_id,
                       std::span<const std::pair<std::string, std::vector<std::string>>> topics,
                       const StopwordList& stopwords) {
  Codebook cb;
  cb.discussion_id = std::move(discussion_id);
  cb.version = 1;
  for (const auto& [name, phrases] : topics) {
    Topic topic;
    topic.name = name;
    for (const std::string& p : phrases) {
      Keyword kw = Keyword::from_phrase(p, stopwords);
      if (find_display(topic, kw.display) == topic.keywords.end()) topic.keywords.push_back(std::move(kw));
    }
    cb.topics.push_back(std::move(topic));
  }
  return cb;
}

}  // namespace ondiscuss
