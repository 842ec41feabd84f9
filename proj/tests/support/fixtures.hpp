#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ondiscuss/codebook.hpp"
#include "ondiscuss/coder.hpp"
#include "ondiscuss/post.hpp"

namespace fixtures {

using namespace ondiscuss;

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(ONDISCUSS_FIXTURE_DIR) / name;
}

inline Post make_post(std::string id, std::string author, std::string text,
                      std::optional<std::string> parent = std::nullopt, int minute = 0,
                      std::string discussion = "d1") {
  Post p;
  p.post_id = std::move(id);
  p.discussion_id = std::move(discussion);
  p.course_id = "c1";
  p.author_id = std::move(author);
  p.parent_post_id = std::move(parent);
  p.created_at = Timestamp(std::chrono::seconds(1'700'000'000 + 60 * minute));
  p.raw_text = std::move(text);
  return p;
}

/// Topic-model codebook from a software testing course; keywords are stored stems.
inline Codebook generated_codebook() {
  const std::vector<std::vector<std::string>> terms = {
      {"devic", "interfac", "child", "applic", "potenti", "post", "input_paramet", "parent", "behavior", "run"},
      {"write", "want", "team", "choic", "custom", "field", "look", "product", "interfac", "array"},
      {"boundari", "import", "select", "api", "handl", "rest_api", "rest", "encapsul", "sure", "partit_test"},
      {"partit_method", "categori_partit", "leak", "determin", "memori_leak", "languag", "applic", "system",
       "databas", "partit_test"},
      {"subclass", "tester", "abstract", "output", "group", "model", "oop", "overlap", "detect_memori",
       "disjoint"}};
  Codebook cb;
  cb.discussion_id = "generated";
  for (std::size_t t = 0; t < terms.size(); ++t) {
    Topic topic{std::to_string(t), {}};
    for (const auto& term : terms[t]) topic.keywords.push_back(Keyword::from_stems(term));
    cb.topics.push_back(std::move(topic));
  }
  return cb;
}

/// The same course's codebook after instructor editing.
inline Codebook testing_course_codebook() {
  const std::vector<std::pair<std::string, std::vector<std::string>>> topics = {
      {"Observability",
       {"observability", "visible", "get", "state", "visibility", "observable", "getter", "access", "field",
        "accessor"}},
      {"Controllability", {"configure", "object", "control", "modify", "state", "mutate", "mutator", "update"}},
      {"inheritance",
       {"inheritance", "child class", "parent class", "overriding", "depth", "subclass", "superclass",
        "sub class", "super class", "inherit", "interface", "abstract class"}},
      {"testing",
       {"black box", "black-box", "white-box", "white box", "automate", "automation", "industry", "difficult",
        "easy"}},
      {"object oriented programming",
       {"public", "private", "protected", "package", "simple", "complex", "abstraction", "specialization", "data",
        "encapsulation", "method", "field"}}};
  return make_codebook("testing-course", topics);
}

/// A learning-science course codebook. It lists four topics, so a fifth empty
/// topic fills the slot the tool always has. "fall" and "desire difficulty",
/// which the instructor later removed, are added to the first topic. One
/// phrase has four content words and cannot be stored; it is left out.
inline Codebook learning_course_codebook() {
  const std::vector<std::pair<std::string, std::vector<std::string>>> topics = {
      {"effortful learning",
       {"desire", "plf", "resonate", "parachute", "land", "jump", "commun", "parachute land", "land fall",
        "difficult", "difficulties", "mistakes", "failure", "effortful learning", "desirable difficulty",
        "desirable", "effortful", "fall", "desire difficulty"}},
      {"beyond learning styles",
       {"dylexia", "learn style", "individual", "learn differ", "disable", "intelligent", "prefer", "support",
        "dyslex", "focus", "instructional style", "learning styles"}},
      {"illusion of mastery",
       {"confidence", "feedback", "calibration", "confidence memory", "accuracy", "peer", "answer", "event",
        "state", "calibration learn", "illusion of mastery", "illusions of mastery", "misunderstanding",
        "illusion of knowing", "illusions of knowing", "illusion of learning", "illusions of learning",
        "re read", "cram"}},
      {"retrieval practice spaced out practice interleaving",
       {"mass", "mass practice", "interleaving practice", "space retrieval", "tend", "day", "long term", "week",
        "myth", "practice space", "retrieval practice", "retrieval process", "testing effect", "test effect",
        "recall knowledge", "retrieval", "actively retrieving", "periodically testing", "retrieval activity",
        "retrieval activities", "low stakes", "effective retrieval must be repeated", "flash cards", "quizzing",
        "practice and retrieval", "quiz over time", "continually retrieve the information",
        "frequently quizzing", "retrieval practice activity", "retrieval practice activities",
        "testing efforts", "active retrieval", "practice", "short quiz", "active recall",
        "process of retrieval", "practice sessions", "self testing", "recall the information", "RPA", "RPAs",
        "spacing out", "spacing out practice", "spaced practice", "spacing practice", "spaced out practice",
        "spaced out", "spaced retrieval", "space retrieval", "space practice", "retrieval spaced",
        "retrieve spaced", "spaced application", "spaced knowledge", "space knowledge", "spaced retrieval",
        "retrieval practice is spaced", "interleaving", "interleaved practice", "interleave", "interleaved"}},
      {"4", {}}};
  return make_codebook("learning-course", topics);
}

/// Random coded utterances: up to max_students students, up to max_posts
/// posts, each code present with probability p.
inline std::vector<CodedUtterance> random_utterances(std::mt19937_64& rng, std::size_t max_students = 10,
                                                     std::size_t max_posts = 20, double p = 0.4) {
  std::uniform_int_distribution<std::size_t> students(1, max_students);
  std::uniform_int_distribution<std::size_t> posts(0, max_posts);
  std::bernoulli_distribution code(p);
  std::bernoulli_distribution initial(0.5);
  const std::size_t s = students(rng);
  const std::size_t n = posts(rng);
  std::vector<CodedUtterance> out;
  for (std::size_t i = 0; i < n; ++i) {
    CodedUtterance u;
    u.post_id = "p" + std::to_string(i);
    u.student_id = "s" + std::to_string(std::uniform_int_distribution<std::size_t>(0, s - 1)(rng));
    u.is_initial = initial(rng);
    u.codebook_version = 1;
    for (bool& c : u.codes) c = code(rng);
    out.push_back(std::move(u));
  }
  return out;
}

/// Filler words that survive stopword removal but match no fixture keyword.
inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "students", "notice", "chapter", "because", "example", "think", "reading", "strategy", "class",
      "homework", "brain", "idea", "professor", "semester", "exam", "notes", "study", "habit", "grade",
      "lecture", "friend", "hour", "concept", "question", "really", "helpful", "often", "during", "personal",
      "experience", "important", "understand", "believe", "author", "explains", "material", "research",
      "future", "approach", "method", "topic", "group", "project", "skill", "result", "tried", "noticed",
      "change", "better", "improve"};
  return words;
}

/// Discussion text at a given size: `posts` posts averaging `words_per_post`
/// words, mixing filler with phrases from the codebook so that codes fire and
/// co-occur. A third of the posts are initial.
inline std::vector<Post> synthetic_discussion(std::size_t posts, std::size_t words_per_post,
                                              const Codebook& codebook, std::uint64_t seed,
                                              std::size_t students = 90) {
  std::mt19937_64 rng(seed);
  const auto& filler = filler_words();
  std::vector<std::string> phrases;
  std::vector<std::size_t> phrase_topic;
  for (std::size_t t = 0; t < codebook.topics.size(); ++t) {
    for (const Keyword& k : codebook.topics[t].keywords) {
      phrases.push_back(k.display);
      phrase_topic.push_back(t);
    }
  }
  std::uniform_int_distribution<std::size_t> pick_filler(0, filler.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_phrase(0, phrases.empty() ? 0 : phrases.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_student(0, students - 1);
  std::uniform_int_distribution<std::size_t> length(words_per_post / 2, words_per_post + words_per_post / 2);
  std::bernoulli_distribution keyword(0.04);

  std::vector<Post> out;
  out.reserve(posts);
  for (std::size_t i = 0; i < posts; ++i) {
    std::string text;
    const std::size_t n = length(rng);
    for (std::size_t w = 0; w < n; ++w) {
      if (!text.empty()) text += (w % 17 == 0) ? ". " : " ";
      if (!phrases.empty() && keyword(rng)) {
        text += phrases[pick_phrase(rng)];
      } else {
        text += filler[pick_filler(rng)];
      }
    }
    std::optional<std::string> parent;
    if (i % 3 != 0) parent = "p" + std::to_string(i - i % 3);
    out.push_back(make_post("p" + std::to_string(i), "s" + std::to_string(pick_student(rng)), text, parent,
                            static_cast<int>(i), "scale"));
  }
  return out;
}

/// 500 documents of 50 tokens; each document draws from one of five disjoint
/// 10-word vocabularies. Returns the documents and the planted sets.
struct PlantedCorpus {
  std::vector<std::vector<std::string>> docs;
  std::vector<std::vector<std::string>> topics;
};

inline PlantedCorpus planted_corpus(std::uint64_t seed, std::size_t num_docs = 500, std::size_t doc_len = 50) {
  PlantedCorpus c;
  for (std::size_t t = 0; t < 5; ++t) {
    std::vector<std::string> words;
    for (std::size_t w = 0; w < 10; ++w) words.push_back(std::string("plant") + static_cast<char>('a' + t) + static_cast<char>('a' + w));
    c.topics.push_back(std::move(words));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> topic(0, 4);
  std::uniform_int_distribution<std::size_t> word(0, 9);
  for (std::size_t d = 0; d < num_docs; ++d) {
    const std::size_t t = topic(rng);
    std::vector<std::string> doc;
    for (std::size_t i = 0; i < doc_len; ++i) doc.push_back(c.topics[t][word(rng)]);
    c.docs.push_back(std::move(doc));
  }
  return c;
}

/// Greedy alignment of fitted topics to planted sets by top-10 overlap; returns
/// the overlap count of each planted topic.
inline std::vector<std::size_t> aligned_overlaps(const Codebook& codebook,
                                                 const std::vector<std::vector<std::string>>& planted) {
  const std::size_t k = planted.size();
  std::vector<std::vector<std::size_t>> overlap(codebook.topics.size(), std::vector<std::size_t>(k, 0));
  for (std::size_t a = 0; a < codebook.topics.size(); ++a) {
    for (const Keyword& kw : codebook.topics[a].keywords) {
      for (std::size_t b = 0; b < k; ++b) {
        if (std::find(planted[b].begin(), planted[b].end(), kw.display) != planted[b].end()) ++overlap[a][b];
      }
    }
  }
  std::vector<bool> used_a(codebook.topics.size(), false), used_b(k, false);
  std::vector<std::size_t> result(k, 0);
  for (std::size_t round = 0; round < k; ++round) {
    std::size_t best = 0, ba = 0, bb = 0;
    bool found = false;
    for (std::size_t a = 0; a < codebook.topics.size(); ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        if (used_a[a] || used_b[b]) continue;
        if (!found || overlap[a][b] > best) {
          best = overlap[a][b];
          ba = a;
          bb = b;
          found = true;
        }
      }
    }
    if (!found) break;
    used_a[ba] = used_b[bb] = true;
    result[bb] = best;
  }
  return result;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("ondiscuss-" + tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
