#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ondiscuss/codebook.hpp"
#include "ondiscuss/coder.hpp"
#include "ondiscuss/post.hpp"
#include "ondiscuss/text.hpp"

namespace ondiscuss {

inline constexpr std::size_t kNumEdges = kNumTopics * (kNumTopics - 1) / 2;

/// Weights over unordered code pairs in the order
/// (0,1),(0,2),(0,3),(0,4),(1,2),(1,3),(1,4),(2,3),(2,4),(3,4).
using ConnectionVector = std::array<double, kNumEdges>;
using Point2 = std::array<double, 2>;

std::size_t edge_index(std::size_t i, std::size_t j);
std::pair<std::size_t, std::size_t> edge_codes(std::size_t edge);

enum class Scope { kAll, kInitialOnly };
std::string_view to_string(Scope scope);
std::optional<Scope> parse_scope(std::string_view text);

struct UnitCounts {
  std::string student_id;
  ConnectionVector counts{};
};

/// Posts and their preprocessed documents, aligned by index.
struct Corpus {
  std::string discussion_id;
  std::vector<Post> posts;
  std::vector<TokenizedDoc> docs;

  static Corpus prepare(std::string discussion_id, std::vector<Post> posts,
                        const PipelineOptions& options = {});
};

/// Per-student co-occurrence counts. Every pair of codes present in the same
/// post adds one, once per post. Students appear in id order, including those
/// whose posts are all filtered out by the scope.
std::vector<UnitCounts> accumulate(std::span<const CodedUtterance> utterances, Scope scope);

ConnectionVector sphere_normalize(const ConnectionVector& v);

struct Projection {
  std::vector<Point2> points;
  std::array<std::array<double, 2>, kNumEdges> basis{};  // basis[edge][dim]
  std::array<double, 2> variance_explained{};
  std::array<bool, 2> dimension_defined{};
};

/// Centers the rows and projects them on the two leading right singular
/// vectors. Each basis column is signed so its largest-magnitude entry is
/// positive. Dimensions without variance are zero-filled and flagged.
Projection project(std::span<const ConnectionVector> normalized);

struct NodePlacement {
  std::array<Point2, kNumTopics> code_positions{};
  std::vector<Point2> centroids;
  std::array<std::optional<double>, 2> fit;  // Pearson r per dimension
};

/// Share of unit u's connection weight touching code k, halved so the shares
/// sum to one: centroid_u = sum_k influence[k] * position_k.
std::array<double, kNumTopics> code_influence(const ConnectionVector& weights);

/// Least-squares code positions, minimum-norm per dimension, so that each
/// unit's centroid approximates its point. Units with zero weights are ignored
/// and get a (0,0) centroid. Throws kNoNonzeroUnits when none remain.
NodePlacement place_nodes(std::span<const ConnectionVector> normalized,
                          std::span<const Point2> points);

/// Sum over nonzero units of |centroid - point|^2 for the given positions.
double placement_objective(std::span<const ConnectionVector> normalized,
                           std::span<const Point2> points,
                           const std::array<Point2, kNumTopics>& positions);

struct UnitResult {
  std::string student_id;
  ConnectionVector raw_counts{};
  ConnectionVector normalized{};
  Point2 point{};
  Point2 centroid{};
};

struct EnaModel {
  std::string discussion_id;
  std::int64_t codebook_version = 0;
  Scope scope = Scope::kAll;
  std::array<Point2, kNumTopics> code_positions{};
  std::vector<UnitResult> units;
  ConnectionVector group_mean{};
  std::array<std::array<double, 2>, kNumEdges> basis{};
  std::array<double, 2> variance_explained{};
  std::array<bool, 2> dimension_defined{};
  std::array<std::optional<double>, 2> fit;
  std::vector<std::string> notes;  // degenerate-case flags
  std::vector<CodedUtterance> coded;  // every post, regardless of scope

  const UnitResult* find_unit(std::string_view student_id) const;
};

EnaModel build_model(std::span<const CodedUtterance> utterances, const Codebook& codebook,
                     Scope scope);
EnaModel build_model(const Corpus& corpus, const Codebook& codebook, Scope scope);

struct StudentPost {
  Post post;
  CodedUtterance coded;
};

struct IndividualNetwork {
  UnitResult unit;
  std::vector<StudentPost> posts;  // in scope, by timestamp
};

/// Throws kUnknownStudent.
IndividualNetwork individual_network(const EnaModel& model, const Corpus& corpus,
                                     std::string_view student_id);

}  // namespace ondiscuss
