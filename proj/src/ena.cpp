#include "ondiscuss/ena.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "ondiscuss/error.hpp"

namespace ondiscuss {
namespace {

// Singular values below this are treated as zero. Rows are unit vectors, so
// anything this small is rounding noise from centering.
constexpr double kRankTolerance = 1e-10;

bool is_zero(const ConnectionVector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (n < 3) return std::nullopt;
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= kRankTolerance * kRankTolerance || sbb <= kRankTolerance * kRankTolerance) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

std::size_t edge_index(std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  // Edges before row i: sum_{r<i} (K-1-r).
  return i * (2 * kNumTopics - i - 1) / 2 + (j - i - 1);
}

std::pair<std::size_t, std::size_t> edge_codes(std::size_t edge) {
  for (std::size_t i = 0; i < kNumTopics; ++i) {
    for (std::size_t j = i + 1; j < kNumTopics; ++j) {
      if (edge_index(i, j) == edge) return {i, j};
    }
  }
  return {0, 0};
}

std::string_view to_string(Scope scope) {
  return scope == Scope::kAll ? "all" : "initial_only";
}

std::optional<Scope> parse_scope(std::string_view text) {
  if (text == "all") return Scope::kAll;
  if (text == "initial_only") return Scope::kInitialOnly;
  return std::nullopt;
}

Corpus Corpus::prepare(std::string discussion_id, std::vector<Post> posts,
                       const PipelineOptions& options) {
  Corpus c;
  c.discussion_id = std::move(discussion_id);
  c.docs = preprocess_corpus(posts, options);
  c.posts = std::move(posts);
  return c;
}

std::vector<UnitCounts> accumulate(std::span<const CodedUtterance> utterances, Scope scope) {
  if (!utterances.empty()) {
    const std::int64_t v = utterances.front().codebook_version;
    for (const CodedUtterance& u : utterances) {
      if (u.codebook_version != v) {
        throw Error(ErrorKind::kMixedCodebookVersions,
                    "versions " + std::to_string(v) + " and " + std::to_string(u.codebook_version));
      }
    }
  }
  std::map<std::string, ConnectionVector> by_student;
  for (const CodedUtterance& u : utterances) {
    ConnectionVector& acc = by_student[u.student_id];
    if (scope == Scope::kInitialOnly && !u.is_initial) continue;
    for (std::size_t i = 0; i < kNumTopics; ++i) {
      if (!u.codes[i]) continue;
      for (std::size_t j = i + 1; j < kNumTopics; ++j) {
        if (u.codes[j]) acc[edge_index(i, j)] += 1.0;
      }
    }
  }
  std::vector<UnitCounts> out;
  out.reserve(by_student.size());
  for (auto& [id, counts] : by_student) out.push_back({id, counts});
  return out;
}

ConnectionVector sphere_normalize(const ConnectionVector& v) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  ConnectionVector out{};
  if (ss <= 0.0) return out;
  const double norm = std::sqrt(ss);
  for (std::size_t i = 0; i < kNumEdges; ++i) out[i] = v[i] / norm;
  return out;
}

Projection project(std::span<const ConnectionVector> normalized) {
  Projection out;
  const auto n = static_cast<Eigen::Index>(normalized.size());
  const auto m = static_cast<Eigen::Index>(kNumEdges);
  out.points.assign(normalized.size(), Point2{0.0, 0.0});

  Eigen::MatrixXd x(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) x(r, c) = normalized[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  if (n > 0) x.rowwise() -= x.colwise().mean();

  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(m);
  if (n > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeFullV);
    v = svd.matrixV();
    sigma.head(svd.singularValues().size()) = svd.singularValues();
  }

  double total = 0.0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) > kRankTolerance) total += sigma(k) * sigma(k);
  }
  for (int dim = 0; dim < 2; ++dim) {
    Eigen::VectorXd col = v.col(dim);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < m; ++i) {
      if (std::abs(col(i)) > std::abs(col(arg))) arg = i;
    }
    if (col(arg) < 0) col = -col;
    for (Eigen::Index i = 0; i < m; ++i) out.basis[static_cast<std::size_t>(i)][dim] = col(i);

    out.dimension_defined[dim] = sigma(dim) > kRankTolerance;
    out.variance_explained[dim] = out.dimension_defined[dim] ? sigma(dim) * sigma(dim) / total : 0.0;
    if (!out.dimension_defined[dim]) continue;
    const Eigen::VectorXd proj = x * col;
    for (Eigen::Index r = 0; r < n; ++r) out.points[static_cast<std::size_t>(r)][dim] = proj(r);
  }
  return out;
}

std::array<double, kNumTopics> code_influence(const ConnectionVector& w) {
  std::array<double, kNumTopics> c{};
  double total = 0.0;
  for (double x : w) total += x;
  if (total <= 0.0) return c;
  for (std::size_t e = 0; e < kNumEdges; ++e) {
    const auto [i, j] = edge_codes(e);
    c[i] += w[e];
    c[j] += w[e];
  }
  for (double& x : c) x /= 2.0 * total;
  return c;
}

NodePlacement place_nodes(std::span<const ConnectionVector> normalized,
                          std::span<const Point2> points) {
  std::vector<std::size_t> active;
  for (std::size_t u = 0; u < normalized.size(); ++u) {
    if (!is_zero(normalized[u])) active.push_back(u);
  }
  if (active.empty()) throw Error(ErrorKind::kNoNonzeroUnits, "no unit has any connection");

  const auto n = static_cast<Eigen::Index>(active.size());
  const auto k = static_cast<Eigen::Index>(kNumTopics);
  Eigen::MatrixXd influence(n, k);
  Eigen::MatrixXd target(n, 2);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::size_t u = active[static_cast<std::size_t>(r)];
    const auto c = code_influence(normalized[u]);
    for (Eigen::Index j = 0; j < k; ++j) influence(r, j) = c[static_cast<std::size_t>(j)];
    target(r, 0) = points[u][0];
    target(r, 1) = points[u][1];
  }

  // JacobiSVD::solve returns the minimum-norm least-squares solution.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(influence, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankTolerance);
  const Eigen::MatrixXd positions = svd.solve(target);
  const Eigen::MatrixXd centroids = influence * positions;

  NodePlacement out;
  for (Eigen::Index j = 0; j < k; ++j) {
    out.code_positions[static_cast<std::size_t>(j)] = {positions(j, 0), positions(j, 1)};
  }
  out.centroids.assign(normalized.size(), Point2{0.0, 0.0});
  std::array<std::vector<double>, 2> cent, pts;
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::size_t u = active[static_cast<std::size_t>(r)];
    out.centroids[u] = {centroids(r, 0), centroids(r, 1)};
    for (int d = 0; d < 2; ++d) {
      cent[d].push_back(centroids(r, d));
      pts[d].push_back(points[u][d]);
    }
  }
  for (int d = 0; d < 2; ++d) out.fit[d] = pearson(cent[d], pts[d]);
  return out;
}

double placement_objective(std::span<const ConnectionVector> normalized,
                           std::span<const Point2> points,
                           const std::array<Point2, kNumTopics>& positions) {
  double sum = 0.0;
  for (std::size_t u = 0; u < normalized.size(); ++u) {
    if (is_zero(normalized[u])) continue;
    const auto c = code_influence(normalized[u]);
    for (int d = 0; d < 2; ++d) {
      double centroid = 0.0;
      for (std::size_t j = 0; j < kNumTopics; ++j) centroid += c[j] * positions[j][d];
      const double r = centroid - points[u][d];
      sum += r * r;
    }
  }
  return sum;
}

const UnitResult* EnaModel::find_unit(std::string_view student_id) const {
  auto it = std::lower_bound(units.begin(), units.end(), student_id,
                             [](const UnitResult& u, std::string_view id) { return u.student_id < id; });
  return (it != units.end() && it->student_id == student_id) ? &*it : nullptr;
}

EnaModel build_model(std::span<const CodedUtterance> utterances, const Codebook& codebook,
                     Scope scope) {
  EnaModel model;
  model.discussion_id = codebook.discussion_id;
  model.codebook_version = codebook.version;
  model.scope = scope;
  model.coded.assign(utterances.begin(), utterances.end());

  const std::vector<UnitCounts> counts = accumulate(utterances, scope);
  std::vector<ConnectionVector> nonzero;
  std::vector<std::size_t> nonzero_index;
  model.units.reserve(counts.size());
  for (const UnitCounts& c : counts) {
    UnitResult u;
    u.student_id = c.student_id;
    u.raw_counts = c.counts;
    u.normalized = sphere_normalize(c.counts);
    if (!is_zero(u.normalized)) {
      nonzero_index.push_back(model.units.size());
      nonzero.push_back(u.normalized);
    }
    for (std::size_t e = 0; e < kNumEdges; ++e) model.group_mean[e] += u.normalized[e];
    model.units.push_back(std::move(u));
  }
  if (!model.units.empty()) {
    for (double& w : model.group_mean) w /= static_cast<double>(model.units.size());
  }

  const Projection proj = project(nonzero);
  model.basis = proj.basis;
  model.variance_explained = proj.variance_explained;
  model.dimension_defined = proj.dimension_defined;
  for (std::size_t r = 0; r < nonzero.size(); ++r) model.units[nonzero_index[r]].point = proj.points[r];

  if (model.units.empty()) model.notes.push_back("no posts");
  if (nonzero.empty()) {
    model.notes.push_back("no co-occurring codes in scope");
  } else {
    std::vector<Point2> points;
    points.reserve(nonzero.size());
    for (std::size_t idx : nonzero_index) points.push_back(model.units[idx].point);
    const NodePlacement placement = place_nodes(nonzero, points);
    model.code_positions = placement.code_positions;
    model.fit = placement.fit;
    for (std::size_t r = 0; r < nonzero.size(); ++r) {
      model.units[nonzero_index[r]].centroid = placement.centroids[r];
    }
  }
  if (!model.dimension_defined[0] || !model.dimension_defined[1]) {
    model.notes.push_back("projection has fewer than two dimensions with variance");
  }
  if (nonzero.size() < 3) model.notes.push_back("fit not applicable: fewer than 3 units with connections");
  return model;
}

EnaModel build_model(const Corpus& corpus, const Codebook& codebook, Scope scope) {
  EnaModel model = build_model(code_corpus(corpus.docs, corpus.posts, codebook), codebook, scope);
  if (model.discussion_id.empty()) model.discussion_id = corpus.discussion_id;
  return model;
}

IndividualNetwork individual_network(const EnaModel& model, const Corpus& corpus,
                                     std::string_view student_id) {
  const UnitResult* unit = model.find_unit(student_id);
  if (!unit) throw Error(ErrorKind::kUnknownStudent, std::string(student_id));
  IndividualNetwork out;
  out.unit = *unit;

  std::unordered_map<std::string_view, const Post*> posts;
  for (const Post& p : corpus.posts) posts.emplace(p.post_id, &p);
  for (const CodedUtterance& u : model.coded) {
    if (u.student_id != student_id) continue;
    if (model.scope == Scope::kInitialOnly && !u.is_initial) continue;
    auto it = posts.find(u.post_id);
    if (it == posts.end()) continue;
    out.posts.push_back({*it->second, u});
  }
  std::stable_sort(out.posts.begin(), out.posts.end(), [](const StudentPost& a, const StudentPost& b) {
    if (a.post.created_at != b.post.created_at) return a.post.created_at < b.post.created_at;
    return a.post.post_id < b.post.post_id;
  });
  return out;
}

}  // namespace ondiscuss
