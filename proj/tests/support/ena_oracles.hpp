#pragma once

// Reference computations written directly from the definitions, kept separate
// from the engine so tests compare two independent routes.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ondiscuss/ena.hpp"

namespace oracles {

using namespace ondiscuss;

/// Double loop over posts and code pairs.
inline std::map<std::string, ConnectionVector> brute_force_counts(std::span<const CodedUtterance> utterances,
                                                                  Scope scope) {
  std::map<std::string, ConnectionVector> out;
  for (const CodedUtterance& u : utterances) {
    auto& v = out[u.student_id];
    if (scope == Scope::kInitialOnly && !u.is_initial) continue;
    std::size_t e = 0;
    for (std::size_t i = 0; i < kNumTopics; ++i) {
      for (std::size_t j = i + 1; j < kNumTopics; ++j, ++e) {
        if (u.codes[i] && u.codes[j]) v[e] += 1;
      }
    }
  }
  return out;
}

struct TwoRow {
  std::array<double, 2> points{};
  ConnectionVector direction{};
};

/// With two rows the centered matrix is rank one: its right singular vector is
/// (a - b) / |a - b| and the rows sit at +-|a - b| / 2 along it.
inline TwoRow two_row_projection(const ConnectionVector& a, const ConnectionVector& b) {
  TwoRow out;
  double norm = 0;
  for (std::size_t e = 0; e < kNumEdges; ++e) norm += (a[e] - b[e]) * (a[e] - b[e]);
  norm = std::sqrt(norm);
  std::size_t arg = 0;
  for (std::size_t e = 0; e < kNumEdges; ++e) {
    out.direction[e] = (a[e] - b[e]) / norm;
    if (std::abs(out.direction[e]) > std::abs(out.direction[arg])) arg = e;
  }
  const double sign = out.direction[arg] > 0 ? 1.0 : -1.0;
  for (double& x : out.direction) x *= sign;
  out.points = {sign * norm / 2, -sign * norm / 2};
  return out;
}

/// Largest deviation of the basis Gram matrix from the identity.
inline double orthonormality_error(const std::array<std::array<double, 2>, kNumEdges>& basis) {
  double worst = 0;
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      double dot = 0;
      for (std::size_t e = 0; e < kNumEdges; ++e) dot += basis[e][a] * basis[e][b];
      worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

inline ConnectionVector column_mean(std::span<const ConnectionVector> rows) {
  ConnectionVector m{};
  for (const auto& r : rows) {
    for (std::size_t e = 0; e < kNumEdges; ++e) m[e] += r[e];
  }
  for (double& x : m) x /= static_cast<double>(rows.size());
  return m;
}

inline double total_variance(std::span<const ConnectionVector> rows) {
  const ConnectionVector m = column_mean(rows);
  double s = 0;
  for (const auto& r : rows) {
    for (std::size_t e = 0; e < kNumEdges; ++e) s += (r[e] - m[e]) * (r[e] - m[e]);
  }
  return s;
}

inline double variance_along(std::span<const ConnectionVector> rows, ConnectionVector dir) {
  double norm = 0;
  for (double x : dir) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : dir) x /= norm;
  const ConnectionVector m = column_mean(rows);
  double s = 0;
  for (const auto& r : rows) {
    double p = 0;
    for (std::size_t e = 0; e < kNumEdges; ++e) p += (r[e] - m[e]) * dir[e];
    s += p * p;
  }
  return s;
}

/// Sum of squared distances between each unit's centroid and its point. A
/// centroid is the weighted mean of edge midpoints.
inline double objective(std::span<const ConnectionVector> rows, std::span<const Point2> points,
                        const std::array<Point2, kNumTopics>& positions) {
  double total = 0;
  for (std::size_t u = 0; u < rows.size(); ++u) {
    double weight = 0;
    Point2 c{0, 0};
    std::size_t e = 0;
    for (std::size_t i = 0; i < kNumTopics; ++i) {
      for (std::size_t j = i + 1; j < kNumTopics; ++j, ++e) {
        const double w = rows[u][e];
        weight += w;
        c[0] += w * (positions[i][0] + positions[j][0]) / 2;
        c[1] += w * (positions[i][1] + positions[j][1]) / 2;
      }
    }
    if (weight == 0) continue;
    const double dx = c[0] / weight - points[u][0];
    const double dy = c[1] / weight - points[u][1];
    total += dx * dx + dy * dy;
  }
  return total;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracles
