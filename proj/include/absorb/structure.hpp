#pragma once

// Structural analyses built on the absorption inverse: a directed distance,
// a PageRank-style centrality, a first-order quasi-stationary distribution,
// sign-based spectral bipartition, and the C_Y pairwise metric family.
//
// Distance and centrality are only defined for balanced graphs; both refuse
// unbalanced input with NotBalanced.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "absorb/errors.hpp"
#include "absorb/graph.hpp"
#include "absorb/inverses.hpp"
#include "absorb/numerics.hpp"

namespace absorb {

inline constexpr double kMetricSlack = 1e-9;
inline constexpr double kPartitionTolerance = 1e-10;

/// R(j, i) is the distance from j to i: K - Ld(i, j) off the diagonal, where
/// K is the largest diagonal entry of Ld. Stored with rows as sources.
struct DistanceMatrix {
  Matrix R;
  double K = 0.0;
};

inline DistanceMatrix distance_matrix(const Matrix& ld, bool balanced) {
  if (!balanced) throw NotBalanced("distance_matrix: graph is not balanced");
  DistanceMatrix out;
  out.K = ld.diagonal().maxCoeff();
  const auto n = ld.rows();
  out.R.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) out.R(j, i) = i == j ? 0.0 : out.K - ld(i, j);
  }
  return out;
}

struct MetricViolation {
  enum class Kind { Diagonal, Negative, NotPositive, Triangle, FourPoint };
  Kind kind;
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  Eigen::Index k = 0;
  double amount = 0.0;
};

inline std::string violation_kind_name(MetricViolation::Kind kind) {
  switch (kind) {
    case MetricViolation::Kind::Diagonal: return "diagonal";
    case MetricViolation::Kind::Negative: return "negative";
    case MetricViolation::Kind::NotPositive: return "not-positive";
    case MetricViolation::Kind::Triangle: return "triangle";
    case MetricViolation::Kind::FourPoint: return "four-point";
  }
  return "unknown";
}

/// Exhaustive directed-metric check: zero diagonal, nonnegativity, strict
/// positivity off the diagonal, and R(j,k) <= R(j,i) + R(i,k) over every
/// triple.
inline std::vector<MetricViolation> verify_directed_metric(const DistanceMatrix& dm,
                                                           double slack = kMetricSlack) {
  using Kind = MetricViolation::Kind;
  std::vector<MetricViolation> out;
  const Matrix& r = dm.R;
  const auto n = r.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) {
        if (r(j, i) != 0.0) out.push_back({Kind::Diagonal, i, j, 0, r(j, i)});
      } else if (r(j, i) < 0.0) {
        out.push_back({Kind::Negative, i, j, 0, r(j, i)});
      } else if (r(j, i) == 0.0) {
        out.push_back({Kind::NotPositive, i, j, 0, 0.0});
      }
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < n; ++k) {
        const double excess = r(j, i) + r(i, k) - r(j, k);
        if (excess < -slack) out.push_back({Kind::Triangle, i, j, k, excess});
      }
    }
  }
  return out;
}

/// Adds the four-point inequality Ld(i,i) - Ld(i,j) - Ld(k,i) + Ld(k,j) >= 0,
/// which underlies the triangle inequality on balanced graphs.
inline std::vector<MetricViolation> verify_directed_metric(const DistanceMatrix& dm,
                                                           const Matrix& ld,
                                                           double slack = kMetricSlack) {
  auto out = verify_directed_metric(dm, slack);
  const auto n = ld.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        const double value = ld(i, i) - ld(i, j) - ld(k, i) + ld(k, j);
        if (value < -slack) out.push_back({MetricViolation::Kind::FourPoint, i, j, k, value});
      }
    }
  }
  return out;
}

/// C_Y(i, j) = Y_ii + Y_jj - Y_ij - Y_ji.
inline Matrix c_metric(const Matrix& y) {
  require_square(y, "c_metric");
  const auto n = y.rows();
  Matrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      c(i, j) = i == j ? 0.0 : y(i, i) + y(j, j) - y(i, j) - y(j, i);
    }
  }
  return c;
}

struct CentralityVector {
  Vector scores;
  /// Vertices by descending score; ties keep ascending index order.
  std::vector<Eigen::Index> ranking;
};

inline std::vector<Eigen::Index> rank_descending(const Vector& scores) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&scores](Eigen::Index a, Eigen::Index b) { return scores(a) > scores(b); });
  return order;
}

/// Row sums of Ld.
inline CentralityVector pagerank(const Matrix& ld, bool balanced) {
  if (!balanced) throw NotBalanced("pagerank: graph is not balanced");
  CentralityVector c;
  c.scores = ld.rowwise().sum();
  c.ranking = rank_descending(c.scores);
  return c;
}

struct QuasiStationary {
  Vector p;
  /// Some entry is <= 0: absorption too strong for the first-order regime.
  bool nonpositive = false;
};

/// First-order perturbation of the stationary distribution u under weak
/// absorption: normalize((I + (dbar / alpha) Ld) u) with alpha = ||L||_1.
inline QuasiStationary quasi_stationary(const LaplacianBundle& b, const Matrix& ld) {
  const double alpha = one_norm(b.L);
  QuasiStationary q;
  q.p = b.u + (b.dbar / alpha) * (ld * b.u);
  q.p /= q.p.sum();
  q.nonpositive = (q.p.array() <= 0.0).any();
  return q;
}

struct Partition {
  /// 1 or 2 per vertex.
  std::vector<int> membership;
  EigenPair eig;
  /// One of the groups is empty.
  bool degenerate = false;

  std::vector<Eigen::Index> group(int label) const {
    std::vector<Eigen::Index> g;
    for (std::size_t i = 0; i < membership.size(); ++i) {
      if (membership[i] == label) g.push_back(static_cast<Eigen::Index>(i));
    }
    return g;
  }
};

/// Same split, ignoring which side is called group 1.
inline bool same_partition(const Partition& a, const Partition& b) {
  if (a.membership.size() != b.membership.size()) return false;
  const bool direct = a.membership == b.membership;
  bool swapped = true;
  for (std::size_t i = 0; i < a.membership.size(); ++i) {
    if (a.membership[i] == b.membership[i]) {
      swapped = false;
      break;
    }
  }
  return direct || swapped;
}

/// Splits vertices by the sign of the leading eigenvector of Ld + Ld'. The
/// eigenvector is oriented so its first nonzero entry is positive; entries
/// >= 0 go to group 1.
inline Partition partition(const Matrix& ld, double tol = kPartitionTolerance,
                           std::uint64_t seed = kDefaultSeed) {
  require_square(ld, "partition");
  if (ld.rows() < 2) throw PreconditionError("partition: need at least two vertices");
  Partition p;
  p.eig = symmetric_leading_eigpair(ld + ld.transpose(), tol, 200000, seed);
  Vector& s = p.eig.vector;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) != 0.0) {
      if (s(i) < 0.0) s = -s;
      break;
    }
  }
  p.membership.resize(static_cast<std::size_t>(s.size()));
  int first = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    p.membership[static_cast<std::size_t>(i)] = s(i) >= 0.0 ? 1 : 2;
    first += s(i) >= 0.0 ? 1 : 0;
  }
  p.degenerate = first == 0 || first == s.size();
  return p;
}

struct SweepPoint {
  double value = 0.0;
  Partition partition;
};

inline Partition partition_with_rate(const AbsorptionGraph& g, Eigen::Index vertex, double value) {
  Vector d = g.absorption();
  d(vertex) = value;
  return partition(absorption_inverse(laplacian(g.with_absorption(d))).Ld);
}

/// Recomputes the bipartition with d(vertex) replaced by each value in turn.
inline std::vector<SweepPoint> partition_sweep(const AbsorptionGraph& g, Eigen::Index vertex,
                                               const std::vector<double>& values) {
  if (vertex < 0 || vertex >= g.n()) throw PreconditionError("partition_sweep: vertex out of range");
  std::vector<SweepPoint> out;
  out.reserve(values.size());
  for (const double v : values) {
    if (!(v > 0.0)) throw PreconditionError("partition_sweep: values must be positive");
    out.push_back({v, partition_with_rate(g, vertex, v)});
  }
  return out;
}

/// Evenly spaced values lo, lo + step, ... up to hi (inclusive within a
/// hair of rounding).
inline std::vector<double> sweep_values(double lo, double hi, double step) {
  if (!(step > 0.0)) throw PreconditionError("sweep_values: step must be positive");
  if (hi < lo) throw PreconditionError("sweep_values: max below min");
  const auto count = static_cast<std::size_t>((hi - lo) / step + 1e-9) + 1;
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = lo + static_cast<double>(i) * step;
  return values;
}

/// Locations where the partition changes between consecutive sweep points,
/// each refined by bisection to within refine_tol.
inline std::vector<double> partition_thresholds(const AbsorptionGraph& g, Eigen::Index vertex,
                                                const std::vector<SweepPoint>& sweep,
                                                double refine_tol = 1e-3) {
  std::vector<double> out;
  for (std::size_t s = 1; s < sweep.size(); ++s) {
    if (same_partition(sweep[s - 1].partition, sweep[s].partition)) continue;
    double lo = sweep[s - 1].value;
    double hi = sweep[s].value;
    const Partition& left = sweep[s - 1].partition;
    while (hi - lo > refine_tol) {
      const double mid = 0.5 * (lo + hi);
      if (same_partition(partition_with_rate(g, vertex, mid), left)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

}  // namespace absorb
