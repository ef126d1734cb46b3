#pragma once

// Exhaustive enumeration of spanning in-forests (every component a tree
// converging to its root), forest matrices Q_k and weights sigma_k, and the
// forest-based construction of the absorption inverse used as an oracle.
//
// Only small graphs are in reach: the search visits up to
// prod_v (outdeg(v) + 1) partial assignments.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "absorb/errors.hpp"
#include "absorb/graph.hpp"
#include "absorb/numerics.hpp"

namespace absorb {

inline constexpr Eigen::Index kForestCap = 9;

/// A spanning in-forest stored as a successor map: successor[v] is the head
/// of the single arc leaving v, or -1 when v is a root.
struct InForest {
  std::vector<int> successor;
  double weight = 1.0;

  int arc_count() const {
    int k = 0;
    for (const int s : successor) k += s >= 0 ? 1 : 0;
    return k;
  }

  std::vector<int> roots() const {
    std::vector<int> r;
    for (int v = 0; v < static_cast<int>(successor.size()); ++v) {
      if (successor[static_cast<std::size_t>(v)] < 0) r.push_back(v);
    }
    return r;
  }

  /// Arcs as (from, to) pairs, ordered by tail.
  std::vector<std::pair<int, int>> arcs() const {
    std::vector<std::pair<int, int>> a;
    for (int v = 0; v < static_cast<int>(successor.size()); ++v) {
      const int s = successor[static_cast<std::size_t>(v)];
      if (s >= 0) a.emplace_back(v, s);
    }
    return a;
  }

  int root_of(int v) const {
    while (successor[static_cast<std::size_t>(v)] >= 0) v = successor[static_cast<std::size_t>(v)];
    return v;
  }
};

/// Streaming pairwise (cascade) summation: equivalent to summing the input
/// sequence as a balanced binary tree. Bit b of the term count says whether
/// partial_[b] holds the sum of a complete block of 2^b terms.
class PairwiseSum {
 public:
  void add(double x) {
    int level = 0;
    for (std::uint64_t c = count_; c & 1U; c >>= 1U, ++level) x += partial_[level];
    partial_[level] = x;
    ++count_;
  }

  double total() const {
    double s = 0.0;
    int level = 0;
    for (std::uint64_t c = count_; c != 0; c >>= 1U, ++level) {
      if (c & 1U) s += partial_[level];
    }
    return s;
  }

 private:
  std::array<double, 64> partial_;  // only levels flagged in count_ are live
  std::uint64_t count_ = 0;
};

namespace detail {

inline void require_enumerable(Eigen::Index n, Eigen::Index cap) {
  if (n > cap) {
    throw SizeLimit("forest enumeration refused: n = " + std::to_string(n) + " exceeds cap " +
                    std::to_string(cap));
  }
}

// Depth-first over vertices in index order; each vertex becomes a root or
// picks one out-arc. Arc counts outside [min_arcs, max_arcs] are pruned, and
// a choice that closes a cycle is rejected as soon as its last arc is placed.
class ForestWalker {
 public:
  using Visit = std::function<void(const std::vector<int>&, int, double)>;

  ForestWalker(const Matrix& adjacency, int min_arcs, int max_arcs, Visit visit)
      : adjacency_(adjacency),
        n_(static_cast<int>(adjacency.rows())),
        min_arcs_(min_arcs),
        max_arcs_(max_arcs),
        visit_(std::move(visit)),
        successor_(static_cast<std::size_t>(n_), -1) {
    heads_.resize(static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v) {
      for (int t = 0; t < n_; ++t) {
        if (t != v && adjacency_(t, v) > 0.0) heads_[static_cast<std::size_t>(v)].push_back(t);
      }
    }
  }

  void run() { descend(0, 0, 1.0); }

 private:
  bool closes_cycle(int v) const {
    int x = successor_[static_cast<std::size_t>(v)];
    for (int steps = 0; x >= 0 && steps <= n_; ++steps) {
      if (x == v) return true;
      x = successor_[static_cast<std::size_t>(x)];
    }
    return false;
  }

  void descend(int v, int arcs, double weight) {
    if (v == n_) {
      if (arcs >= min_arcs_) visit_(successor_, arcs, weight);
      return;
    }
    const int remaining = n_ - v;
    // Root at v, if the arc budget can still be met.
    if (arcs + remaining - 1 >= min_arcs_) {
      successor_[static_cast<std::size_t>(v)] = -1;
      descend(v + 1, arcs, weight);
    }
    if (arcs + 1 > max_arcs_) return;
    for (const int t : heads_[static_cast<std::size_t>(v)]) {
      successor_[static_cast<std::size_t>(v)] = t;
      if (!closes_cycle(v)) descend(v + 1, arcs + 1, weight * adjacency_(t, v));
    }
    successor_[static_cast<std::size_t>(v)] = -1;
  }

  const Matrix& adjacency_;
  int n_;
  int min_arcs_;
  int max_arcs_;
  Visit visit_;
  std::vector<int> successor_;
  std::vector<std::vector<int>> heads_;
};

}  // namespace detail

/// Every in-forest with exactly k arcs, in lexicographic successor order.
inline std::vector<InForest> enumerate_in_forests(const Matrix& adjacency, int k,
                                                  Eigen::Index cap = kForestCap) {
  const auto n = adjacency.rows();
  detail::require_enumerable(n, cap);
  if (k < 0 || k > n - 1) {
    throw PreconditionError("enumerate_in_forests: k must lie in [0, n-1]");
  }
  std::vector<InForest> out;
  detail::ForestWalker walker(adjacency, k, k,
                              [&out](const std::vector<int>& successor, int, double weight) {
                                out.push_back(InForest{successor, weight});
                              });
  walker.run();
  return out;
}

inline std::vector<InForest> enumerate_in_forests(const AbsorptionGraph& g, int k,
                                                  Eigen::Index cap = kForestCap) {
  return enumerate_in_forests(g.adjacency(), k, cap);
}

/// Q[k](i, j) is the total weight of k-arc in-forests in which j lies in the
/// tree converging to root i; sigma[k] is the total weight of all k-arc
/// in-forests.
struct ForestFamily {
  std::vector<Matrix> Q;
  std::vector<double> sigma;
};

namespace detail {

// Fills levels k >= min_arcs; lower levels stay zero.
inline ForestFamily forest_levels(const Matrix& adjacency, int min_arcs, Eigen::Index cap) {
  const auto n = adjacency.rows();
  require_enumerable(n, cap);
  const auto nn = static_cast<std::size_t>(n);
  std::vector<std::vector<PairwiseSum>> q(nn, std::vector<PairwiseSum>(nn * nn));
  std::vector<PairwiseSum> sigma(nn);
  std::vector<int> root(nn);
  ForestWalker walker(adjacency, min_arcs, static_cast<int>(n) - 1,
                      [&](const std::vector<int>& successor, int arcs, double weight) {
                        for (std::size_t j = 0; j < nn; ++j) {
                          int r = static_cast<int>(j);
                          while (successor[static_cast<std::size_t>(r)] >= 0) {
                            r = successor[static_cast<std::size_t>(r)];
                          }
                          root[j] = r;
                        }
                        auto& level = q[static_cast<std::size_t>(arcs)];
                        for (std::size_t j = 0; j < nn; ++j) {
                          level[static_cast<std::size_t>(root[j]) * nn + j].add(weight);
                        }
                        sigma[static_cast<std::size_t>(arcs)].add(weight);
                      });
  walker.run();

  ForestFamily family;
  family.Q.assign(nn, Matrix::Zero(n, n));
  family.sigma.assign(nn, 0.0);
  for (std::size_t k = 0; k < nn; ++k) {
    for (std::size_t i = 0; i < nn; ++i) {
      for (std::size_t j = 0; j < nn; ++j) {
        family.Q[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            q[k][i * nn + j].total();
      }
    }
    family.sigma[k] = sigma[k].total();
  }
  return family;
}

}  // namespace detail

inline ForestFamily forest_matrices(const Matrix& adjacency, Eigen::Index cap = kForestCap) {
  return detail::forest_levels(adjacency, 0, cap);
}

inline ForestFamily forest_matrices(const AbsorptionGraph& g, Eigen::Index cap = kForestCap) {
  return forest_matrices(g.adjacency(), cap);
}

/// ||(I + tau L)^{-1} - sum_k tau^k Q_k / sigma(tau)||_inf.
inline double parametric_forest_identity_residual(const Matrix& laplacian,
                                                  const ForestFamily& family, double tau) {
  const auto n = laplacian.rows();
  Matrix series = Matrix::Zero(n, n);
  double sigma_tau = 0.0;
  double power = 1.0;
  for (std::size_t k = 0; k < family.Q.size(); ++k) {
    series += power * family.Q[k];
    sigma_tau += power * family.sigma[k];
    power *= tau;
  }
  const Matrix resolvent = invert(Matrix::Identity(n, n) + tau * laplacian);
  return inf_norm(resolvent - series / sigma_tau);
}

inline double parametric_forest_identity_check(const AbsorptionGraph& g, double tau,
                                               Eigen::Index cap = kForestCap) {
  return parametric_forest_identity_residual(laplacian_matrix(g.adjacency()),
                                             forest_matrices(g, cap), tau);
}

/// Weight of spanning trees converging to each vertex, normalized to sum one.
inline Vector rooted_tree_distribution(const Matrix& adjacency, Eigen::Index cap = kForestCap) {
  const auto n = adjacency.rows();
  const auto family = detail::forest_levels(adjacency, static_cast<int>(n) - 1, cap);
  const Matrix& trees = family.Q.back();
  // Every vertex belongs to the single tree, so any column gives the roots.
  return trees.col(0) / family.sigma.back();
}

/// Absorption inverse assembled entrywise from the spanning trees and
/// two-tree forests of the absorption-scaled graph:
///   Ld(i,j) = w(F~_{n-2}^{j->i}) / (d_i s~_{n-1}) - s~_{n-2} (u_i/dbar) / s~_{n-1}.
/// The ratio u_i/dbar is itself read off the spanning trees, since
/// Q~_{n-1} = s~_{n-1} D U, so no linear solve is involved.
inline Matrix absorption_inverse_forest_oracle(const AbsorptionGraph& g,
                                               Eigen::Index cap = kForestCap) {
  const auto n = g.n();
  detail::require_enumerable(n, cap);
  const AbsorptionGraph scaled = absorption_scaled_graph(g);
  const auto family = detail::forest_levels(scaled.adjacency(), static_cast<int>(n) - 2, cap);
  const auto top = static_cast<std::size_t>(n - 1);
  const Matrix& trees = family.Q[top];
  const Matrix& two_trees = family.Q[top - 1];
  const double sigma_trees = family.sigma[top];
  const double sigma_two = family.sigma[top - 1];
  const Vector& d = g.absorption();

  Matrix ld(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u_over_dbar = trees.row(i).mean() / (sigma_trees * d(i));
    for (Eigen::Index j = 0; j < n; ++j) {
      ld(i, j) = two_trees(i, j) / (d(i) * sigma_trees) - sigma_two * u_over_dbar / sigma_trees;
    }
  }
  return ld;
}

/// The forest formula above for one arc pattern and many absorption vectors.
/// Scaling arc v -> t by 1/d_v divides a forest's weight by d_v for every
/// non-root v, i.e. multiplies it by (product of root rates) / prod(d). The
/// prod(d) factor cancels in every ratio of the formula, so forests are
/// enumerated once and summed per root set; each call only reweights those
/// sums by the root rates.
class ForestOracle {
 public:
  explicit ForestOracle(const Matrix& adjacency, Eigen::Index cap = kForestCap)
      : n_(adjacency.rows()) {
    detail::require_enumerable(n_, cap);
    if (n_ < 2) throw PreconditionError("ForestOracle: need at least two vertices");
    const auto nn = static_cast<std::size_t>(n_);
    std::vector<PairwiseSum> trees(nn);
    // Two-tree forests keyed by root pair a < b at index a * n + b.
    std::vector<PairwiseSum> pair_sigma(nn * nn);
    std::vector<PairwiseSum> pair_two(nn * nn * nn * nn);
    std::vector<int> root(nn);
    detail::ForestWalker walker(
        adjacency, static_cast<int>(n_) - 2, static_cast<int>(n_) - 1,
        [&](const std::vector<int>& successor, int arcs, double weight) {
          for (std::size_t j = 0; j < nn; ++j) {
            int r = static_cast<int>(j);
            while (successor[static_cast<std::size_t>(r)] >= 0) r = successor[static_cast<std::size_t>(r)];
            root[j] = r;
          }
          if (arcs == static_cast<int>(n_) - 1) {
            trees[static_cast<std::size_t>(root[0])].add(weight);
            return;
          }
          std::size_t a = nn;
          std::size_t b = nn;
          for (std::size_t j = 0; j < nn; ++j) {
            if (successor[j] >= 0) continue;
            (a == nn ? a : b) = j;
          }
          const std::size_t key = a * nn + b;
          pair_sigma[key].add(weight);
          for (std::size_t j = 0; j < nn; ++j) {
            pair_two[key * nn * nn + static_cast<std::size_t>(root[j]) * nn + j].add(weight);
          }
        });
    walker.run();
    trees_.resize(n_);
    for (std::size_t r = 0; r < nn; ++r) trees_(static_cast<Eigen::Index>(r)) = trees[r].total();
    for (std::size_t a = 0; a < nn; ++a) {
      for (std::size_t b = a + 1; b < nn; ++b) {
        const std::size_t key = a * nn + b;
        RootPair p;
        p.a = static_cast<Eigen::Index>(a);
        p.b = static_cast<Eigen::Index>(b);
        p.sigma = pair_sigma[key].total();
        if (p.sigma == 0.0) continue;
        p.two.resize(n_, n_);
        for (std::size_t i = 0; i < nn; ++i) {
          for (std::size_t j = 0; j < nn; ++j) {
            p.two(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                pair_two[key * nn * nn + i * nn + j].total();
          }
        }
        pairs_.push_back(std::move(p));
      }
    }
  }

  Eigen::Index n() const { return n_; }

  Matrix evaluate(const Vector& d) const {
    if (d.size() != n_) throw PreconditionError("ForestOracle: absorption vector has wrong length");
    if ((d.array() <= 0.0).any()) throw PreconditionError("ForestOracle: rates must be positive");
    // All sums below carry a common factor 1/prod(d), dropped.
    const Vector rooted = trees_.cwiseProduct(d);
    const double st = rooted.sum();
    Matrix two = Matrix::Zero(n_, n_);
    double s2 = 0.0;
    for (const RootPair& p : pairs_) {
      const double scale = d(p.a) * d(p.b);
      two += scale * p.two;
      s2 += scale * p.sigma;
    }
    Matrix ld(n_, n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
      const double u_over_dbar = rooted(i) / (st * d(i));
      for (Eigen::Index j = 0; j < n_; ++j) {
        ld(i, j) = two(i, j) / (d(i) * st) - s2 * u_over_dbar / st;
      }
    }
    return ld;
  }

 private:
  struct RootPair {
    Eigen::Index a = 0;
    Eigen::Index b = 0;
    double sigma = 0.0;
    Matrix two;
  };

  Eigen::Index n_;
  Vector trees_;
  std::vector<RootPair> pairs_;
};

}  // namespace absorb
