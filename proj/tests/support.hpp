#pragma once

// Random graph generators and independent oracles shared by the test suites.
// Oracles here avoid the library's own kernels: they lean on Eigen's SVD and
// eigen-solvers, subset enumeration, or closed forms.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "absorb.hpp"

namespace testing_support {

using absorb::AbsorptionGraph;
using absorb::Matrix;
using absorb::Vector;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Entries uniform in [-1, 1].
inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform(rng, -1.0, 1.0);
  }
  return m;
}

inline Matrix random_symmetric_matrix(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix m = random_matrix(rng, n, n);
  return m + m.transpose();
}

inline Vector random_rates(std::mt19937_64& rng, Eigen::Index n, double lo = 0.1, double hi = 5.0) {
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = uniform(rng, lo, hi);
  return d;
}

/// A random Hamiltonian cycle (guaranteeing strong connectivity) plus each
/// remaining arc with probability `density`.
inline Matrix random_strong_adjacency(std::mt19937_64& rng, Eigen::Index n, double density = 0.3) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  Matrix a = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto from = order[k];
    const auto to = order[(k + 1) % order.size()];
    a(to, from) = uniform(rng, 0.2, 3.0);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && a(i, j) == 0.0 && uniform(rng, 0.0, 1.0) < density) {
        a(i, j) = uniform(rng, 0.2, 3.0);
      }
    }
  }
  return a;
}

/// Sum of weighted directed cycles; every vertex has equal in- and out-weight.
inline Matrix random_balanced_adjacency(std::mt19937_64& rng, Eigen::Index n, int extra_cycles = 3) {
  Matrix a = Matrix::Zero(n, n);
  const auto add_cycle = [&](std::vector<Eigen::Index> cyc) {
    const double w = uniform(rng, 0.2, 3.0);
    for (std::size_t k = 0; k < cyc.size(); ++k) a(cyc[(k + 1) % cyc.size()], cyc[k]) += w;
  };
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  std::shuffle(all.begin(), all.end(), rng);
  add_cycle(all);
  for (int c = 0; c < extra_cycles; ++c) {
    std::shuffle(all.begin(), all.end(), rng);
    const auto len = std::uniform_int_distribution<Eigen::Index>(2, n)(rng);
    add_cycle(std::vector<Eigen::Index>(all.begin(), all.begin() + len));
  }
  return a;
}

inline Matrix random_symmetric_adjacency(std::mt19937_64& rng, Eigen::Index n, double density = 0.4) {
  Matrix a = random_strong_adjacency(rng, n, density);
  return a + a.transpose();
}

inline AbsorptionGraph random_graph(std::mt19937_64& rng, Eigen::Index n) {
  return AbsorptionGraph::create(random_strong_adjacency(rng, n), random_rates(rng, n));
}

inline AbsorptionGraph random_balanced_graph(std::mt19937_64& rng, Eigen::Index n) {
  return AbsorptionGraph::create(random_balanced_adjacency(rng, n), random_rates(rng, n));
}

/// max |eigenvalue| from Eigen's general eigensolver.
inline double eigen_spectral_radius(const Matrix& m) {
  return Eigen::EigenSolver<Matrix>(m).eigenvalues().cwiseAbs().maxCoeff();
}

/// Moore-Penrose inverse through Eigen's complete orthogonal decomposition.
inline Matrix svd_pinv(const Matrix& l) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(l);
  cod.setThreshold(1e-10);
  return cod.pseudoInverse();
}

/// Kernel vector of a corank-one matrix from the full-pivot LU, normalized to
/// sum one.
inline Vector lu_kernel(const Matrix& l) {
  Eigen::FullPivLU<Matrix> lu(l);
  lu.setThreshold(1e-10);
  Vector k = lu.kernel().col(0);
  return k / k.sum();
}

/// Sum of all k x k principal minors (k = 0 gives 1).
inline double principal_minor_sum(const Matrix& l, int k) {
  const int n = static_cast<int>(l.rows());
  if (k == 0) return 1.0;
  double total = 0.0;
  std::vector<int> pick(static_cast<std::size_t>(k));
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    Matrix sub(k, k);
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) sub(r, c) = l(pick[static_cast<std::size_t>(r)], pick[static_cast<std::size_t>(c)]);
    }
    total += sub.determinant();
    int pos = k - 1;
    while (pos >= 0 && pick[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++pick[static_cast<std::size_t>(pos)];
    for (int q = pos + 1; q < k; ++q) pick[static_cast<std::size_t>(q)] = pick[static_cast<std::size_t>(q - 1)] + 1;
  }
  return total;
}

/// Largest eigenvalue of a symmetric 3x3 matrix from its characteristic
/// polynomial (trigonometric solution of the depressed cubic).
inline double cubic_largest_eigenvalue(const Matrix& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = a.trace() / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (p == 0.0) return q;
  const Matrix b = (a - q * Matrix::Identity(3, 3)) / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  return q + 2.0 * p * std::cos(std::acos(r) / 3.0);
}

/// Acyclicity of a successor map by Kahn's algorithm on the reversed arcs.
inline bool acyclic_by_topological_sort(const std::vector<int>& successor) {
  const std::size_t n = successor.size();
  std::vector<int> indegree(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (successor[v] >= 0) ++indegree[static_cast<std::size_t>(successor[v])];
  }
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  std::size_t removed = 0;
  while (!ready.empty()) {
    const auto v = ready.back();
    ready.pop_back();
    ++removed;
    if (successor[v] >= 0 && --indegree[static_cast<std::size_t>(successor[v])] == 0) {
      ready.push_back(static_cast<std::size_t>(successor[v]));
    }
  }
  return removed == n;
}

/// Every strongly connected digraph on n vertices with arc weights drawn
/// from `weights` (absent arcs included as an option), as adjacency matrices.
inline std::vector<Matrix> all_strong_digraphs(int n, const std::vector<double>& weights) {
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) slots.emplace_back(i, j);
    }
  }
  const std::size_t base = weights.size() + 1;
  std::size_t total = 1;
  for (std::size_t s = 0; s < slots.size(); ++s) total *= base;
  std::vector<Matrix> out;
  for (std::size_t code = 0; code < total; ++code) {
    Matrix a = Matrix::Zero(n, n);
    std::size_t c = code;
    for (const auto& [i, j] : slots) {
      const std::size_t digit = c % base;
      c /= base;
      if (digit > 0) a(i, j) = weights[digit - 1];
    }
    if (absorb::is_strongly_connected(a)) out.push_back(std::move(a));
  }
  return out;
}

inline Matrix path_adjacency(Eigen::Index n, double w = 1.0) {
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = w;
  return a;
}

inline Matrix star_adjacency(Eigen::Index n, double w = 1.0) {
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, n - 1) = a(n - 1, i) = w;
  return a;
}

/// Undirected cycle 1 - 2 - ... - n - 1.
inline Matrix cycle_adjacency(Eigen::Index n, double w = 1.0) {
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) a(i, (i + 1) % n) = a((i + 1) % n, i) = w;
  return a;
}

/// Two 3x3 grids (vertices 1-9 and 11-19, column-major) joined through
/// vertex 10, which is adjacent to 8 and 12.
inline Matrix bridge_adjacency() {
  Matrix a = Matrix::Zero(19, 19);
  const auto link = [&a](int x, int y) { a(x - 1, y - 1) = a(y - 1, x - 1) = 1.0; };
  for (const int offset : {0, 10}) {
    for (int c = 0; c < 3; ++c) {
      for (int r = 0; r < 3; ++r) {
        const int v = offset + 3 * c + r + 1;
        if (r < 2) link(v, v + 1);
        if (c < 2) link(v, v + 3);
      }
    }
  }
  link(8, 10);
  link(10, 12);
  return a;
}

}  // namespace testing_support
