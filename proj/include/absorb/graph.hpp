#pragma once

// Weighted digraphs with per-vertex absorption, their Laplacians, and the
// version-1 JSON graph file.
//
// Adjacency convention: adjacency(i, j) is the weight of the arc j -> i, so
// column j lists the arcs leaving j. All indices are 0-based; the file format
// uses 1-based vertex ids.

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "absorb/errors.hpp"
#include "absorb/numerics.hpp"

namespace absorb {

/// Relative tolerance used when deciding whether a graph is balanced.
inline constexpr double kBalanceTolerance = 1e-9;

namespace detail {

inline std::vector<bool> reachable_from(const Matrix& adjacency, Eigen::Index start,
                                        bool transpose) {
  const auto n = adjacency.rows();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<Eigen::Index> stack{start};
  seen[static_cast<std::size_t>(start)] = true;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (Eigen::Index t = 0; t < n; ++t) {
      // Forward: arc v -> t is adjacency(t, v). Transposed: arc t -> v.
      const double w = transpose ? adjacency(v, t) : adjacency(t, v);
      if (w > 0.0 && !seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        stack.push_back(t);
      }
    }
  }
  return seen;
}

}  // namespace detail

/// True when every vertex reaches every other along arcs of positive weight.
inline bool is_strongly_connected(const Matrix& adjacency) {
  for (const bool transpose : {false, true}) {
    const auto seen = detail::reachable_from(adjacency, 0, transpose);
    for (const bool s : seen) {
      if (!s) return false;
    }
  }
  return true;
}

/// A strongly connected weighted digraph paired with strictly positive
/// absorption rates. Immutable once built; construction validates.
class AbsorptionGraph {
 public:
  static AbsorptionGraph create(Matrix adjacency, Vector absorption) {
    const auto n = adjacency.rows();
    if (adjacency.cols() != n) throw ValidationError("adjacency matrix must be square");
    if (n < 2) throw ValidationError("graph needs at least two vertices");
    if (absorption.size() != n) {
      throw ValidationError("absorption vector length " + std::to_string(absorption.size()) +
                            " differs from vertex count " + std::to_string(n));
    }
    if (!adjacency.allFinite() || !absorption.allFinite()) {
      throw ValidationError("non-finite weight or absorption rate");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(absorption(i) > 0.0)) {
        throw ValidationError("absorption rate of vertex " + std::to_string(i + 1) +
                              " must be positive");
      }
      if (adjacency(i, i) != 0.0) {
        throw ValidationError("self-loop at vertex " + std::to_string(i + 1));
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        if (adjacency(i, j) < 0.0) throw ValidationError("negative arc weight");
      }
    }
    if (!is_strongly_connected(adjacency)) throw ValidationError("graph is not strongly connected");
    return AbsorptionGraph(std::move(adjacency), std::move(absorption));
  }

  Eigen::Index n() const { return adjacency_.rows(); }
  const Matrix& adjacency() const { return adjacency_; }
  const Vector& absorption() const { return absorption_; }
  /// Weight of the arc from -> to (0 when absent).
  double weight(Eigen::Index from, Eigen::Index to) const { return adjacency_(to, from); }

  /// Same arcs, different absorption rates.
  AbsorptionGraph with_absorption(Vector absorption) const {
    return create(adjacency_, std::move(absorption));
  }

 private:
  AbsorptionGraph(Matrix adjacency, Vector absorption)
      : adjacency_(std::move(adjacency)), absorption_(std::move(absorption)) {}

  Matrix adjacency_;
  Vector absorption_;
};

/// Out-degrees w_i = sum_j a_ji (column sums).
inline Vector outdegrees(const Matrix& adjacency) { return adjacency.colwise().sum().transpose(); }

/// In-degrees (row sums).
inline Vector indegrees(const Matrix& adjacency) { return adjacency.rowwise().sum(); }

/// L = W - A.
inline Matrix laplacian_matrix(const Matrix& adjacency) {
  Matrix l = -adjacency;
  l.diagonal() += outdegrees(adjacency);
  return l;
}

inline bool is_balanced(const AbsorptionGraph& g, double tol = kBalanceTolerance) {
  if (!(tol > 0.0)) throw PreconditionError("is_balanced: tol must be positive");
  const Vector in = indegrees(g.adjacency());
  const Vector out = outdegrees(g.adjacency());
  for (Eigen::Index i = 0; i < g.n(); ++i) {
    if (std::abs(in(i) - out(i)) > tol * std::max(1.0, out(i))) return false;
  }
  return true;
}

/// Positive kernel vector of a strongly connected Laplacian, normalized to
/// sum one. Deletes the last row and column, solves the reduced nonsingular
/// system against the negated last column, and appends 1 before normalizing.
inline Vector stationary_basis(const Matrix& l) {
  require_square(l, "stationary_basis");
  const auto n = l.rows();
  Vector u(n);
  if (n == 1) {
    u(0) = 1.0;
    return u;
  }
  const auto m = n - 1;
  Vector x;
  try {
    x = lu_solve(l.topLeftCorner(m, m), -l.topRightCorner(m, 1));
  } catch (const SingularMatrix& e) {
    throw NumericalError(std::string("stationary_basis: reduced Laplacian is singular: ") +
                         e.what());
  }
  u.head(m) = x;
  u(m) = 1.0;
  u /= u.sum();
  if ((u.array() <= 0.0).any()) {
    throw NumericalError("stationary_basis: kernel vector is not strictly positive");
  }
  return u;
}

/// The Laplacian of a graph with absorption plus the quantities every
/// generalized-inverse construction reuses.
struct LaplacianBundle {
  AbsorptionGraph graph;
  Matrix L;
  Vector w;
  Vector u;
  double dbar = 0.0;
  /// u 1' / dbar.
  Matrix U;
  bool balanced = false;

  Eigen::Index n() const { return L.rows(); }
  const Vector& d() const { return graph.absorption(); }
  Matrix D() const { return d().asDiagonal(); }
};

inline LaplacianBundle laplacian(const AbsorptionGraph& g) {
  Matrix l = laplacian_matrix(g.adjacency());
  Vector w = outdegrees(g.adjacency());
  Vector u = stationary_basis(l);
  const double dbar = g.absorption().dot(u);
  Matrix big_u = u * Vector::Ones(g.n()).transpose() / dbar;
  const bool balanced = is_balanced(g);
  return LaplacianBundle{g, std::move(l), std::move(w), std::move(u), dbar, std::move(big_u),
                         balanced};
}

/// Arc weights divided by the absorption rate of their tail vertex
/// (A D^{-1}). The returned absorption vector is an all-ones placeholder.
inline AbsorptionGraph absorption_scaled_graph(const AbsorptionGraph& g) {
  Matrix scaled = g.adjacency() * g.absorption().cwiseInverse().asDiagonal();
  return AbsorptionGraph::create(std::move(scaled), Vector::Ones(g.n()));
}

// ---------------------------------------------------------------------------
// Graph file v1:
//   {"n": 3, "edges": [[from, to, weight], ...], "absorption": [d1, ..., dn]}
// Vertex ids are 1-based; [from, to, w] sets adjacency(to-1, from-1) = w.

inline AbsorptionGraph graph_from_json(const nlohmann::json& doc) {
  using nlohmann::json;
  if (!doc.is_object()) throw ParseError("graph file: top level must be an object");
  for (const auto& item : doc.items()) {
    const auto& key = item.key();
    if (key != "n" && key != "edges" && key != "absorption") {
      throw ParseError("graph file: unknown key \"" + key + "\"");
    }
  }
  for (const char* key : {"n", "edges", "absorption"}) {
    if (!doc.contains(key)) throw ParseError(std::string("graph file: missing key \"") + key + "\"");
  }
  const auto& jn = doc.at("n");
  if (!jn.is_number_integer()) throw ParseError("graph file: \"n\" must be an integer");
  const auto n64 = jn.get<std::int64_t>();
  if (n64 < 2) throw ValidationError("graph file: \"n\" must be at least 2");
  if (n64 > 100000) throw ValidationError("graph file: \"n\" is unreasonably large");
  const auto n = static_cast<Eigen::Index>(n64);

  const auto& edges = doc.at("edges");
  if (!edges.is_array()) throw ParseError("graph file: \"edges\" must be an array");
  Matrix adjacency = Matrix::Zero(n, n);
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
        !e[1].is_number_integer() || !e[2].is_number()) {
      throw ParseError("graph file: each edge must be [from, to, weight] with integer endpoints");
    }
    const auto from = e[0].get<std::int64_t>();
    const auto to = e[1].get<std::int64_t>();
    const auto w = e[2].get<double>();
    if (from < 1 || from > n64 || to < 1 || to > n64) {
      throw ValidationError("graph file: edge endpoint out of range 1.." + std::to_string(n64));
    }
    if (from == to) throw ValidationError("graph file: self-loop at vertex " + std::to_string(from));
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("graph file: negative or non-finite weight on edge " +
                            std::to_string(from) + "->" + std::to_string(to));
    }
    if (w == 0.0) {
      throw ValidationError("graph file: zero-weight edge " + std::to_string(from) + "->" +
                            std::to_string(to) + " (omit absent arcs)");
    }
    if (!seen.emplace(from, to).second) {
      throw ValidationError("graph file: duplicate arc " + std::to_string(from) + "->" +
                            std::to_string(to));
    }
    adjacency(to - 1, from - 1) = w;
  }

  const auto& jd = doc.at("absorption");
  if (!jd.is_array()) throw ParseError("graph file: \"absorption\" must be an array");
  Vector d(static_cast<Eigen::Index>(jd.size()));
  for (std::size_t i = 0; i < jd.size(); ++i) {
    if (!jd[i].is_number()) throw ParseError("graph file: absorption entries must be numbers");
    d(static_cast<Eigen::Index>(i)) = jd[i].get<double>();
  }
  if (d.size() != n) {
    throw ValidationError("graph file: absorption has " + std::to_string(d.size()) +
                          " entries, expected " + std::to_string(n));
  }
  return AbsorptionGraph::create(std::move(adjacency), std::move(d));
}

inline AbsorptionGraph load_graph(std::istream& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("graph file: ") + e.what());
  }
  return graph_from_json(doc);
}

inline AbsorptionGraph load_graph_string(const std::string& text) {
  std::istringstream in(text);
  return load_graph(in);
}

inline AbsorptionGraph load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open graph file " + path);
  return load_graph(in);
}

inline nlohmann::json graph_to_json(const AbsorptionGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (Eigen::Index from = 0; from < g.n(); ++from) {
    for (Eigen::Index to = 0; to < g.n(); ++to) {
      const double w = g.weight(from, to);
      if (w != 0.0) edges.push_back({from + 1, to + 1, w});
    }
  }
  nlohmann::json absorption = nlohmann::json::array();
  for (Eigen::Index i = 0; i < g.n(); ++i) absorption.push_back(g.absorption()(i));
  return {{"n", g.n()}, {"edges", std::move(edges)}, {"absorption", std::move(absorption)}};
}

}  // namespace absorb
