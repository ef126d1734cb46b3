#pragma once

// Closed-form absorption inverses for four uniform-weight motifs: the
// complete graph, the star (hub = last vertex), the undirected path, and the
// directed cycle 1 -> 2 -> ... -> n -> 1. Each has a generator producing the
// corresponding AbsorptionGraph so the formulas can be checked against the
// general construction.

#include <algorithm>
#include <string>
#include <string_view>

#include "absorb/errors.hpp"
#include "absorb/graph.hpp"
#include "absorb/numerics.hpp"

namespace absorb {

enum class MotifKind { Complete, Star, Path, Dicycle };

inline std::string_view motif_name(MotifKind k) {
  switch (k) {
    case MotifKind::Complete: return "complete";
    case MotifKind::Star: return "star";
    case MotifKind::Path: return "path";
    case MotifKind::Dicycle: return "dicycle";
  }
  return "unknown";
}

inline MotifKind parse_motif(std::string_view name) {
  for (const MotifKind k : {MotifKind::Complete, MotifKind::Star, MotifKind::Path,
                            MotifKind::Dicycle}) {
    if (motif_name(k) == name) return k;
  }
  throw PreconditionError("unknown motif kind \"" + std::string(name) + "\"");
}

struct MotifSpec {
  MotifKind kind = MotifKind::Path;
  Eigen::Index n = 2;
  double a = 1.0;
  Vector d;
};

inline void validate_motif(const MotifSpec& s) {
  const Eigen::Index min_n =
      (s.kind == MotifKind::Star || s.kind == MotifKind::Dicycle) ? 3 : 2;
  if (s.n < min_n) {
    throw ValidationError(std::string(motif_name(s.kind)) + " motif needs n >= " +
                          std::to_string(min_n));
  }
  if (!(s.a > 0.0)) throw ValidationError("motif edge weight must be positive");
  if (s.d.size() != s.n) throw ValidationError("motif absorption vector has wrong length");
  if ((s.d.array() <= 0.0).any()) throw ValidationError("motif absorption rates must be positive");
}

inline AbsorptionGraph motif_graph(const MotifSpec& s) {
  validate_motif(s);
  const auto n = s.n;
  Matrix a = Matrix::Zero(n, n);
  switch (s.kind) {
    case MotifKind::Complete:
      a.setConstant(s.a);
      a.diagonal().setZero();
      break;
    case MotifKind::Star:
      for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, n - 1) = a(n - 1, i) = s.a;
      break;
    case MotifKind::Path:
      for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = s.a;
      break;
    case MotifKind::Dicycle:
      for (Eigen::Index i = 0; i < n; ++i) a((i + 1) % n, i) = s.a;
      break;
  }
  return AbsorptionGraph::create(std::move(a), s.d);
}

/// (1/(an)) (I - 1d'/d'1)(I - d1'/d'1).
inline Matrix complete_ld(const MotifSpec& s) {
  validate_motif(s);
  const auto n = s.n;
  const double total = s.d.sum();
  const double squares = s.d.squaredNorm();
  Matrix ld(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      ld(i, j) = (i == j ? 1.0 : 0.0) - (s.d(i) + s.d(j)) / total + squares / (total * total);
    }
  }
  return ld / (s.a * static_cast<double>(n));
}

/// Star with the hub as the last vertex. With S the sum of all rates and
/// Q the sum of squared leaf rates, a S^2 Ld(i,j) is
///   Q + S^2 - 2 S d_i   (i = j leaf)
///   Q - S (d_i + d_j)   (distinct leaves)
///   Q - S d_leaf        (one hub index, one leaf index)
///   Q                   (hub, hub)
inline Matrix star_ld(const MotifSpec& s) {
  validate_motif(s);
  const auto n = s.n;
  const auto hub = n - 1;
  const double total = s.d.sum();
  const double leaf_squares = s.d.head(n - 1).squaredNorm();
  Matrix ld(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const bool i_hub = i == hub;
      const bool j_hub = j == hub;
      double v = leaf_squares;
      if (i_hub && !j_hub) {
        v -= total * s.d(j);
      } else if (j_hub && !i_hub) {
        v -= total * s.d(i);
      } else if (!i_hub && i == j) {
        v += total * total - 2.0 * total * s.d(i);
      } else if (!i_hub) {
        v -= total * (s.d(i) + s.d(j));
      }
      ld(i, j) = v;
    }
  }
  return ld / (s.a * total * total);
}

/// Undirected path 1 - 2 - ... - n. In 1-based indices, a Ld(i,j) is
///   n - max(i,j) - c(i) - c(j) + sum_{l<n} P_l^2 / S^2
/// with P_l = d_1 + ... + d_l, S = P_n and
///   c(i) = ((n-i) P_i + sum_{k>i} (n-k) d_k) / S.
inline Matrix path_ld(const MotifSpec& s) {
  validate_motif(s);
  const auto n = s.n;
  const double total = s.d.sum();
  Vector prefix(n);  // prefix(l-1) = P_l
  double run = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) prefix(l) = run += s.d(l);
  double squares = 0.0;
  for (Eigen::Index l = 0; l + 1 < n; ++l) squares += prefix(l) * prefix(l);
  const double nn = static_cast<double>(n);
  Vector c(n);
  for (Eigen::Index i = 1; i <= n; ++i) {
    double tail = 0.0;
    for (Eigen::Index k = i + 1; k <= n; ++k) tail += (nn - static_cast<double>(k)) * s.d(k - 1);
    c(i - 1) = ((nn - static_cast<double>(i)) * prefix(i - 1) + tail) / total;
  }
  Matrix ld(n, n);
  for (Eigen::Index i = 1; i <= n; ++i) {
    for (Eigen::Index j = 1; j <= n; ++j) {
      ld(i - 1, j - 1) = nn - static_cast<double>(std::max(i, j)) - c(i - 1) - c(j - 1) +
                         squares / (total * total);
    }
  }
  return ld / s.a;
}

/// Directed cycle 1 -> 2 -> ... -> n -> 1, with S = d'1:
///   Ld(i,j) = 1/(a S^2) sum_{l=1}^{n-1} sum_{k=1}^{l} (S [i=l] - d_l)(S [j=k] - d_k).
inline Matrix dicycle_ld(const MotifSpec& s) {
  validate_motif(s);
  const auto n = s.n;
  const double total = s.d.sum();
  Matrix ld = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double sum = 0.0;
      for (Eigen::Index l = 0; l + 1 < n; ++l) {
        const double left = (i == l ? total : 0.0) - s.d(l);
        for (Eigen::Index k = 0; k <= l; ++k) {
          sum += left * ((j == k ? total : 0.0) - s.d(k));
        }
      }
      ld(i, j) = sum;
    }
  }
  return ld / (s.a * total * total);
}

inline Matrix motif_ld(const MotifSpec& s) {
  switch (s.kind) {
    case MotifKind::Complete: return complete_ld(s);
    case MotifKind::Star: return star_ld(s);
    case MotifKind::Path: return path_ld(s);
    case MotifKind::Dicycle: return dicycle_ld(s);
  }
  throw PreconditionError("motif_ld: unknown kind");
}

}  // namespace absorb
