#pragma once

// Dense linear-algebra kernels shared by the rest of the library: pivoted LU
// solves with an explicit singularity test, inversion, the Moore-Penrose
// inverse of a corank-one matrix by rank-one bordering, and two power
// iterations (symmetric leading eigenpair, spectral radius).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "absorb/errors.hpp"

namespace absorb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Pivots at or below this fraction of the infinity norm count as zero.
inline constexpr double kPivotTolerance = 1e-13;

inline double inf_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

inline double one_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

inline double max_abs(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

/// ||a - b||_inf / ||b||_inf, falling back to the absolute difference when b
/// vanishes.
inline double relative_difference(const Matrix& a, const Matrix& b) {
  const double scale = inf_norm(b);
  const double diff = inf_norm(a - b);
  return scale > 0.0 ? diff / scale : diff;
}

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

inline Vector ones(Eigen::Index n) { return Vector::Ones(n); }

inline void require_square(const Matrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw PreconditionError(std::string(who) + ": matrix must be square and non-empty");
  }
}

/// Solves A X = B by LU with partial pivoting. Throws SingularMatrix when a
/// pivot magnitude is at or below kPivotTolerance * ||A||_inf.
inline Matrix lu_solve(const Matrix& a, const Matrix& b) {
  require_square(a, "lu_solve");
  if (b.rows() != a.rows()) {
    throw PreconditionError("lu_solve: right-hand side has wrong row count");
  }
  if (!all_finite(a) || !all_finite(b)) {
    throw PreconditionError("lu_solve: non-finite entries");
  }
  const Eigen::PartialPivLU<Matrix> lu(a);
  const double threshold = kPivotTolerance * inf_norm(a);
  const Matrix& packed = lu.matrixLU();
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    if (std::abs(packed(i, i)) <= threshold) {
      throw SingularMatrix("lu_solve: pivot " + std::to_string(i) + " below threshold");
    }
  }
  return lu.solve(b);
}

inline Matrix invert(const Matrix& a) {
  require_square(a, "invert");
  return lu_solve(a, Matrix::Identity(a.rows(), a.cols()));
}

/// Moore-Penrose inverse of a matrix of rank n-1 with right kernel u and left
/// kernel v, computed as
///   (I - uu'/|u|^2) (L + c u v')^{-1} (I - vv'/|v|^2),  c = ||L||_inf/(|u||v|).
/// Requires v'u != 0, which holds for every Laplacian of a strongly
/// connected graph (v = 1, u > 0).
inline Matrix pseudoinverse_rank_deficient_1(const Matrix& l, const Vector& u, const Vector& v) {
  require_square(l, "pseudoinverse_rank_deficient_1");
  const auto n = l.rows();
  if (u.size() != n || v.size() != n) {
    throw PreconditionError("pseudoinverse_rank_deficient_1: kernel vector size mismatch");
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    throw PreconditionError("pseudoinverse_rank_deficient_1: kernel vectors must be nonzero");
  }
  const double c = inf_norm(l) / (nu * nv);
  const Matrix bordered = l + c * u * v.transpose();
  const Matrix identity = Matrix::Identity(n, n);
  const Matrix pu = identity - u * u.transpose() / (nu * nu);
  const Matrix pv = identity - v * v.transpose() / (nv * nv);
  return pu * invert(bordered) * pv;
}

struct EigenPair {
  double value = 0.0;
  Vector vector;
};

namespace detail {

struct PowerRun {
  EigenPair pair;
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
};

inline PowerRun shifted_power_iteration(const Matrix& s, double shift, Vector v, double tol,
                                        int max_iter) {
  PowerRun run;
  v.normalize();
  for (int it = 0; it <= max_iter; ++it) {
    const Vector sv = s * v;
    const double lambda = v.dot(sv);
    const double residual = (sv - lambda * v).norm();
    run.pair = {lambda, v};
    run.residual = residual;
    if (residual <= tol) {
      run.converged = true;
      return run;
    }
    Vector next = sv + shift * v;
    const double norm = next.norm();
    if (norm == 0.0) break;
    v = next / norm;
  }
  return run;
}

inline Vector random_unit_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  if (v.norm() == 0.0) v(0) = 1.0;
  return v.normalized();
}

}  // namespace detail

inline constexpr std::uint64_t kDefaultSeed = 0x5eed5eedULL;

/// Eigenpair of the algebraically largest eigenvalue of a symmetric matrix.
///
/// Power iteration on S + sigma I with sigma = ||S||_inf, which makes the
/// shifted operator positive semidefinite so the wanted eigenvalue is the
/// dominant one. The run from the normalized all-ones vector is paired with
/// one run from a seeded random vector; a start orthogonal to the leading
/// eigenvector converges to a smaller eigenpair, so the larger of the two
/// Rayleigh quotients wins.
inline EigenPair symmetric_leading_eigpair(const Matrix& s, double tol = 1e-10,
                                           int max_iter = 200000,
                                           std::uint64_t seed = kDefaultSeed) {
  require_square(s, "symmetric_leading_eigpair");
  if (!(tol > 0.0)) throw PreconditionError("symmetric_leading_eigpair: tol must be positive");
  const double scale = inf_norm(s);
  if (inf_norm(s - s.transpose()) > 1e-10 * std::max(scale, 1e-300)) {
    throw PreconditionError("symmetric_leading_eigpair: matrix is not symmetric");
  }
  const auto n = s.rows();
  const double shift = scale;
  const auto first = detail::shifted_power_iteration(s, shift, ones(n), tol, max_iter);
  const auto second =
      detail::shifted_power_iteration(s, shift, detail::random_unit_vector(n, seed), tol, max_iter);
  if (!first.converged && !second.converged) {
    throw NoConvergence("symmetric_leading_eigpair: no convergence",
                        std::min(first.residual, second.residual));
  }
  if (!first.converged) return second.pair;
  if (!second.converged) return first.pair;
  return second.pair.value > first.pair.value + tol ? second.pair : first.pair;
}

namespace detail {

// Returns a negative value on stagnation.
inline double radius_power_iteration(const Matrix& m, Vector x, double tol, int max_iter,
                                     bool& hit_zero) {
  hit_zero = false;
  x.normalize();
  double previous = -1.0;
  int stable = 0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector y = m * x;
    const double r = y.norm();
    if (r == 0.0) {
      hit_zero = true;
      return 0.0;
    }
    if (previous >= 0.0 && std::abs(r - previous) <= tol * r) {
      if (++stable >= 3) return r;
    } else {
      stable = 0;
    }
    previous = r;
    x = y / r;
  }
  return -1.0;
}

}  // namespace detail

/// Estimate of max |eigenvalue| by power iteration on M. A run that maps its
/// start vector to zero, or stagnates, is retried once from a seeded random
/// vector. Throws NoConvergence when the dominant part rotates or is
/// defective; callers should then treat the estimate as unavailable.
inline double spectral_radius(const Matrix& m, double tol = 1e-10, int max_iter = 20000,
                              std::uint64_t seed = kDefaultSeed) {
  require_square(m, "spectral_radius");
  if (!(tol > 0.0)) throw PreconditionError("spectral_radius: tol must be positive");
  if (max_abs(m) == 0.0) return 0.0;
  bool hit_zero = false;
  double r = detail::radius_power_iteration(m, ones(m.rows()), tol, max_iter, hit_zero);
  if (r > 0.0) return r;
  r = detail::radius_power_iteration(m, detail::random_unit_vector(m.rows(), seed), tol, max_iter,
                                     hit_zero);
  if (r >= 0.0) return r;
  throw NoConvergence("spectral_radius: power iteration stagnated", std::nan(""));
}

/// True when a Neumann-type series in M is known to converge: either some
/// power M^(2^j), j <= 12, has infinity norm below one, or the
/// power-iteration radius estimate is below one.
/// An unavailable estimate counts as "not known to converge".
inline bool spectral_radius_below_one(const Matrix& m) {
  // rho(M)^k <= ||M^k|| for every k, so one power with norm below one is a
  // certificate that holds for rotating dominant pairs too.
  Matrix power = m;
  for (int squarings = 0; squarings <= 12; ++squarings) {
    const double norm = inf_norm(power);
    if (norm < 1.0) return true;
    if (!(norm < 1e100)) break;
    power = power * power;
  }
  try {
    return spectral_radius(m) < 1.0;
  } catch (const NoConvergence&) {
    return false;
  }
}

}  // namespace absorb
