#pragma once

// The absorption inverse Ld of a graph Laplacian and its companions: the
// bottleneck matrix, the group inverse, the Moore-Penrose inverse, and the
// fundamental matrices of the regular and absorbing random walks.
//
// Ld is the unique matrix X with X L y = y on {x : Dx in range L} and
// X D u = 0. Given any {1}-inverse Y of L it equals (I - UD) Y (I - DU), and
// it also equals (L + z DUD)^{-1} - U/z for every z > 0. Both facts give
// construction routes; all of them must agree.

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absorb/errors.hpp"
#include "absorb/forests.hpp"
#include "absorb/graph.hpp"
#include "absorb/numerics.hpp"

namespace absorb {

/// Construction tolerance for defining identities.
inline constexpr double kConstructionTolerance = 1e-9;
/// Pairwise agreement between construction routes.
inline constexpr double kRouteAgreementTolerance = 1e-8;
/// Disagreement that aborts a cross-checked construction.
inline constexpr double kRouteDisagreementLimit = 1e-6;

enum class Route { Bottleneck, Group, Pinv, RankOne, ForestOracle };

inline std::string_view route_name(Route r) {
  switch (r) {
    case Route::Bottleneck: return "bottleneck";
    case Route::Group: return "group";
    case Route::Pinv: return "pinv";
    case Route::RankOne: return "rank-one";
    case Route::ForestOracle: return "forest";
  }
  return "unknown";
}

inline Route parse_route(std::string_view name) {
  for (const Route r :
       {Route::Bottleneck, Route::Group, Route::Pinv, Route::RankOne, Route::ForestOracle}) {
    if (route_name(r) == name) return r;
  }
  throw PreconditionError("unknown inverse route \"" + std::string(name) + "\"");
}

struct BottleneckMatrix {
  /// Inverse of L with its last row and column deleted.
  Matrix Mhat;
  /// Mhat in the leading block, zeros in the last row and column.
  Matrix padded;
};

struct InverseSet {
  Matrix Ld;
  std::optional<Matrix> group;
  std::optional<Matrix> pinv;
  std::optional<Matrix> Z;
  std::optional<Matrix> M;
  Route route = Route::Bottleneck;
};

inline BottleneckMatrix bottleneck_matrix(const LaplacianBundle& b) {
  const auto m = b.n() - 1;
  BottleneckMatrix out;
  out.Mhat = invert(b.L.topLeftCorner(m, m));
  out.padded = Matrix::Zero(b.n(), b.n());
  out.padded.topLeftCorner(m, m) = out.Mhat;
  return out;
}

/// L# = (I - u1') M (I - u1') with M the padded bottleneck matrix.
inline Matrix group_inverse(const LaplacianBundle& b) {
  const auto n = b.n();
  const Matrix p = Matrix::Identity(n, n) - b.u * ones(n).transpose();
  return p * bottleneck_matrix(b).padded * p;
}

/// L# = (L + tau J)^{-1} - J / tau with J = u1' the eigenprojection at 0.
inline Matrix group_inverse_eigenprojection(const LaplacianBundle& b, double tau = 1.0) {
  if (tau == 0.0) throw PreconditionError("group_inverse_eigenprojection: tau must be nonzero");
  const Matrix j = b.u * ones(b.n()).transpose();
  return invert(b.L + tau * j) - j / tau;
}

/// Moore-Penrose inverse of the Laplacian (right kernel u, left kernel 1).
inline Matrix laplacian_pseudoinverse(const LaplacianBundle& b) {
  return pseudoinverse_rank_deficient_1(b.L, b.u, ones(b.n()));
}

/// Stationary distribution of the jump chain P = A W^{-1}: pi = W u / (w'u).
inline Vector jump_chain_stationary(const LaplacianBundle& b) {
  return b.w.cwiseProduct(b.u) / b.w.dot(b.u);
}

/// Z = (L + pi w')^{-1}, the fundamental matrix of the regular process.
inline Matrix fundamental_matrix_regular(const LaplacianBundle& b) {
  return invert(b.L + jump_chain_stationary(b) * b.w.transpose());
}

/// (I - UD) Y (I - DU) with U = u1'/d'u, for a {1}-inverse Y of the
/// Laplacian whose kernel is spanned by u. UD = u d'/dbar and
/// DU = (d.u) 1'/dbar are rank one, so both factors apply as rank-one updates.
inline Matrix conjugate_one_inverse(const Vector& u, const Vector& d, const Matrix& y) {
  const auto n = u.size();
  if (d.size() != n || y.rows() != n || y.cols() != n) {
    throw PreconditionError("conjugate_one_inverse: dimension mismatch");
  }
  const double dbar = d.dot(u);
  Matrix x = y - u * ((d.transpose() * y) / dbar);
  const Vector du = d.cwiseProduct(u);
  x -= ((x * du) / dbar) * Vector::Ones(n).transpose();
  return x;
}

inline Matrix conjugate_one_inverse(const LaplacianBundle& b, const Matrix& y) {
  return conjugate_one_inverse(b.u, b.d(), y);
}

/// (L + z DUD)^{-1} - U / z.
inline Matrix absorption_inverse_rank_one(const LaplacianBundle& b, double z = 1.0) {
  if (!(z > 0.0)) throw PreconditionError("absorption_inverse_rank_one: z must be positive");
  const Matrix dud = b.d().asDiagonal() * b.U * b.d().asDiagonal();
  return invert(b.L + z * dud) - b.U / z;
}

namespace detail {

inline Matrix absorption_inverse_by(const LaplacianBundle& b, Route route, InverseSet& set) {
  switch (route) {
    case Route::Bottleneck:
      set.M = bottleneck_matrix(b).padded;
      return conjugate_one_inverse(b, *set.M);
    case Route::Group:
      set.group = group_inverse(b);
      return conjugate_one_inverse(b, *set.group);
    case Route::Pinv:
      set.pinv = laplacian_pseudoinverse(b);
      return conjugate_one_inverse(b, *set.pinv);
    case Route::RankOne:
      return absorption_inverse_rank_one(b, 1.0);
    case Route::ForestOracle:
      return absorption_inverse_forest_oracle(b.graph);
  }
  throw PreconditionError("absorption_inverse: unknown route");
}

}  // namespace detail

struct AbsorptionInverseOptions {
  Route route = Route::Bottleneck;
  /// Fill group, pinv, Z and M alongside Ld.
  bool companions = false;
  /// Rebuild Ld through every matrix route and throw RouteDisagreement when
  /// any two differ by more than kRouteDisagreementLimit (relative).
  bool cross_check = false;
};

inline InverseSet absorption_inverse(const LaplacianBundle& b,
                                     const AbsorptionInverseOptions& options = {}) {
  InverseSet set;
  set.route = options.route;
  set.Ld = detail::absorption_inverse_by(b, options.route, set);
  if (options.companions) {
    if (!set.M) set.M = bottleneck_matrix(b).padded;
    if (!set.group) set.group = group_inverse(b);
    if (!set.pinv) set.pinv = laplacian_pseudoinverse(b);
    set.Z = fundamental_matrix_regular(b);
  }
  if (options.cross_check) {
    for (const Route r : {Route::Bottleneck, Route::Group, Route::Pinv, Route::RankOne}) {
      if (r == options.route) continue;
      InverseSet scratch;
      const Matrix other = detail::absorption_inverse_by(b, r, scratch);
      const double gap = relative_difference(other, set.Ld);
      if (gap > kRouteDisagreementLimit) {
        throw RouteDisagreement(std::string(route_name(r)) + " route differs from " +
                                std::string(route_name(options.route)) + " by " +
                                std::to_string(gap));
      }
    }
  }
  return set;
}

inline InverseSet absorption_inverse(const LaplacianBundle& b, Route route) {
  AbsorptionInverseOptions options;
  options.route = route;
  return absorption_inverse(b, options);
}

/// Residuals of the identities that characterize Ld, each relative to the
/// natural scale of the quantity compared.
struct InverseResiduals {
  double one_inverse = 0.0;      // ||L X L - L|| / ||L||
  double two_inverse = 0.0;      // ||X L X - X|| / ||X||
  double kernel = 0.0;           // ||X D u|| / (||X|| ||Du||)
  double left_projection = 0.0;  // ||X L + UD - I||
  double right_projection = 0.0; // ||L X + DU - I||

  double worst() const {
    return std::max({one_inverse, two_inverse, kernel, left_projection, right_projection});
  }
};

inline InverseResiduals inverse_residuals(const LaplacianBundle& b, const Matrix& x) {
  const auto n = b.n();
  const Matrix identity = Matrix::Identity(n, n);
  const Matrix d = b.D();
  const double lnorm = std::max(inf_norm(b.L), 1e-300);
  const double xnorm = std::max(inf_norm(x), 1e-300);
  const Vector du = b.d().cwiseProduct(b.u);
  InverseResiduals r;
  r.one_inverse = inf_norm(b.L * x * b.L - b.L) / lnorm;
  r.two_inverse = inf_norm(x * b.L * x - x) / xnorm;
  r.kernel = (x * du).lpNorm<Eigen::Infinity>() / (xnorm * du.lpNorm<Eigen::Infinity>());
  r.left_projection = inf_norm(x * b.L + b.U * d - identity);
  r.right_projection = inf_norm(b.L * x + d * b.U - identity);
  return r;
}

/// (L + zD)^{-1}, the fundamental matrix of the absorbing process at rate
/// scale z. Entry (i, j) is the expected time spent in i before absorption
/// when started from j.
inline Matrix fundamental_matrix_absorbing(const LaplacianBundle& b, double z = 1.0) {
  if (!(z > 0.0)) throw PreconditionError("fundamental_matrix_absorbing: z must be positive");
  return invert(b.L + z * b.D());
}

struct ResolventResiduals {
  /// ||(L+zD)^{-1} - U/z - (I + z Ld D)^{-1} Ld||_inf
  double resolvent = 0.0;
  /// ||(I + z Ld D)^{-1} - UD - (L+zD)^{-1} L||_inf
  double projection = 0.0;
};

/// Checks the two resolvent identities that hold for every z > 0, inside or
/// outside the radius of convergence of the Laurent series.
inline ResolventResiduals verify_resolvent_identities(const LaplacianBundle& b, const Matrix& ld,
                                                      double z) {
  if (!(z > 0.0)) throw PreconditionError("verify_resolvent_identities: z must be positive");
  const auto n = b.n();
  const Matrix d = b.D();
  const Matrix fundamental = fundamental_matrix_absorbing(b, z);
  const Matrix inner = invert(Matrix::Identity(n, n) + z * ld * d);
  ResolventResiduals r;
  r.resolvent = inf_norm(fundamental - b.U / z - inner * ld);
  r.projection = inf_norm(inner - b.U * d - fundamental * b.L);
  return r;
}

struct LaurentEvaluation {
  Matrix value;
  /// Whether rho(z Ld D) < 1 is established.
  bool converges = false;
};

/// U/z + Ld + sum_{k=1..kmax} (-z Ld D)^k Ld.
inline LaurentEvaluation laurent_series_eval(const Matrix& ld, const Vector& d, const Matrix& u,
                                             double z, int kmax) {
  if (kmax < 0) throw PreconditionError("laurent_series_eval: kmax must be nonnegative");
  if (!(z > 0.0)) throw PreconditionError("laurent_series_eval: z must be positive");
  const Matrix step = -z * ld * d.asDiagonal();
  LaurentEvaluation out;
  out.value = u / z + ld;
  Matrix term = ld;
  for (int k = 1; k <= kmax; ++k) {
    term = step * term;
    out.value += term;
  }
  out.converges = spectral_radius_below_one(step);
  return out;
}

struct ResidenceDeviationReport {
  double eps = 0.0;
  /// ||(L + eps D)^{-1} - U_eps - Ld_eps||_inf at eps and at eps/2.
  double remainder = 0.0;
  double remainder_half = 0.0;
  /// remainder_half / remainder; first order in eps means about 1/2.
  double ratio = 0.0;
  bool first_order = false;
};

/// First-order accuracy of the residence-time expansion: with absorption
/// rates eps*d, the fundamental matrix minus its two leading Laurent terms is
/// O(eps). Everything is rebuilt from the scaled absorption vector.
inline ResidenceDeviationReport residence_deviation_check(const AbsorptionGraph& g, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("residence_deviation_check: eps must be positive");
  const auto remainder_at = [&g](double e) {
    const LaplacianBundle b = laplacian(g.with_absorption(e * g.absorption()));
    const Matrix ld = absorption_inverse(b).Ld;
    if (!spectral_radius_below_one(ld * b.D())) {
      throw PreconditionError("residence_deviation_check: series does not converge at eps = " +
                              std::to_string(e));
    }
    return inf_norm(fundamental_matrix_absorbing(b) - b.U - ld);
  };
  ResidenceDeviationReport r;
  r.eps = eps;
  r.remainder = remainder_at(eps);
  r.remainder_half = remainder_at(eps / 2.0);
  r.ratio = r.remainder > 0.0 ? r.remainder_half / r.remainder : 0.0;
  r.first_order = r.ratio >= 0.4 && r.ratio <= 0.6;
  return r;
}

inline bool rates_equal(const Vector& d, double tol = 1e-12) {
  const double hi = d.maxCoeff();
  const double lo = d.minCoeff();
  return hi - lo <= tol * hi;
}

/// ker L = ker L', i.e. the kernel vector is constant.
inline bool range_hermitian(const LaplacianBundle& b, double tol = 1e-10) {
  const double mean = 1.0 / static_cast<double>(b.n());
  return (b.u.array() - mean).abs().maxCoeff() <= tol * mean;
}

struct EquivalenceReport {
  double ld_vs_group = 0.0;
  bool group_expected_equal = false;
  double ld_vs_pinv = 0.0;
  bool pinv_expected_equal = false;
  /// ||group_inverse(L~) - D Ld|| / ||D Ld|| for the absorption-scaled L~.
  double scaled_group_gap = 0.0;
};

inline EquivalenceReport check_equivalences(const LaplacianBundle& b, const InverseSet& set) {
  if (!set.group || !set.pinv) {
    throw PreconditionError("check_equivalences: inverse set lacks group or pinv companions");
  }
  EquivalenceReport r;
  r.ld_vs_group = inf_norm(set.Ld - *set.group);
  r.group_expected_equal = rates_equal(b.d());
  r.ld_vs_pinv = inf_norm(set.Ld - *set.pinv);
  r.pinv_expected_equal = r.group_expected_equal && range_hermitian(b);
  const LaplacianBundle scaled = laplacian(absorption_scaled_graph(b.graph));
  r.scaled_group_gap = relative_difference(group_inverse(scaled), b.D() * set.Ld);
  return r;
}

}  // namespace absorb
