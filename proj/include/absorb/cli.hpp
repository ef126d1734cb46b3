#pragma once

// Command dispatch for the absorb tool. run() never throws: library errors
// map to exit codes (2 for rejected input, 1 for internal failures) with a
// one-line diagnostic on the error stream.

#include "json.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "absorb/errors.hpp"
#include "absorb/forests.hpp"
#include "absorb/graph.hpp"
#include "absorb/inverses.hpp"
#include "absorb/io.hpp"
#include "absorb/motifs.hpp"
#include "absorb/numerics.hpp"
#include "absorb/structure.hpp"

namespace absorb::cli {

enum class Command { Inverse, Distance, Pagerank, Partition, Sweep, Forests, Validate, Motif };
/// Default picks JSON, except validate which prints a text report.
enum class Format { Default, Json, Csv, Text };

enum ExitCode : int { kOk = 0, kInternalError = 1, kRejected = 2 };

inline constexpr double kPsdSlack = 1e-8;
inline constexpr double kForestTreeTolerance = 1e-10;

struct RunConfig {
  Command command = Command::Inverse;
  std::string input_path;
  /// Empty writes to the output stream passed to run().
  std::string output_path;
  Format format = Format::Default;
  Route route = Route::Bottleneck;

  double construction_tol = kConstructionTolerance;
  double agreement_tol = kRouteAgreementTolerance;
  double partition_tol = kPartitionTolerance;
  double metric_slack = kMetricSlack;
  Eigen::Index forest_cap = kForestCap;
  std::uint64_t seed = kDefaultSeed;

  // sweep: 1-based vertex whose absorption rate varies.
  Eigen::Index sweep_vertex = 0;
  double sweep_min = 0.0;
  double sweep_max = 0.0;
  double sweep_step = 0.0;

  // forests: enumerate on the absorption-scaled graph instead.
  bool scaled = false;

  // motif
  std::string motif_kind = "path";
  Eigen::Index motif_n = 0;
  double motif_a = 1.0;
  std::vector<double> motif_d;
};

struct CheckResult {
  enum class Status { Pass, Fail, Skip };
  std::string name;
  Status status = Status::Pass;
  std::string detail;
};

inline std::string status_name(CheckResult::Status s) {
  switch (s) {
    case CheckResult::Status::Pass: return "PASS";
    case CheckResult::Status::Fail: return "FAIL";
    case CheckResult::Status::Skip: return "SKIP";
  }
  return "?";
}

namespace detail {

inline CheckResult bound_check(std::string name, double value, double bound) {
  CheckResult c;
  c.name = std::move(name);
  c.status = value <= bound ? CheckResult::Status::Pass : CheckResult::Status::Fail;
  c.detail = io::format_number(value) + " <= " + io::format_number(bound);
  return c;
}

inline CheckResult skipped(std::string name, const std::string& why) {
  return {std::move(name), CheckResult::Status::Skip, "skipped (" + why + ")"};
}

inline double min_symmetric_eigenvalue(const Matrix& s, double tol, std::uint64_t seed) {
  return -symmetric_leading_eigpair(-s, tol, 200000, seed).value;
}

}  // namespace detail

/// The full invariant suite for one graph. Metric checks need a balanced
/// graph and forest checks need n <= cap; otherwise they are skipped.
inline std::vector<CheckResult> validate_graph(const AbsorptionGraph& g, const RunConfig& cfg) {
  std::vector<CheckResult> out;
  const LaplacianBundle b = laplacian(g);
  const auto n = b.n();
  const double lnorm = std::max(inf_norm(b.L), 1e-300);

  out.push_back(detail::bound_check("laplacian-column-sums",
                                    b.L.colwise().sum().cwiseAbs().maxCoeff() / lnorm, 1e-12));
  out.push_back(detail::bound_check(
      "kernel-vector", (b.L * b.u).lpNorm<Eigen::Infinity>() / lnorm, cfg.construction_tol));

  AbsorptionInverseOptions options;
  options.route = cfg.route;
  options.companions = true;
  const InverseSet set = absorption_inverse(b, options);
  const Matrix& ld = set.Ld;
  const double ldnorm = std::max(inf_norm(ld), 1e-300);

  out.push_back(detail::bound_check("definition-identities", inverse_residuals(b, ld).worst(),
                                    cfg.construction_tol));

  double agreement = 0.0;
  for (const Route r : {Route::Bottleneck, Route::Group, Route::Pinv, Route::RankOne}) {
    agreement = std::max(agreement, relative_difference(absorption_inverse(b, r).Ld, ld));
  }
  out.push_back(detail::bound_check("route-agreement", agreement, cfg.agreement_tol));

  {
    const double smallest = ld.diagonal().minCoeff();
    CheckResult c{"diagonal-positivity",
                  smallest > 0.0 ? CheckResult::Status::Pass : CheckResult::Status::Fail,
                  "min diagonal " + io::format_number(smallest)};
    out.push_back(std::move(c));
  }
  {
    double worst = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j) worst = std::min(worst, ld(i, i) - ld(i, j));
      }
    }
    CheckResult c{"row-diagonal-maximality",
                  worst > 0.0 ? CheckResult::Status::Pass : CheckResult::Status::Fail,
                  "min Ld(i,i) - Ld(i,j) " + io::format_number(worst)};
    out.push_back(std::move(c));
  }
  {
    const auto res = verify_resolvent_identities(b, ld, 1.0);
    const double scale = std::max(1.0, inf_norm(fundamental_matrix_absorbing(b, 1.0)));
    out.push_back(detail::bound_check("resolvent-identities",
                                      std::max(res.resolvent, res.projection) / scale,
                                      cfg.construction_tol));
  }

  if (b.balanced) {
    const Matrix sym = ld + ld.transpose();
    const double lo = detail::min_symmetric_eigenvalue(sym, cfg.partition_tol, cfg.seed);
    out.push_back(detail::bound_check("psd-symmetrization", -lo / ldnorm, kPsdSlack));
    out.push_back(detail::bound_check(
        "absorption-annihilation",
        (b.d().transpose() * ld).cwiseAbs().maxCoeff() / (ldnorm * b.d().cwiseAbs().maxCoeff()),
        cfg.construction_tol));
    const DistanceMatrix dm = distance_matrix(ld, true);
    const auto violations = verify_directed_metric(dm, ld, cfg.metric_slack);
    CheckResult c{"directed-metric",
                  violations.empty() ? CheckResult::Status::Pass : CheckResult::Status::Fail,
                  std::to_string(violations.size()) + " violations"};
    if (!violations.empty()) {
      const auto& v = violations.front();
      c.detail += ", first " + violation_kind_name(v.kind) + " at (" + std::to_string(v.i + 1) +
                  "," + std::to_string(v.j + 1) + "," + std::to_string(v.k + 1) + ") " +
                  io::format_number(v.amount);
    }
    out.push_back(std::move(c));
    out.push_back(detail::bound_check(
        "c-metric-pinv", relative_difference(c_metric(ld), c_metric(*set.pinv)), cfg.construction_tol));
  } else {
    for (const char* name :
         {"psd-symmetrization", "absorption-annihilation", "directed-metric", "c-metric-pinv"}) {
      out.push_back(detail::skipped(name, "unbalanced"));
    }
  }

  if (n <= cfg.forest_cap) {
    out.push_back(detail::bound_check(
        "forest-oracle", relative_difference(absorption_inverse_forest_oracle(g, cfg.forest_cap), ld),
        cfg.agreement_tol));
    const AbsorptionGraph scaled = absorption_scaled_graph(g);
    const ForestFamily family = forest_matrices(scaled, cfg.forest_cap);
    const Matrix expected = family.sigma.back() * b.D() * b.U;
    out.push_back(detail::bound_check("forest-tree-identity",
                                      relative_difference(family.Q.back(), expected),
                                      kForestTreeTolerance));
    const ForestFamily plain = forest_matrices(g, cfg.forest_cap);
    out.push_back(detail::bound_check("forest-parametric-identity",
                                      parametric_forest_identity_residual(b.L, plain, 1.0),
                                      cfg.construction_tol));
  } else {
    for (const char* name :
         {"forest-oracle", "forest-tree-identity", "forest-parametric-identity"}) {
      out.push_back(detail::skipped(name, "size cap"));
    }
  }
  return out;
}

namespace detail {

inline nlohmann::json tolerances_json(const RunConfig& cfg) {
  return {{"construction", cfg.construction_tol},
          {"route_agreement", cfg.agreement_tol},
          {"partition", cfg.partition_tol},
          {"metric_slack", cfg.metric_slack}};
}

inline nlohmann::json residuals_json(const InverseResiduals& r) {
  return {{"one_inverse", r.one_inverse},
          {"two_inverse", r.two_inverse},
          {"kernel", r.kernel},
          {"left_projection", r.left_projection},
          {"right_projection", r.right_projection}};
}

inline nlohmann::json meta_json(const RunConfig& cfg, const LaplacianBundle& b, const Matrix& ld) {
  return {{"route", std::string(route_name(cfg.route))},
          {"tolerances", tolerances_json(cfg)},
          {"residuals", residuals_json(inverse_residuals(b, ld))},
          {"balanced", b.balanced}};
}

inline Format resolve(Format f) { return f == Format::Default ? Format::Json : f; }

inline void require_input(const RunConfig& cfg) {
  if (cfg.input_path.empty()) throw PreconditionError("this command needs --input");
}

inline Matrix build_ld(const RunConfig& cfg, const LaplacianBundle& b) {
  AbsorptionInverseOptions options;
  options.route = cfg.route;
  return absorption_inverse(b, options).Ld;
}

inline void emit_json(std::ostream& out, const nlohmann::json& doc) { out << doc.dump(2) << '\n'; }

inline void cmd_inverse(const RunConfig& cfg, std::ostream& out) {
  const LaplacianBundle b = laplacian(load_graph_file(cfg.input_path));
  const Matrix ld = build_ld(cfg, b);
  if (resolve(cfg.format) == Format::Csv) {
    io::write_matrix_csv(out, ld);
    return;
  }
  emit_json(out, {{"n", b.n()}, {"matrix", io::to_json(ld)}, {"meta", meta_json(cfg, b, ld)}});
}

inline void cmd_distance(const RunConfig& cfg, std::ostream& out) {
  const LaplacianBundle b = laplacian(load_graph_file(cfg.input_path));
  if (!b.balanced) throw NotBalanced("distance: graph is not balanced");
  const Matrix ld = build_ld(cfg, b);
  const DistanceMatrix dm = distance_matrix(ld, b.balanced);
  if (resolve(cfg.format) == Format::Csv) {
    io::write_matrix_csv(out, dm.R);
    return;
  }
  auto meta = meta_json(cfg, b, ld);
  meta["K"] = dm.K;
  meta["rows"] = "source";
  emit_json(out, {{"n", b.n()}, {"matrix", io::to_json(dm.R)}, {"meta", std::move(meta)}});
}

inline void cmd_pagerank(const RunConfig& cfg, std::ostream& out) {
  const LaplacianBundle b = laplacian(load_graph_file(cfg.input_path));
  if (!b.balanced) throw NotBalanced("pagerank: graph is not balanced");
  const Matrix ld = build_ld(cfg, b);
  const CentralityVector c = pagerank(ld, b.balanced);
  if (resolve(cfg.format) == Format::Csv) {
    std::vector<std::size_t> rank(c.ranking.size());
    for (std::size_t r = 0; r < c.ranking.size(); ++r) {
      rank[static_cast<std::size_t>(c.ranking[r])] = r + 1;
    }
    out << "vertex,score,rank\n";
    for (Eigen::Index i = 0; i < c.scores.size(); ++i) {
      out << i + 1 << ',' << io::format_number(c.scores(i)) << ','
          << rank[static_cast<std::size_t>(i)] << '\n';
    }
    return;
  }
  emit_json(out, {{"n", b.n()},
                  {"scores", io::to_json(c.scores)},
                  {"ranking", io::vertex_labels(c.ranking)},
                  {"meta", meta_json(cfg, b, ld)}});
}

inline nlohmann::json partition_json(const Partition& p) {
  return {{"group1", io::vertex_labels(p.group(1))},
          {"group2", io::vertex_labels(p.group(2))},
          {"groups", p.membership},
          {"eigenvalue", p.eig.value},
          {"eigenvector", io::to_json(p.eig.vector)},
          {"degenerate", p.degenerate}};
}

inline void cmd_partition(const RunConfig& cfg, std::ostream& out) {
  const LaplacianBundle b = laplacian(load_graph_file(cfg.input_path));
  const Matrix ld = build_ld(cfg, b);
  const Partition p = partition(ld, cfg.partition_tol, cfg.seed);
  if (resolve(cfg.format) == Format::Csv) {
    out << "vertex,group,eigenvector\n";
    for (std::size_t i = 0; i < p.membership.size(); ++i) {
      out << i + 1 << ',' << p.membership[i] << ','
          << io::format_number(p.eig.vector(static_cast<Eigen::Index>(i))) << '\n';
    }
    return;
  }
  nlohmann::json doc = partition_json(p);
  doc["n"] = b.n();
  doc["meta"] = meta_json(cfg, b, ld);
  emit_json(out, doc);
}

inline void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const AbsorptionGraph g = load_graph_file(cfg.input_path);
  if (cfg.sweep_vertex < 1 || cfg.sweep_vertex > g.n()) {
    throw PreconditionError("sweep: --vertex must lie in 1.." + std::to_string(g.n()));
  }
  const auto vertex = cfg.sweep_vertex - 1;
  const auto values = sweep_values(cfg.sweep_min, cfg.sweep_max, cfg.sweep_step);
  const auto sweep = partition_sweep(g, vertex, values);
  if (resolve(cfg.format) == Format::Csv) {
    out << "value,eigenvalue";
    for (Eigen::Index i = 0; i < g.n(); ++i) out << ",v" << i + 1;
    out << '\n';
    for (const auto& point : sweep) {
      out << io::format_number(point.value) << ',' << io::format_number(point.partition.eig.value);
      for (const int m : point.partition.membership) out << ',' << m;
      out << '\n';
    }
    return;
  }
  nlohmann::json points = nlohmann::json::array();
  for (const auto& point : sweep) {
    points.push_back({{"value", point.value},
                      {"eigenvalue", point.partition.eig.value},
                      {"groups", point.partition.membership}});
  }
  emit_json(out, {{"n", g.n()},
                  {"vertex", cfg.sweep_vertex},
                  {"points", std::move(points)},
                  {"thresholds", partition_thresholds(g, vertex, sweep)},
                  {"meta", {{"tolerances", tolerances_json(cfg)}}}});
}

inline void cmd_forests(const RunConfig& cfg, std::ostream& out) {
  const AbsorptionGraph loaded = load_graph_file(cfg.input_path);
  const AbsorptionGraph g = cfg.scaled ? absorption_scaled_graph(loaded) : loaded;
  const ForestFamily family = forest_matrices(g, cfg.forest_cap);
  if (resolve(cfg.format) == Format::Csv) {
    out << "k,sigma\n";
    for (std::size_t k = 0; k < family.sigma.size(); ++k) {
      out << k << ',' << io::format_number(family.sigma[k]) << '\n';
    }
    return;
  }
  nlohmann::json q = nlohmann::json::array();
  for (const Matrix& m : family.Q) q.push_back(io::to_json(m));
  emit_json(out, {{"n", g.n()},
                  {"sigma", family.sigma},
                  {"Q", std::move(q)},
                  {"meta", {{"scaled", cfg.scaled}, {"cap", cfg.forest_cap}}}});
}

inline bool cmd_validate(const RunConfig& cfg, std::ostream& out) {
  const AbsorptionGraph g = load_graph_file(cfg.input_path);
  const auto checks = validate_graph(g, cfg);
  bool ok = true;
  for (const auto& c : checks) ok = ok && c.status != CheckResult::Status::Fail;
  if (cfg.format == Format::Json) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& c : checks) {
      list.push_back({{"name", c.name}, {"status", status_name(c.status)}, {"detail", c.detail}});
    }
    emit_json(out, {{"n", g.n()},
                    {"checks", std::move(list)},
                    {"passed", ok},
                    {"meta", {{"route", std::string(route_name(cfg.route))},
                              {"tolerances", tolerances_json(cfg)}}}});
  } else {
    for (const auto& c : checks) out << status_name(c.status) << ' ' << c.name << ": " << c.detail << '\n';
  }
  return ok;
}

inline void cmd_motif(const RunConfig& cfg, std::ostream& out) {
  MotifSpec spec;
  spec.kind = parse_motif(cfg.motif_kind);
  spec.n = cfg.motif_n;
  spec.a = cfg.motif_a;
  if (cfg.motif_d.empty()) {
    spec.d = Vector::Ones(std::max<Eigen::Index>(spec.n, 0));
  } else {
    spec.d = Eigen::Map<const Vector>(cfg.motif_d.data(),
                                      static_cast<Eigen::Index>(cfg.motif_d.size()));
  }
  out << graph_to_json(motif_graph(spec)).dump() << '\n';
}

}  // namespace detail

/// Executes one command. The artifact goes to cfg.output_path when set and to
/// `out` otherwise; diagnostics go to `err`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ostringstream artifact;
  int code = kOk;
  try {
    if (cfg.command != Command::Motif) detail::require_input(cfg);
    switch (cfg.command) {
      case Command::Inverse: detail::cmd_inverse(cfg, artifact); break;
      case Command::Distance: detail::cmd_distance(cfg, artifact); break;
      case Command::Pagerank: detail::cmd_pagerank(cfg, artifact); break;
      case Command::Partition: detail::cmd_partition(cfg, artifact); break;
      case Command::Sweep: detail::cmd_sweep(cfg, artifact); break;
      case Command::Forests: detail::cmd_forests(cfg, artifact); break;
      case Command::Validate:
        if (!detail::cmd_validate(cfg, artifact)) {
          err << "validate: one or more checks failed\n";
          code = kRejected;
        }
        break;
      case Command::Motif: detail::cmd_motif(cfg, artifact); break;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kRejected;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kRejected;
  } catch (const NotBalanced& e) {
    err << "error: " << e.what() << '\n';
    return kRejected;
  } catch (const SizeLimit& e) {
    err << "error: " << e.what() << '\n';
    return kRejected;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kRejected;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }

  if (cfg.output_path.empty()) {
    out << artifact.str();
  } else {
    std::ofstream file(cfg.output_path, std::ios::binary);
    if (!(file << artifact.str())) {
      err << "internal error: cannot write " << cfg.output_path << '\n';
      return kInternalError;
    }
  }
  return code;
}

}  // namespace absorb::cli
