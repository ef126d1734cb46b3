// absorb: absorption-inverse analyses of weighted digraphs from the shell.

#include "CLI11.hpp"

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "absorb/cli.hpp"

namespace {

using absorb::cli::Command;
using absorb::cli::Format;
using absorb::cli::RunConfig;

void add_common(CLI::App* sub, RunConfig& cfg, std::string& format, bool with_input = true) {
  if (with_input) sub->add_option("-i,--input", cfg.input_path, "graph file (JSON v1)")->required();
  sub->add_option("-o,--output", cfg.output_path, "write the artifact here instead of stdout");
  sub->add_option("-f,--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

void add_inverse_options(CLI::App* sub, std::string& route) {
  sub->add_option("-r,--route", route, "bottleneck, group, pinv, rank-one or forest")
      ->check(CLI::IsMember({"bottleneck", "group", "pinv", "rank-one", "forest"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Absorption inverse of graph Laplacians and derived analyses"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string format;
  std::string route = "bottleneck";

  app.add_option("--construction-tol", cfg.construction_tol, "bound on defining-identity residuals");
  app.add_option("--agreement-tol", cfg.agreement_tol, "bound on relative route disagreement");
  app.add_option("--eig-tol", cfg.partition_tol, "power-iteration residual tolerance");
  app.add_option("--metric-slack", cfg.metric_slack, "allowed triangle-inequality deficit");
  app.add_option("--forest-cap", cfg.forest_cap, "largest n for forest enumeration");
  app.add_option("--seed", cfg.seed, "seed of the random power-iteration start");

  std::map<CLI::App*, Command> commands;
  const auto sub = [&](const char* name, const char* help, Command c) {
    CLI::App* s = app.add_subcommand(name, help);
    commands[s] = c;
    return s;
  };

  auto* inverse = sub("inverse", "absorption inverse matrix", Command::Inverse);
  add_common(inverse, cfg, format);
  add_inverse_options(inverse, route);

  auto* distance = sub("distance", "directed distance (balanced graphs)", Command::Distance);
  add_common(distance, cfg, format);
  add_inverse_options(distance, route);

  auto* rank = sub("pagerank", "row-sum centrality (balanced graphs)", Command::Pagerank);
  add_common(rank, cfg, format);
  add_inverse_options(rank, route);

  auto* part = sub("partition", "sign bipartition from the symmetrized inverse", Command::Partition);
  add_common(part, cfg, format);
  add_inverse_options(part, route);

  auto* sweep = sub("sweep", "bipartition while one absorption rate varies", Command::Sweep);
  add_common(sweep, cfg, format);
  sweep->add_option("--vertex", cfg.sweep_vertex, "1-based vertex whose rate varies")->required();
  sweep->add_option("--min", cfg.sweep_min, "first rate")->required();
  sweep->add_option("--max", cfg.sweep_max, "last rate (inclusive)")->required();
  sweep->add_option("--step", cfg.sweep_step, "rate increment")->required()->check(CLI::PositiveNumber);

  auto* forests = sub("forests", "in-forest matrices and weights", Command::Forests);
  add_common(forests, cfg, format);
  forests->add_flag("--scaled", cfg.scaled, "use the absorption-scaled graph");

  auto* validate = sub("validate", "run the invariant suite", Command::Validate);
  validate->add_option("-i,--input", cfg.input_path, "graph file (JSON v1)")->required();
  validate->add_option("-o,--output", cfg.output_path);
  validate->add_option("-f,--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  add_inverse_options(validate, route);

  auto* motif = sub("motif", "emit a motif graph file", Command::Motif);
  motif->add_option("-o,--output", cfg.output_path);
  motif->add_option("--kind", cfg.motif_kind, "complete, star, path or dicycle")
      ->required()
      ->check(CLI::IsMember({"complete", "star", "path", "dicycle"}));
  motif->add_option("--n", cfg.motif_n, "vertex count")->required();
  motif->add_option("--a", cfg.motif_a, "edge weight");
  motif->add_option("--d", cfg.motif_d, "absorption rates, comma separated")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : absorb::cli::kRejected;
  }

  for (const auto& [s, c] : commands) {
    if (s->parsed()) cfg.command = c;
  }
  if (format == "json") cfg.format = Format::Json;
  if (format == "csv") cfg.format = Format::Csv;
  if (format == "text") cfg.format = Format::Text;
  cfg.route = absorb::parse_route(route);
  return absorb::cli::run(cfg, std::cout, std::cerr);
}
