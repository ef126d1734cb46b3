#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "absorb/cli.hpp"
#include "support.hpp"

using namespace absorb;
using absorb::cli::Command;
using absorb::cli::Format;
using absorb::cli::RunConfig;
namespace ts = testing_support;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("absorb_cli_" + name)).string();
}

std::string write_graph(const std::string& name, const AbsorptionGraph& g) {
  const std::string path = temp_path(name);
  std::ofstream(path) << graph_to_json(g).dump();
  return path;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const RunConfig& cfg) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = absorb::cli::run(cfg, out, err);
  return {code, out.str(), err.str()};
}

RunConfig config(Command c, const std::string& input, Format f = Format::Default) {
  RunConfig cfg;
  cfg.command = c;
  cfg.input_path = input;
  cfg.format = f;
  return cfg;
}

AbsorptionGraph path_graph(Eigen::Index n, Vector d) {
  return AbsorptionGraph::create(ts::path_adjacency(n), std::move(d));
}

}  // namespace

TEST(Cli, InverseCsvAndJsonAgreeBitwise) {
  const auto path = write_graph("path3.json", path_graph(3, Eigen::Vector3d(1, 2, 3)));
  const auto csv = run(config(Command::Inverse, path, Format::Csv));
  const auto json = run(config(Command::Inverse, path, Format::Json));
  ASSERT_EQ(csv.code, 0) << csv.err;
  ASSERT_EQ(json.code, 0) << json.err;
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "vertex,1,2,3");
  const Matrix from_csv = io::read_matrix_csv(csv.out);
  const auto doc = nlohmann::json::parse(json.out);
  EXPECT_EQ(doc["n"], 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(from_csv(i, j), doc["matrix"][i][j].get<double>());
  }
  EXPECT_EQ(doc["meta"]["route"], "bottleneck");
  EXPECT_LT(doc["meta"]["residuals"]["one_inverse"].get<double>(), 1e-12);
  EXPECT_NEAR(from_csv(0, 1), 1.0 / 9.0, 1e-15);
}

TEST(Cli, EveryRouteProducesTheSameMatrix) {
  std::mt19937_64 rng(81);
  const auto path = write_graph("random6.json", ts::random_graph(rng, 6));
  auto cfg = config(Command::Inverse, path, Format::Csv);
  const Matrix reference = io::read_matrix_csv(run(cfg).out);
  for (const Route r : {Route::Group, Route::Pinv, Route::RankOne, Route::ForestOracle}) {
    cfg.route = r;
    const auto o = run(cfg);
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_LT(relative_difference(io::read_matrix_csv(o.out), reference), 1e-8) << route_name(r);
  }
}

TEST(Cli, PartitionJson) {
  Vector d = Vector::Ones(8);
  d(2) = 10.0;
  const auto path = write_graph("path8_d3is10.json", path_graph(8, d));
  const auto o = run(config(Command::Partition, path));
  ASSERT_EQ(o.code, 0) << o.err;
  const auto doc = nlohmann::json::parse(o.out);
  EXPECT_EQ(doc["group1"], nlohmann::json({1, 2, 3}));
  EXPECT_EQ(doc["group2"], nlohmann::json({4, 5, 6, 7, 8}));
  EXPECT_TRUE(doc["eigenvalue"].is_number());
}

TEST(Cli, SweepCsvFlipsOnce) {
  const auto path = write_graph("path8.json", path_graph(8, Vector::Ones(8)));
  auto cfg = config(Command::Sweep, path, Format::Csv);
  cfg.sweep_vertex = 3;
  cfg.sweep_min = 1.0;
  cfg.sweep_max = 10.0;
  cfg.sweep_step = 0.1;
  const auto o = run(cfg);
  ASSERT_EQ(o.code, 0) << o.err;
  std::istringstream lines(o.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "value,eigenvalue,v1,v2,v3,v4,v5,v6,v7,v8");
  std::vector<std::pair<double, bool>> rows;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.emplace_back(std::stod(cells[0]), cells[4] == cells[5]);  // v3 with v4
  }
  ASSERT_EQ(rows.size(), 91u);
  int flips = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].second != rows[k - 1].second) {
      ++flips;
      EXPECT_GE(rows[k].first, 5.3);
      EXPECT_LE(rows[k].first, 5.5);
    }
  }
  EXPECT_EQ(flips, 1);

  cfg.format = Format::Json;
  const auto doc = nlohmann::json::parse(run(cfg).out);
  ASSERT_EQ(doc["thresholds"].size(), 1u);
  EXPECT_NEAR(doc["thresholds"][0].get<double>(), 5.4, 0.1);
}

TEST(Cli, DistanceAndPagerankRefuseUnbalanced) {
  Matrix a = ts::path_adjacency(3);
  a(1, 0) = 2.0;
  const auto path = write_graph("unbalanced.json", AbsorptionGraph::create(a, Vector::Ones(3)));
  for (const Command c : {Command::Distance, Command::Pagerank}) {
    const auto o = run(config(c, path));
    EXPECT_EQ(o.code, 2);
    EXPECT_NE(o.err.find("not balanced"), std::string::npos);
    EXPECT_TRUE(o.out.empty());
  }
}

TEST(Cli, DistanceRowsAreSources) {
  const auto path = write_graph("path3u.json", path_graph(3, Vector::Ones(3)));
  const auto o = run(config(Command::Distance, path, Format::Csv));
  ASSERT_EQ(o.code, 0);
  const Matrix r = io::read_matrix_csv(o.out);
  EXPECT_NEAR(r(0, 1), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r(0, 2), 1.0, 1e-15);
}

TEST(Cli, PagerankCsv) {
  Vector d(7);
  d << 1, 2, .1, .1, .1, .1, .1;
  const auto path = write_graph("star7.json", AbsorptionGraph::create(ts::star_adjacency(7), d));
  const auto o = run(config(Command::Pagerank, path));
  ASSERT_EQ(o.code, 0);
  const auto doc = nlohmann::json::parse(o.out);
  EXPECT_EQ(doc["ranking"].back(), 2);
  EXPECT_EQ(doc["scores"].size(), 7u);
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run(config(Command::Inverse, "")).code, 2);
  EXPECT_EQ(run(config(Command::Inverse, "/nonexistent/x.json")).code, 2);
  const std::string bad = temp_path("bad.json");
  std::ofstream(bad) << R"({"n":2,"edges":[[1,2,1]],"absorption":[1,1]})";
  const auto o = run(config(Command::Inverse, bad));
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("strongly connected"), std::string::npos);
}

TEST(Cli, ForestsRefuseAboveCap) {
  const auto path = write_graph("path10.json", path_graph(10, Vector::Ones(10)));
  EXPECT_EQ(run(config(Command::Forests, path)).code, 2);
}

TEST(Cli, ForestsCsvAndScaled) {
  const auto path = write_graph("path3f.json", path_graph(3, Eigen::Vector3d(1, 2, 4)));
  const auto o = run(config(Command::Forests, path, Format::Csv));
  ASSERT_EQ(o.code, 0);
  EXPECT_EQ(o.out, "k,sigma\n0,1\n1,4\n2,3\n");
  auto cfg = config(Command::Forests, path);
  cfg.scaled = true;
  const auto doc = nlohmann::json::parse(run(cfg).out);
  // Scaled arcs: 1->2 weight 1, 2->1 and 2->3 weight 1/2, 3->2 weight 1/4.
  EXPECT_DOUBLE_EQ(doc["sigma"][1].get<double>(), 2.25);
}

TEST(Cli, ValidateBalancedPasses) {
  std::mt19937_64 rng(82);
  const auto path = write_graph("balanced.json", ts::random_balanced_graph(rng, 6));
  const auto o = run(config(Command::Validate, path));
  EXPECT_EQ(o.code, 0) << o.out;
  EXPECT_EQ(o.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(o.out.find("SKIP"), std::string::npos);
  EXPECT_NE(o.out.find("PASS directed-metric"), std::string::npos);
}

TEST(Cli, ValidateUnbalancedSkipsMetrics) {
  std::mt19937_64 rng(83);
  const auto g = ts::random_graph(rng, 6);
  ASSERT_FALSE(is_balanced(g));
  const auto o = run(config(Command::Validate, write_graph("unbal6.json", g)));
  EXPECT_EQ(o.code, 0) << o.out;
  EXPECT_NE(o.out.find("SKIP directed-metric: skipped (unbalanced)"), std::string::npos);
  EXPECT_NE(o.out.find("PASS definition-identities"), std::string::npos);
  EXPECT_NE(o.out.find("PASS forest-oracle"), std::string::npos);
}

TEST(Cli, ValidateLargeGraphSkipsForests) {
  const auto o = run(config(Command::Validate, write_graph("path10v.json", path_graph(10, Vector::Ones(10)))));
  EXPECT_EQ(o.code, 0) << o.out;
  EXPECT_NE(o.out.find("SKIP forest-oracle: skipped (size cap)"), std::string::npos);
}

TEST(Cli, ValidateFailureExitsTwo) {
  std::mt19937_64 rng(84);
  auto cfg = config(Command::Validate, write_graph("tight.json", ts::random_graph(rng, 5)));
  cfg.agreement_tol = 0.0;
  cfg.construction_tol = 0.0;
  const auto o = run(cfg);
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.out.find("FAIL"), std::string::npos);
}

TEST(Cli, ValidateJson) {
  auto cfg = config(Command::Validate, write_graph("path4.json", path_graph(4, Vector::Ones(4))),
                    Format::Json);
  const auto doc = nlohmann::json::parse(run(cfg).out);
  EXPECT_TRUE(doc["passed"].get<bool>());
  EXPECT_GT(doc["checks"].size(), 5u);
}

TEST(Cli, MotifRoundTripsBitwise) {
  RunConfig cfg;
  cfg.command = Command::Motif;
  cfg.motif_kind = "path";
  cfg.motif_n = 8;
  cfg.motif_a = 0.7;
  cfg.motif_d = {1, 1, 10, 1, 1, 1, 1, 0.1};
  cfg.output_path = temp_path("motif.json");
  ASSERT_EQ(run(cfg).code, 0);
  const auto g = load_graph_file(cfg.output_path);
  MotifSpec s;
  s.kind = MotifKind::Path;
  s.n = 8;
  s.a = 0.7;
  s.d = Eigen::Map<const Vector>(cfg.motif_d.data(), 8);
  const auto expected = motif_graph(s);
  EXPECT_EQ(g.adjacency(), expected.adjacency());
  EXPECT_EQ(g.absorption(), expected.absorption());
}

TEST(Cli, MotifRejectsBadSpec) {
  RunConfig cfg;
  cfg.command = Command::Motif;
  cfg.motif_kind = "star";
  cfg.motif_n = 2;
  EXPECT_EQ(run(cfg).code, 2);
  cfg.motif_kind = "wheel";
  cfg.motif_n = 5;
  EXPECT_EQ(run(cfg).code, 2);
}

TEST(Cli, DeterministicAcrossRuns) {
  std::mt19937_64 rng(85);
  const auto path = write_graph("det.json", ts::random_balanced_graph(rng, 7));
  const auto first = run(config(Command::Partition, path));
  for (int k = 0; k < 3; ++k) {
    const auto again = run(config(Command::Partition, path));
    EXPECT_EQ(again.code, first.code);
    EXPECT_EQ(again.out, first.out);
  }
}
