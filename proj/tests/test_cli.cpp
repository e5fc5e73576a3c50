#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ecc/cli.hpp"
#include "test_support.hpp"

using namespace ecc;

namespace {

const std::string kTriangle = std::string(ECC_SAMPLES_DIR) + "/triangle.ecc";

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(CliSolve, MinLpRoundOnTriangle) {
  const CliRun r = cli({"solve", "--problem", "min", "--alg", "lp-round", "--input", kTriangle});
  ASSERT_EQ(r.code, 0) << r.err;
  const RunReport rep = report_from_json(r.out);
  EXPECT_NEAR(*rep.relaxation_bound, 1.5, 1e-7);
  EXPECT_LE(*rep.objective, 3.0);
  EXPECT_LE(*rep.approx_ratio_upper_bound, 2.0 + 1e-9);
  EXPECT_GE(*rep.approx_ratio_upper_bound, 1.0 - 1e-9);
}

TEST(CliSolve, ColorfairMatching) {
  const CliRun r = cli({"solve", "--problem", "colorfair", "--alg", "matching", "--input", kTriangle});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(*report_from_json(r.out).objective, 1.0);
}

TEST(CliSolve, FptInfeasibleExitsTwo) {
  const CliRun r = cli({"solve", "--problem", "colorfair", "--alg", "fpt", "--tau", "0", "--input", kTriangle});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(report_from_json(r.out).status, "infeasible");
}

TEST(CliSolve, RejectsBadCombinationsBeforeReadingInput) {
  // The input path does not exist; a usage error must win.
  const std::string missing = "/nonexistent/instance.ecc";
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"solve", "--problem", "min", "--alg", "lp-round", "--rho", "0.3", "--input", missing},
           {"solve", "--problem", "max", "--alg", "lp-round", "--input", missing},
           {"solve", "--problem", "pmean", "--alg", "lp-round", "--input", missing},
           {"solve", "--problem", "pmean", "--p", "0.5", "--alg", "lp-round", "--input", missing},
           {"solve", "--problem", "min", "--alg", "lp-round", "--budget", "1", "--input", missing},
           {"solve", "--problem", "colorfair", "--alg", "fpt", "--input", missing},
           {"solve", "--problem", "protected", "--alg", "lp-round", "--budget", "1", "--input", missing},
       }) {
    const CliRun r = cli(args);
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.find("cannot open"), std::string::npos) << r.err;
  }
  EXPECT_EQ(cli({"solve", "--problem", "bogus", "--alg", "brute", "--input", kTriangle}).code, 1);
  EXPECT_EQ(cli({"solve", "--problem", "min", "--alg", "brute", "--input", missing}).code, 1);
}

TEST(CliSolve, ParseErrorExitsOne) {
  const std::string path = write_temp("ecc_bad.ecc", "2 1 1\n1 1.0 2 1 3\n");
  const CliRun r = cli({"solve", "--problem", "min", "--alg", "brute", "--input", path});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("node out of range, line 2"), std::string::npos);
}

TEST(CliSolve, EveryPipelineRevalidates) {
  std::mt19937_64 rng(131);
  const std::vector<std::vector<std::string>> pipelines{
      {"--problem", "max", "--alg", "hyper-max", "--seed", "5"},
      {"--problem", "max", "--alg", "brute"},
      {"--problem", "min", "--alg", "lp-round"},
      {"--problem", "min", "--alg", "matching"},
      {"--problem", "min", "--alg", "fpt", "--t", "3"},
      {"--problem", "min", "--alg", "brute"},
      {"--problem", "pmean", "--p", "2", "--alg", "lp-round"},
      {"--problem", "pmean", "--p", "inf", "--alg", "lp-round"},
      {"--problem", "pmean", "--p", "0.5", "--alg", "lovasz"},
      {"--problem", "pmean", "--p", "0.5", "--alg", "brute"},
      {"--problem", "colorfair", "--alg", "lp-round"},
      {"--problem", "colorfair", "--alg", "fpt", "--tau", "2"},
      {"--problem", "protected", "--protected-color", "1", "--budget", "1", "--alg", "lp-round", "--rho", "0.25"},
      {"--problem", "protected", "--protected-color", "1", "--budget", "1", "--alg", "fpt", "--t", "4"},
      {"--problem", "protected", "--protected-color", "1", "--budget", "1", "--alg", "brute"},
  };
  for (int i = 0; i < 6; ++i) {
    const Hypergraph h = ecc_test::random_instance(rng, {.n_max = 6, .k_max = 3, .weight_max = 2});
    const std::string path = write_temp("ecc_rand_" + std::to_string(i) + ".ecc", format_instance(h));
    for (const auto& pl : pipelines) {
      std::vector<std::string> args{"solve"};
      args.insert(args.end(), pl.begin(), pl.end());
      args.insert(args.end(), {"--input", path});
      const CliRun r = cli(args);
      ASSERT_TRUE(r.code == 0 || r.code == 2) << r.err;
      const RunReport rep = report_from_json(r.out);
      EXPECT_EQ(report_from_json(to_json(rep)), rep);
      if (r.code == 2) continue;
      Coloring lam;
      for (std::size_t c : rep.coloring) lam.push_back(c - 1);
      SolveOptions so;
      so.problem = rep.problem;
      so.p = rep.p;
      so.protected_color = rep.protected_color;
      so.budget = rep.budget;
      const ObjectiveValue v = objective(h, lam, problem_of(so));
      EXPECT_EQ(v.value, *rep.objective);
      EXPECT_EQ(v.protected_unsatisfied, rep.protected_unsatisfied);
      EXPECT_EQ(color_error_vector(h, lam), rep.color_error_vector);
    }
  }
}

TEST(CliSolve, CsvFormat) {
  const CliRun r = cli({"solve", "--problem", "min", "--alg", "brute", "--format", "csv", "--input", kTriangle});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, 18), "problem,algorithm,");
  EXPECT_NE(r.out.find("\nmin,brute,ok,"), std::string::npos);
  EXPECT_NE(r.out.find(",1;1;1,"), std::string::npos);
}

TEST(CliSolve, OutputFileAndTiming) {
  const auto path = (std::filesystem::temp_directory_path() / "ecc_report.json").string();
  const CliRun r = cli({"solve", "--problem", "min", "--alg", "brute", "--timing", "--input", kTriangle, "--output", path});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_TRUE(report_from_json(buf.str()).wall_time.has_value());
}

TEST(CliEstimate, TriangleSchemesPass) {
  for (const char* scheme : {"hyper", "graph"}) {
    const CliRun r = cli({"estimate", "--scheme", scheme, "--trials", "20000", "--seed", "7", "--input", kTriangle});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.find("fail"), std::string::npos) << r.out;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
  }
  const CliRun g = cli({"estimate", "--scheme", "graph", "--trials", "100", "--seed", "7", "--input", kTriangle});
  EXPECT_NE(g.out.find(",0.5,0.19012345679012346,"), std::string::npos) << g.out;
}

TEST(CliEstimate, GraphSchemeRejectsHyperedges) {
  const std::string path = write_temp("ecc_rank3.ecc", "3 1 1\n1 1 3 1 2 3\n");
  const CliRun r = cli({"estimate", "--scheme", "graph", "--trials", "10", "--seed", "1", "--input", path});
  EXPECT_EQ(r.code, 1);
}

TEST(CliEstimate, ByteIdentical) {
  const std::vector<std::string> args{"estimate", "--scheme", "hyper", "--trials", "3000", "--seed", "11", "--input", kTriangle};
  EXPECT_EQ(cli(args).out, cli(args).out);
}

TEST(CliBench, TriangleSweep) {
  const CliRun r = cli({"bench", "--problem", "protected", "--protected-color", "1", "--fractions", "0,1", "--rho", "0.5",
                     "--input", kTriangle});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "fraction,budget,total_unsatisfied,protected_unsatisfied,bound,violation_factor");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    const double b = std::stod(cells[1]);
    const double prot = std::stod(cells[3]);
    EXPECT_LE(prot, 2.0 * b + 1e-9);
    EXPECT_LE(prot, 1.0);
    if (b > 0) EXPECT_LE(std::stod(cells[5]), 2.0 + 1e-9);
  }
  EXPECT_EQ(rows, 2);
}

TEST(CliBench, ConflictFreeAndEmptyClass) {
  const std::string path = write_temp("ecc_free.ecc", "3 2 2\n1 1 2 1 2\n2 1 1 3\n");
  const CliRun r = cli({"bench", "--problem", "protected", "--protected-color", "1", "--fractions", "0,0.5,1", "--input", path});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) EXPECT_NE(line.find(",0,0,0,"), std::string::npos) << line;
  const std::string empty = write_temp("ecc_empty.ecc", "2 1 2\n1 1 2 1 2\n");
  EXPECT_EQ(cli({"bench", "--problem", "protected", "--protected-color", "2", "--fractions", "0", "--input", empty}).code, 1);
}

TEST(CliBinary, ExitCodes) {
  const std::string bin = ECC_CLI_PATH;
  EXPECT_EQ(std::system((bin + " solve --problem min --alg brute --input " + kTriangle + " > /dev/null").c_str()), 0);
  const int infeasible =
      std::system((bin + " solve --problem colorfair --alg fpt --tau 0 --input " + kTriangle + " > /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(infeasible), 2);
  const int usage = std::system((bin + " solve --problem min 2> /dev/null > /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(usage), 1);
}

TEST(Report, JsonRoundTrip) {
  RunReport r;
  r.problem = "pmean";
  r.algorithm = "lp-round";
  r.p = std::numeric_limits<double>::infinity();
  r.objective = 0.1 + 0.2;
  r.color_error_vector = {1.0 / 3.0, 2.0};
  r.relaxation_bound = 1e-300;
  r.approx_ratio_upper_bound = approx_ratio(*r.objective, *r.relaxation_bound, true);
  r.coloring = {1, 2, 3};
  r.master_seed = std::numeric_limits<std::uint64_t>::max();
  r.trials = 5;
  r.notes = {"x"};
  EXPECT_EQ(report_from_json(to_json(r)), r);
  EXPECT_THROW(report_from_json("{"), Error);
}

TEST(Report, RatioConvention) {
  EXPECT_EQ(approx_ratio(3.0, 1.5, true), 2.0);
  EXPECT_EQ(approx_ratio(1.0, 1.5, false), 1.5);
  EXPECT_FALSE(approx_ratio(0.0, 0.0, true).has_value());
  EXPECT_FALSE(approx_ratio(0.0, 0.0, false).has_value());
}
