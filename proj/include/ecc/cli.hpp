#pragma once

// Command-line driver: solve, estimate and bench subcommands.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecc/combinatorial.hpp"
#include "ecc/hypergraph.hpp"
#include "ecc/relaxations.hpp"
#include "ecc/report.hpp"
#include "ecc/rounding.hpp"

namespace ecc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct SolveOptions {
  std::string problem;
  std::string algorithm;
  std::optional<double> p;
  std::optional<double> rho;
  std::optional<double> budget;
  std::optional<double> tau;
  std::optional<double> t;
  std::optional<std::size_t> protected_color;  // 1-based
  std::uint64_t seed = 0;
  bool timing = false;
};

inline double parse_p(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Inf") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("--p must be a positive number or inf");
  }
  if (pos != s.size() || !(v > 0.0) || std::isnan(v)) throw UsageError("--p must be a positive number or inf");
  return v;
}

// Rejects flag combinations that the chosen pipeline would ignore or cannot run.
inline void validate_solve_options(const SolveOptions& o) {
  const std::string& pr = o.problem;
  const std::string& alg = o.algorithm;
  const auto allowed = [&](std::initializer_list<const char*> algs) {
    for (const char* a : algs)
      if (alg == a) return true;
    return false;
  };
  bool ok = false;
  if (pr == "max") ok = allowed({"hyper-max", "graph-max", "brute"});
  else if (pr == "min") ok = allowed({"lp-round", "matching", "fpt", "brute"});
  else if (pr == "pmean") ok = allowed({"lp-round", "lovasz", "brute"});
  else if (pr == "colorfair") ok = allowed({"lp-round", "matching", "fpt", "brute"});
  else if (pr == "protected") ok = allowed({"lp-round", "fpt", "brute"});
  else throw UsageError("unknown problem '" + pr + "'");
  if (!ok) throw UsageError("algorithm '" + alg + "' is not available for problem '" + pr + "'");

  if (o.p && pr != "pmean") throw UsageError("--p requires --problem pmean");
  if (pr == "pmean") {
    if (!o.p) throw UsageError("--problem pmean requires --p");
    if (alg == "lp-round" && *o.p < 1.0) throw UsageError("--alg lp-round needs p >= 1; use --alg lovasz for p < 1");
    if (alg == "lovasz" && !(*o.p < 1.0)) throw UsageError("--alg lovasz needs 0 < p < 1");
  }
  if (o.rho && !(pr == "protected" && alg == "lp-round"))
    throw UsageError("--rho requires --problem protected --alg lp-round");
  if (o.rho && !(*o.rho > 0.0 && *o.rho <= 0.5)) throw UsageError("--rho must lie in (0, 0.5]");
  if (o.budget && pr != "protected") throw UsageError("--budget requires --problem protected");
  if (o.protected_color && pr != "protected") throw UsageError("--protected-color requires --problem protected");
  if (pr == "protected") {
    if (!o.protected_color) throw UsageError("--problem protected requires --protected-color");
    if (!o.budget) throw UsageError("--problem protected requires --budget");
  }
  if (o.tau && !(pr == "colorfair" && alg == "fpt")) throw UsageError("--tau requires --problem colorfair --alg fpt");
  if (pr == "colorfair" && alg == "fpt" && !o.tau) throw UsageError("--alg fpt on colorfair requires --tau");
  if (o.t && !(alg == "fpt" && (pr == "min" || pr == "protected")))
    throw UsageError("--t requires --alg fpt with --problem min or protected");
  if (alg == "fpt" && (pr == "min" || pr == "protected") && !o.t) throw UsageError("--alg fpt requires --t");
  for (const auto& v : {o.budget, o.tau, o.t})
    if (v && !(*v >= 0.0)) throw UsageError("budgets must be nonnegative");
  if (o.protected_color && *o.protected_color == 0) throw UsageError("--protected-color is 1-based");
}

inline Problem problem_of(const SolveOptions& o) {
  if (o.problem == "max") return Problem::max();
  if (o.problem == "min") return Problem::min();
  if (o.problem == "pmean") return Problem::pmean(*o.p);
  if (o.problem == "colorfair") return Problem::colorfair();
  return Problem::protected_problem(*o.protected_color - 1, o.budget);
}

inline void fill_outcome(RunReport& r, const Hypergraph& h, const Coloring& lam, const Problem& problem) {
  const ObjectiveValue val = objective(h, lam, problem);
  r.objective = val.value;
  r.protected_unsatisfied = val.protected_unsatisfied;
  r.color_error_vector = color_error_vector(h, lam);
  r.coloring.clear();
  for (ColorId c : lam) r.coloring.push_back(c + 1);
  if (r.relaxation_bound) r.approx_ratio_upper_bound = approx_ratio(val.value, *r.relaxation_bound, problem.minimizes());
}

// Runs one solve pipeline; status "infeasible" when a decision procedure says no.
inline RunReport run_solve(const Hypergraph& h, const SolveOptions& o) {
  validate_solve_options(o);
  if (o.protected_color && *o.protected_color > h.color_count())
    throw UsageError("--protected-color exceeds the number of colors");
  const auto start = std::chrono::steady_clock::now();
  const Problem problem = problem_of(o);
  RunReport r;
  r.problem = o.problem;
  r.algorithm = o.algorithm;
  r.p = o.p;
  r.protected_color = o.protected_color;
  r.budget = o.budget;
  r.master_seed = o.seed;

  std::optional<Coloring> lam;
  const std::string& alg = o.algorithm;
  if (alg == "hyper-max" || alg == "graph-max") {
    if (alg == "graph-max" && h.rank() != 2)
      for (const Edge& e : h.edges())
        if (e.nodes.size() != 2) throw UsageError("graph-max requires every edge to have exactly two nodes");
    const FractionalSolution frac = solve_maxecc_relaxation(h);
    RandomSource::Stream rng = RandomSource(o.seed).stream(0);
    lam = alg == "hyper-max" ? hyper_maxecc_round(h, frac, rng) : graph_maxecc_round(h, frac, rng);
    r.relaxation_bound = frac.bound;
    r.trials = 1;
  } else if (alg == "lp-round" && o.problem == "protected") {
    const ColorId c1 = *o.protected_color - 1;
    const auto frac = solve_protected_relaxation(h, c1, *o.budget);
    if (frac) {
      lam = protected_round(h, *frac, c1, o.rho.value_or(0.5));
      r.relaxation_bound = frac->bound;
    }
  } else if (alg == "lp-round") {
    const double p = o.problem == "min" ? 1.0
                     : o.problem == "colorfair" ? std::numeric_limits<double>::infinity()
                                                : *o.p;
    const FractionalSolution frac = solve_pmean_relaxation(h, p);
    lam = half_threshold_round(h, frac);
    r.relaxation_bound = frac.bound;
    if (frac.gap > 0.0) {
      std::ostringstream note;
      note << "frank-wolfe duality gap " << std::setprecision(17) << frac.gap;
      r.notes.push_back(note.str());
    }
  } else if (alg == "lovasz") {
    const LovaszResult res = minimize_lovasz(h, *o.p);
    lam = lovasz_round(h, res.gamma);
    r.relaxation_bound = std::pow(std::max(0.0, res.lower_bound), 1.0 / *o.p);
    if (!res.polished) r.notes.push_back("cutting-plane polish did not close the gap");
    if (!res.restored_by_projection) r.notes.push_back("cyclic projection hit its pass cap; cover restored by exact repair");
  } else if (alg == "matching") {
    lam = matching_k_approx(h).coloring;
  } else if (alg == "fpt") {
    if (o.problem == "colorfair") lam = fpt_colorfair(h, *o.tau);
    else if (o.problem == "min") lam = fpt_protected(h, *o.t, *o.t, 0);
    else lam = fpt_protected(h, *o.t, *o.budget, *o.protected_color - 1);
  } else if (alg == "brute") {
    try {
      lam = brute_force(h, problem).witness;
    } catch (const Error& e) {
      if (std::string(e.what()).find("no feasible") == std::string::npos) throw;
    }
  }

  if (lam) fill_outcome(r, h, *lam, problem);
  else r.status = "infeasible";
  if (o.timing) r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

struct EstimateRow {
  EdgeId edge = 0;
  double z = 0.0;
  double floor = 0.0;
  double frequency = 0.0;
  double standard_error = 0.0;
  bool pass = false;
};

// Per-edge check: frequency >= floor - 3 SE.
inline std::vector<EstimateRow> estimate_rows(const Hypergraph& h, const FractionalSolution& frac,
                                              const SatisfactionEstimate& est, Scheme scheme) {
  const double factor = guarantee_factor(scheme, h.rank());
  std::vector<EstimateRow> rows;
  for (EdgeId e = 0; e < h.edge_count(); ++e) {
    EstimateRow row{e, frac.edge_value[e], factor * frac.edge_value[e], est.frequency[e], est.standard_error[e]};
    row.pass = row.frequency >= row.floor - 3.0 * row.standard_error;
    rows.push_back(row);
  }
  return rows;
}

inline std::string format_estimate(const std::vector<EstimateRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(17) << "edge,z,floor,frequency,standard_error,pass\n";
  for (const EstimateRow& r : rows)
    os << r.edge << ',' << r.z << ',' << r.floor << ',' << r.frequency << ',' << r.standard_error << ','
       << (r.pass ? "pass" : "fail") << '\n';
  return os.str();
}

struct BenchRow {
  double fraction = 0.0;
  double budget = 0.0;
  double total_unsatisfied = 0.0;
  double protected_unsatisfied = 0.0;
  double bound = 0.0;
  std::optional<double> violation_factor;
};

inline std::vector<BenchRow> run_bench(const Hypergraph& h, ColorId c1, std::span<const double> fractions, double rho) {
  if (c1 >= h.color_count()) throw UsageError("--protected-color exceeds the number of colors");
  const std::size_t class_size = h.edges_of_color(c1).size();
  if (class_size == 0) throw UsageError("protected color class is empty");
  std::vector<BenchRow> rows;
  for (double phi : fractions) {
    if (!(phi >= 0.0)) throw UsageError("fractions must be nonnegative");
    BenchRow row;
    row.fraction = phi;
    row.budget = std::ceil(phi * static_cast<double>(class_size));
    const auto frac = solve_protected_relaxation(h, c1, row.budget);
    if (!frac) throw Error("protected relaxation infeasible");
    const Coloring lam = protected_round(h, *frac, c1, rho);
    const ObjectiveValue val = objective(h, lam, Problem::protected_problem(c1));
    row.total_unsatisfied = val.value;
    row.protected_unsatisfied = *val.protected_unsatisfied;
    row.bound = frac->bound;
    if (row.budget > 0.0) row.violation_factor = row.protected_unsatisfied / row.budget;
    rows.push_back(row);
  }
  return rows;
}

inline std::string format_bench(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(17) << "fraction,budget,total_unsatisfied,protected_unsatisfied,bound,violation_factor\n";
  for (const BenchRow& r : rows) {
    os << r.fraction << ',' << r.budget << ',' << r.total_unsatisfied << ',' << r.protected_unsatisfied << ','
       << r.bound << ',';
    if (r.violation_factor) os << *r.violation_factor;
    os << '\n';
  }
  return os.str();
}

namespace detail {

inline Hypergraph load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open input file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

inline void emit(const std::string& text, const std::string& output, std::ostream& out) {
  if (output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(output, std::ios::binary);
  if (!f) throw UsageError("cannot open output file '" + output + "'");
  f << text;
}

}  // namespace detail

// args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Edge-colored hypergraph clustering solvers"};
  app.require_subcommand(1);

  SolveOptions so;
  std::string p_text, input, output, format = "json";
  double rho = 0.5;
  auto* solve = app.add_subcommand("solve", "Solve an instance and print a report");
  solve->add_option("--problem", so.problem)->required()->check(
      CLI::IsMember({"max", "min", "pmean", "colorfair", "protected"}));
  solve->add_option("--alg", so.algorithm)->required()->check(
      CLI::IsMember({"lp-round", "hyper-max", "graph-max", "matching", "fpt", "brute", "lovasz"}));
  auto* p_opt = solve->add_option("--p", p_text);
  auto* rho_opt = solve->add_option("--rho", rho);
  solve->add_option("--budget", so.budget);
  solve->add_option("--tau", so.tau);
  solve->add_option("--t", so.t);
  solve->add_option("--protected-color", so.protected_color);
  solve->add_option("--input", input)->required();
  solve->add_option("--output", output);
  solve->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  solve->add_option("--seed", so.seed);
  solve->add_flag("--timing", so.timing, "Include wall_time (breaks byte-identical output)");

  std::string scheme;
  std::size_t trials = 20000;
  std::uint64_t seed = 0;
  auto* estimate = app.add_subcommand("estimate", "Monte-Carlo check of per-edge satisfaction");
  estimate->add_option("--scheme", scheme)->required()->check(CLI::IsMember({"hyper", "graph"}));
  estimate->add_option("--trials", trials);
  estimate->add_option("--seed", seed);
  estimate->add_option("--input", input)->required();
  estimate->add_option("--output", output);

  std::string bench_problem;
  std::size_t bench_color = 0;
  std::vector<double> fractions;
  auto* bench = app.add_subcommand("bench", "Budget sweep for the protected-color problem");
  bench->add_option("--problem", bench_problem)->required()->check(CLI::IsMember({"protected"}));
  bench->add_option("--protected-color", bench_color)->required();
  bench->add_option("--fractions", fractions)->required()->delimiter(',');
  bench->add_option("--rho", rho);
  bench->add_option("--input", input)->required();
  bench->add_option("--output", output);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve->parsed()) {
      if (!p_opt->empty()) so.p = parse_p(p_text);
      if (!rho_opt->empty()) so.rho = rho;
      validate_solve_options(so);
      const Hypergraph h = detail::load_instance(input);
      const RunReport r = run_solve(h, so);
      detail::emit(format == "csv" ? to_csv(r) : to_json(r), output, out);
      return r.status == "infeasible" ? kExitInfeasible : kExitOk;
    }
    if (estimate->parsed()) {
      if (trials == 0) throw UsageError("--trials must be at least 1");
      const Hypergraph h = detail::load_instance(input);
      const Scheme sch = scheme == "graph" ? Scheme::graph : Scheme::hyper;
      if (sch == Scheme::graph)
        for (const Edge& e : h.edges())
          if (e.nodes.size() != 2) throw UsageError("graph scheme requires every edge to have exactly two nodes");
      const FractionalSolution frac = solve_maxecc_relaxation(h);
      const SatisfactionEstimate est = estimate_satisfaction(h, frac, sch, trials, seed);
      detail::emit(format_estimate(estimate_rows(h, frac, est, sch)), output, out);
      return kExitOk;
    }
    if (bench->parsed()) {
      if (bench_color == 0) throw UsageError("--protected-color is 1-based");
      if (!(rho > 0.0 && rho <= 0.5)) throw UsageError("--rho must lie in (0, 0.5]");
      const Hypergraph h = detail::load_instance(input);
      detail::emit(format_bench(run_bench(h, bench_color - 1, fractions, rho)), output, out);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ecc
