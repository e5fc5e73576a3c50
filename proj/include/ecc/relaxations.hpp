#pragma once

// LP and convex relaxations of the ECC variants, and the maps from solver
// output back onto the instance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ecc/hypergraph.hpp"
#include "ecc/lp.hpp"

namespace ecc {

enum class Orientation {
  assignment,  // x_v^c and z_e, as in the MaxECC program
  distance,    // d_v^c = 1 - x_v^c and gamma_e = 1 - z_e
};

struct FractionalSolution {
  Orientation orientation = Orientation::assignment;
  std::size_t node_count = 0;
  std::size_t color_count = 0;
  // Row-major node_count x color_count.
  std::vector<double> node_color;
  std::vector<double> edge_value;
  // Value of the relaxation at this point.
  double bound = 0.0;
  // Certified distance to the relaxation optimum (0 for exact LP solves).
  double gap = 0.0;

  double at(NodeId v, ColorId c) const { return node_color.at(v * color_count + c); }
  std::span<const double> row(NodeId v) const {
    return std::span<const double>(node_color).subspan(v * color_count, color_count);
  }
};

// Fallback color per node: argmax x (assignment) or argmin d (distance),
// lowest index on ties.
inline std::vector<ColorId> fractional_fallback(const FractionalSolution& frac) {
  std::vector<ColorId> out(frac.node_count, 0);
  for (NodeId v = 0; v < frac.node_count; ++v) {
    auto row = frac.row(v);
    const auto it = frac.orientation == Orientation::assignment ? std::max_element(row.begin(), row.end())
                                                                : std::min_element(row.begin(), row.end());
    out[v] = static_cast<ColorId>(it - row.begin());
  }
  return out;
}

// Largest violation of the housed invariants of frac against h.
inline double structural_violation(const Hypergraph& h, const FractionalSolution& frac) {
  double worst = 0.0;
  const double k = static_cast<double>(h.color_count());
  for (NodeId v = 0; v < h.node_count(); ++v) {
    double s = 0.0;
    for (double x : frac.row(v)) s += x;
    if (frac.orientation == Orientation::assignment) worst = std::max(worst, std::abs(s - 1.0));
    else worst = std::max(worst, (k - 1.0) - s);
  }
  for (EdgeId e = 0; e < h.edge_count(); ++e) {
    const ColorId c = h.color(e);
    for (NodeId v : h.edge(e).nodes) {
      if (frac.orientation == Orientation::assignment) worst = std::max(worst, frac.edge_value[e] - frac.at(v, c));
      else worst = std::max(worst, frac.at(v, c) - frac.edge_value[e]);
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// MaxECC

struct AssignmentLayout {
  std::size_t nodes = 0, colors = 0, edges = 0;
  std::size_t x(NodeId v, ColorId c) const { return v * colors + c; }
  std::size_t z(EdgeId e) const { return nodes * colors + e; }
  std::size_t size() const { return nodes * colors + edges; }
};

struct MaxEccProgram {
  LinearProgram lp;
  AssignmentLayout layout;
};

// max sum w_e z_e  s.t.  sum_c x_v^c = 1,  z_e <= x_v^{l(e)} for v in e,  all in [0,1].
inline MaxEccProgram build_maxecc_lp(const Hypergraph& h) {
  AssignmentLayout L{h.node_count(), h.color_count(), h.edge_count()};
  LinearProgram lp(L.size(), Sense::maximize);
  for (EdgeId e = 0; e < h.edge_count(); ++e) lp.objective[L.z(e)] = h.weight(e);
  for (NodeId v = 0; v < h.node_count(); ++v) {
    std::vector<std::pair<std::size_t, double>> terms;
    for (ColorId c = 0; c < h.color_count(); ++c) terms.emplace_back(L.x(v, c), 1.0);
    lp.add_row(terms, Relation::equal, 1.0);
  }
  for (EdgeId e = 0; e < h.edge_count(); ++e)
    for (NodeId v : h.edge(e).nodes) lp.add_row({{L.z(e), 1.0}, {L.x(v, h.color(e)), -1.0}}, Relation::less_equal, 0.0);
  return {std::move(lp), L};
}

inline FractionalSolution solve_maxecc_relaxation(const Hypergraph& h) {
  const MaxEccProgram prog = build_maxecc_lp(h);
  const LpSolution sol = solve_lp(prog.lp);
  if (sol.status != LpStatus::optimal) throw Error("MaxECC relaxation did not solve to optimality");
  const AssignmentLayout& L = prog.layout;
  FractionalSolution frac;
  frac.orientation = Orientation::assignment;
  frac.node_count = h.node_count();
  frac.color_count = h.color_count();
  frac.node_color.assign(sol.values.begin(), sol.values.begin() + static_cast<std::ptrdiff_t>(L.nodes * L.colors));
  frac.edge_value.resize(h.edge_count());
  // Raise every z_e to its cap; only zero-weight edges can move.
  for (EdgeId e = 0; e < h.edge_count(); ++e) {
    double cap = 1.0;
    for (NodeId v : h.edge(e).nodes) cap = std::min(cap, frac.at(v, h.color(e)));
    frac.edge_value[e] = cap;
  }
  frac.bound = sol.objective_value;
  return frac;
}

// ---------------------------------------------------------------------------
// Distance programs (p-mean, protected color)

struct DistanceLayout {
  std::size_t nodes = 0, colors = 0, edges = 0;
  // Extra variables after d and gamma: per-color m_c, or a single t.
  std::size_t extra = 0;
  std::size_t d(NodeId v, ColorId c) const { return v * colors + c; }
  std::size_t gamma(EdgeId e) const { return nodes * colors + e; }
  std::size_t extra_var(std::size_t i) const { return nodes * colors + edges + i; }
  std::size_t size() const { return nodes * colors + edges + extra; }
};

namespace detail {

inline void add_distance_rows(LinearProgram& lp, const Hypergraph& h, const DistanceLayout& L) {
  const double k = static_cast<double>(h.color_count());
  for (NodeId v = 0; v < h.node_count(); ++v) {
    std::vector<std::pair<std::size_t, double>> terms;
    for (ColorId c = 0; c < h.color_count(); ++c) terms.emplace_back(L.d(v, c), 1.0);
    lp.add_row(terms, Relation::greater_equal, k - 1.0);
  }
  for (EdgeId e = 0; e < h.edge_count(); ++e)
    for (NodeId v : h.edge(e).nodes)
      lp.add_row({{L.d(v, h.color(e)), 1.0}, {L.gamma(e), -1.0}}, Relation::less_equal, 0.0);
}

inline std::vector<std::pair<std::size_t, double>> color_mass_terms(const Hypergraph& h, const DistanceLayout& L,
                                                                    ColorId c, double scale) {
  std::vector<std::pair<std::size_t, double>> terms;
  for (EdgeId e : h.edges_of_color(c)) terms.emplace_back(L.gamma(e), scale * h.weight(e));
  return terms;
}

inline FractionalSolution distance_solution(const Hypergraph& h, const DistanceLayout& L,
                                            std::span<const double> values) {
  FractionalSolution frac;
  frac.orientation = Orientation::distance;
  frac.node_count = h.node_count();
  frac.color_count = h.color_count();
  frac.node_color.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(L.nodes * L.colors));
  frac.edge_value.assign(values.begin() + static_cast<std::ptrdiff_t>(L.gamma(0)),
                         values.begin() + static_cast<std::ptrdiff_t>(L.gamma(0) + L.edges));
  return frac;
}

}  // namespace detail

// Per-color unsatisfied mass m_c = sum_{e in E_c} w_e gamma_e.
inline std::vector<double> color_masses(const Hypergraph& h, std::span<const double> gamma) {
  std::vector<double> m(h.color_count(), 0.0);
  for (EdgeId e = 0; e < h.edge_count(); ++e) m[h.color(e)] += h.weight(e) * gamma[e];
  return m;
}

struct PmeanProgram {
  // For p = 1 and p = inf the objective of lp is the relaxation; otherwise
  // lp only describes the region and `oracle` is the objective.
  LinearProgram lp;
  DistanceLayout layout;
  double p = 1.0;
  std::optional<ConvexObjectiveOracle> oracle;
};

// Value and gradient of (sum_c m_c^p)^(1/p) with respect to the m_c block of
// a point laid out by L; the gradient is zero at m = 0.
inline OracleValue lp_norm_oracle(const DistanceLayout& L, double p, std::span<const double> point) {
  OracleValue out;
  out.gradient.assign(L.size(), 0.0);
  double s = 0.0;
  for (std::size_t c = 0; c < L.colors; ++c) s += std::pow(std::max(0.0, point[L.extra_var(c)]), p);
  out.value = std::pow(s, 1.0 / p);
  if (out.value <= 0.0) return out;
  for (std::size_t c = 0; c < L.colors; ++c) {
    const double mc = std::max(0.0, point[L.extra_var(c)]);
    out.gradient[L.extra_var(c)] = std::pow(mc / out.value, p - 1.0);
  }
  return out;
}

inline PmeanProgram build_pmean_program(const Hypergraph& h, double p) {
  if (std::isnan(p) || p < 1.0) throw Error("p-mean relaxation requires p >= 1 (use the Lovasz route for p < 1)");
  DistanceLayout L{h.node_count(), h.color_count(), h.edge_count(), 0};
  PmeanProgram prog;
  prog.p = p;
  if (p == 1.0) {
    prog.lp = LinearProgram(L.size(), Sense::minimize);
    for (EdgeId e = 0; e < h.edge_count(); ++e) prog.lp.objective[L.gamma(e)] = h.weight(e);
    detail::add_distance_rows(prog.lp, h, L);
  } else if (std::isinf(p)) {
    L.extra = 1;
    prog.lp = LinearProgram(L.size(), Sense::minimize);
    const std::size_t t = L.extra_var(0);
    prog.lp.objective[t] = 1.0;
    prog.lp.upper[t] = std::max(1.0, h.total_weight());
    detail::add_distance_rows(prog.lp, h, L);
    for (ColorId c = 0; c < h.color_count(); ++c) {
      auto terms = detail::color_mass_terms(h, L, c, -1.0);
      terms.emplace_back(t, 1.0);
      prog.lp.add_row(terms, Relation::greater_equal, 0.0);
    }
  } else {
    L.extra = h.color_count();
    prog.lp = LinearProgram(L.size(), Sense::minimize);
    detail::add_distance_rows(prog.lp, h, L);
    for (ColorId c = 0; c < h.color_count(); ++c) {
      prog.lp.upper[L.extra_var(c)] = std::max(1.0, h.color_weight(c));
      auto terms = detail::color_mass_terms(h, L, c, -1.0);
      terms.emplace_back(L.extra_var(c), 1.0);
      prog.lp.add_row(terms, Relation::equal, 0.0);
    }
    prog.oracle = [L, p](std::span<const double> x) { return lp_norm_oracle(L, p, x); };
  }
  prog.layout = L;
  return prog;
}

// Relaxed p-mean program for p >= 1 (p may be +infinity).
inline FractionalSolution solve_pmean_relaxation(const Hypergraph& h, double p, const FrankWolfeOptions& fw = {}) {
  const PmeanProgram prog = build_pmean_program(h, p);
  FractionalSolution frac;
  if (!prog.oracle) {
    const LpSolution sol = solve_lp(prog.lp);
    if (sol.status != LpStatus::optimal) throw Error("p-mean relaxation did not solve to optimality");
    frac = detail::distance_solution(h, prog.layout, sol.values);
    frac.bound = sol.objective_value;
  } else {
    const FrankWolfeResult res = frank_wolfe_minimize(prog.lp, *prog.oracle, fw);
    frac = detail::distance_solution(h, prog.layout, res.point);
    // Evaluate directly from gamma so the bound matches the returned point.
    frac.bound = pmean_norm(color_masses(h, frac.edge_value), p);
    frac.gap = res.gap;
  }
  return frac;
}

// min sum w_e gamma_e  with distance rows and  sum_{e in E_c1} w_e gamma_e <= b.
inline std::pair<LinearProgram, DistanceLayout> build_protected_lp(const Hypergraph& h, ColorId c1, double b) {
  if (c1 >= h.color_count()) throw Error("protected color out of range");
  if (std::isnan(b) || b < 0.0) throw Error("protected budget must be nonnegative");
  DistanceLayout L{h.node_count(), h.color_count(), h.edge_count(), 0};
  LinearProgram lp(L.size(), Sense::minimize);
  for (EdgeId e = 0; e < h.edge_count(); ++e) lp.objective[L.gamma(e)] = h.weight(e);
  detail::add_distance_rows(lp, h, L);
  lp.add_row(detail::color_mass_terms(h, L, c1, 1.0), Relation::less_equal, b);
  return {std::move(lp), L};
}

// Returns nullopt when the LP is infeasible.
inline std::optional<FractionalSolution> solve_protected_relaxation(const Hypergraph& h, ColorId c1, double b) {
  const auto [lp, L] = build_protected_lp(h, c1, b);
  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::infeasible) return std::nullopt;
  if (sol.status != LpStatus::optimal) throw Error("protected-color LP did not solve to optimality");
  FractionalSolution frac = detail::distance_solution(h, L, sol.values);
  frac.bound = sol.objective_value;
  return frac;
}

// ---------------------------------------------------------------------------
// Lovasz extension of f(S) = sum_c (w(E_c cap S))^p, 0 < p < 1

struct LovaszValue {
  double value = 0.0;
  std::vector<double> subgradient;
};

inline double sub_one_set_value(const Hypergraph& h, const EdgeSet& s, double p) {
  std::vector<double> mass(h.color_count(), 0.0);
  for (EdgeId e = 0; e < h.edge_count(); ++e)
    if (s[e]) mass[h.color(e)] += h.weight(e);
  double f = 0.0;
  for (double m : mass) f += std::pow(m, p);
  return f;
}

inline LovaszValue lovasz_extension(const Hypergraph& h, double p, std::span<const double> gamma) {
  if (!(p > 0.0 && p < 1.0)) throw Error("Lovasz route requires 0 < p < 1");
  if (gamma.size() != h.edge_count()) throw Error("gamma length does not match edge count");
  for (double g : gamma)
    if (!(g >= 0.0 && g <= 1.0)) throw Error("gamma entries must lie in [0,1]");

  std::vector<EdgeId> order(h.edge_count());
  std::iota(order.begin(), order.end(), EdgeId{0});
  std::stable_sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) { return gamma[a] > gamma[b]; });

  LovaszValue out;
  out.subgradient.assign(h.edge_count(), 0.0);
  std::vector<double> mass(h.color_count(), 0.0);
  for (EdgeId e : order) {
    double& mc = mass[h.color(e)];
    const double before = std::pow(mc, p);
    mc += h.weight(e);
    const double gain = std::pow(mc, p) - before;
    out.subgradient[e] = gain;
    out.value += gamma[e] * gain;
  }
  return out;
}

struct LovaszOptions {
  std::size_t iterations = 10000;
  double step0 = 1.0;
  double restore_tol = 1e-9;
  std::size_t max_restore_passes = 100000;
  // Cutting-plane rounds run from the subgradient result; 0 disables.
  std::size_t polish_rounds = 500;
  double polish_tol = 1e-9;
};

struct LovaszResult {
  std::vector<double> gamma;
  double value = 0.0;
  std::size_t iterations = 0;
  // False when cyclic projection hit its pass cap; the exact repair still
  // leaves gamma feasible.
  bool restored_by_projection = true;
  // Certified lower bound on the relaxation minimum (from the cutting-plane
  // model; 0 when polishing is disabled).
  double lower_bound = 0.0;
  bool polished = false;
};

namespace detail {

// Cyclic projections onto violated rows gamma_e + gamma_f >= 1, then an exact
// repair that raises the larger entry of any pair still short of 1.
inline bool restore_cover(std::vector<double>& gamma, std::span<const std::pair<EdgeId, EdgeId>> pairs, double tol,
                          std::size_t max_passes) {
  for (double& g : gamma) g = std::clamp(g, 0.0, 1.0);
  bool converged = pairs.empty();
  for (std::size_t pass = 0; pass < max_passes && !converged; ++pass) {
    double worst = 0.0;
    for (auto [e, f] : pairs) {
      const double short_by = 1.0 - gamma[e] - gamma[f];
      if (short_by <= 0.0) continue;
      worst = std::max(worst, short_by);
      gamma[e] = std::min(1.0, gamma[e] + 0.5 * short_by);
      gamma[f] = std::min(1.0, gamma[f] + 0.5 * short_by);
    }
    converged = worst < tol;
  }
  for (auto [e, f] : pairs) {
    if (gamma[e] + gamma[f] >= 1.0) continue;
    const EdgeId hi = gamma[e] >= gamma[f] ? e : f;
    const EdgeId lo = hi == e ? f : e;
    gamma[hi] = std::min(1.0, 1.0 - gamma[lo]);
    while (gamma[hi] + gamma[lo] < 1.0) gamma[hi] = std::nextafter(gamma[hi], 2.0);
  }
  return converged;
}

// Kelley cutting planes: f^ is the max of its greedy vectors, so
// min t s.t. t >= g_i . gamma over the cover polytope is a lower model that
// is exact at every cut point. Stops when the model meets the best value.
inline void polish_lovasz(const Hypergraph& h, double p, std::span<const std::pair<EdgeId, EdgeId>> pairs,
                          const LovaszOptions& opt, LovaszResult& best) {
  const std::size_t m = h.edge_count();
  LinearProgram lp(m + 1, Sense::minimize);
  lp.objective[m] = 1.0;
  lp.upper[m] = std::numeric_limits<double>::infinity();
  for (auto [e, f] : pairs) lp.add_row({{e, 1.0}, {f, 1.0}}, Relation::greater_equal, 1.0);
  const auto add_cut = [&](std::span<const double> subgradient) {
    std::vector<std::pair<std::size_t, double>> terms{{m, 1.0}};
    for (EdgeId e = 0; e < m; ++e)
      if (subgradient[e] != 0.0) terms.emplace_back(e, -subgradient[e]);
    lp.add_row(terms, Relation::greater_equal, 0.0);
  };
  add_cut(lovasz_extension(h, p, best.gamma).subgradient);
  for (std::size_t round = 0; round < opt.polish_rounds; ++round) {
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal) throw Error("lovasz polish: cutting-plane model failed");
    best.lower_bound = std::max(best.lower_bound, sol.objective_value);
    std::vector<double> gamma(sol.values.begin(), sol.values.begin() + static_cast<std::ptrdiff_t>(m));
    restore_cover(gamma, pairs, opt.restore_tol, 0);
    const LovaszValue lv = lovasz_extension(h, p, gamma);
    if (lv.value < best.value) {
      best.value = lv.value;
      best.gamma = gamma;
      best.restored_by_projection = true;
    }
    if (best.value - best.lower_bound <= opt.polish_tol * std::max(1.0, best.value)) {
      best.polished = true;
      return;
    }
    add_cut(lv.subgradient);
  }
}

}  // namespace detail

// Projected subgradient descent on the Lovasz extension over
// { gamma in [0,1]^m : gamma_e + gamma_f >= 1 for every conflicting pair }.
// Returns the best feasible iterate, then polishes it with cutting planes.
inline LovaszResult minimize_lovasz(const Hypergraph& h, double p, const LovaszOptions& opt = {}) {
  if (!(p > 0.0 && p < 1.0)) throw Error("Lovasz route requires 0 < p < 1");
  const ConflictGraph g = build_conflict_graph(h);
  LovaszResult best;
  if (g.adjacency.empty()) {
    best.gamma.assign(h.edge_count(), 0.0);
    best.value = 0.0;
    best.polished = true;
    return best;
  }
  std::vector<double> gamma(h.edge_count(), 0.0);
  for (auto [e, f] : g.adjacency) gamma[e] = gamma[f] = 0.5;
  best.restored_by_projection = detail::restore_cover(gamma, g.adjacency, opt.restore_tol, opt.max_restore_passes);
  best.gamma = gamma;
  best.value = lovasz_extension(h, p, gamma).value;
  for (std::size_t t = 1; t <= opt.iterations; ++t) {
    const LovaszValue lv = lovasz_extension(h, p, gamma);
    const double eta = opt.step0 / std::sqrt(static_cast<double>(t));
    for (EdgeId e = 0; e < gamma.size(); ++e) gamma[e] -= eta * lv.subgradient[e];
    const bool ok = detail::restore_cover(gamma, g.adjacency, opt.restore_tol, opt.max_restore_passes);
    const double value = lovasz_extension(h, p, gamma).value;
    best.iterations = t;
    if (value < best.value) {
      best.value = value;
      best.gamma = gamma;
      best.restored_by_projection = ok;
    }
  }
  if (opt.polish_rounds > 0) detail::polish_lovasz(h, p, g.adjacency, opt, best);
  return best;
}

}  // namespace ecc
