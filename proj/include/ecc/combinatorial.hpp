#pragma once

// Combinatorial algorithms: maximal matching on the implicit conflict graph,
// bounded-depth branching for the budgeted variants, and exhaustive search.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ecc/hypergraph.hpp"

namespace ecc {

struct MatchingResult {
  Coloring coloring;
  EdgeSet matched;
};

// Greedy maximal matching of the conflict graph without building it. Each
// node keeps a stack of earlier unmatched incident edges; alive entries on one
// stack always share a color, so only the top needs checking.
inline MatchingResult matching_k_approx(const Hypergraph& h) {
  std::vector<std::vector<EdgeId>> registry(h.node_count());
  EdgeSet matched = empty_edge_set(h);
  for (EdgeId e = 0; e < h.edge_count(); ++e) {
    const Edge& edge = h.edge(e);
    std::optional<EdgeId> partner;
    for (NodeId v : edge.nodes) {
      auto& stack = registry[v];
      while (!stack.empty() && matched[stack.back()]) stack.pop_back();
      if (!stack.empty() && h.color(stack.back()) != edge.color) {
        partner = stack.back();
        break;
      }
    }
    if (partner) {
      matched[e] = true;
      matched[*partner] = true;
    } else {
      for (NodeId v : edge.nodes) registry[v].push_back(e);
    }
  }
  Coloring lam = extend_coloring(h, matched);
  return {std::move(lam), std::move(matched)};
}

namespace detail {

struct BranchState {
  const Hypergraph& h;
  EdgeSet dead;
  std::vector<double> deleted_by_color;
  double deleted_total = 0.0;
};

template <typename Admissible>
bool branch(BranchState& s, const Admissible& admissible) {
  EdgeSet alive(s.dead.size());
  for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = !s.dead[i];
  const std::optional<Conflict> conflict = find_conflict(s.h, alive);
  if (!conflict) return true;
  for (EdgeId e : {conflict->first, conflict->second}) {
    const ColorId c = s.h.color(e);
    const double w = s.h.weight(e);
    s.dead[e] = true;
    s.deleted_by_color[c] += w;
    s.deleted_total += w;
    if (admissible(s) && branch(s, admissible)) return true;
    s.dead[e] = false;
    s.deleted_by_color[c] -= w;
    s.deleted_total -= w;
  }
  return false;
}

constexpr double kBudgetSlack = 1e-9;

}  // namespace detail

// Coloring with every per-color unsatisfied weight <= tau, if one exists.
inline std::optional<Coloring> fpt_colorfair(const Hypergraph& h, double tau) {
  if (std::isnan(tau) || tau < 0.0) throw Error("tau must be nonnegative");
  detail::BranchState s{h, empty_edge_set(h), std::vector<double>(h.color_count(), 0.0)};
  const auto admissible = [tau](const detail::BranchState& st) {
    return std::all_of(st.deleted_by_color.begin(), st.deleted_by_color.end(),
                       [tau](double x) { return x <= tau + detail::kBudgetSlack; });
  };
  if (!detail::branch(s, admissible)) return std::nullopt;
  return extend_coloring(h, s.dead);
}

// Coloring with total unsatisfied weight <= t, of which <= b has color c1.
inline std::optional<Coloring> fpt_protected(const Hypergraph& h, double t, double b, ColorId c1) {
  if (std::isnan(t) || std::isnan(b) || t < 0.0 || b < 0.0) throw Error("budgets must be nonnegative");
  if (c1 >= h.color_count()) throw Error("protected color out of range");
  const double b_eff = std::min(b, t);
  detail::BranchState s{h, empty_edge_set(h), std::vector<double>(h.color_count(), 0.0)};
  const auto admissible = [t, b_eff, c1](const detail::BranchState& st) {
    return st.deleted_total <= t + detail::kBudgetSlack && st.deleted_by_color[c1] <= b_eff + detail::kBudgetSlack;
  };
  if (!detail::branch(s, admissible)) return std::nullopt;
  return extend_coloring(h, s.dead);
}

struct BruteForceResult {
  double value = 0.0;
  Coloring witness;
  // Unsatisfied protected weight of the witness (protected problems only).
  std::optional<double> protected_unsatisfied;
};

inline constexpr std::uint64_t kBruteForceLimit = std::uint64_t{1} << 24;

// Exhaustive search over colorings of edge-incident nodes (others keep color
// 0). Ties go to the lexicographically smallest coloring. Protected problems
// require problem.budget and minimize total unsatisfied weight under it.
inline BruteForceResult brute_force(const Hypergraph& h, const Problem& problem) {
  std::vector<NodeId> free_nodes;
  for (NodeId v = 0; v < h.node_count(); ++v)
    if (!h.incident(v).empty()) free_nodes.push_back(v);
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < free_nodes.size(); ++i) {
    if (count > kBruteForceLimit / h.color_count()) throw Error("instance too large for brute force");
    count *= h.color_count();
  }
  if (problem.kind == ProblemKind::protected_color) {
    if (!problem.budget) throw Error("brute force on the protected problem needs a budget");
    if (problem.protected_color >= h.color_count()) throw Error("protected color out of range");
  }

  Coloring lam(h.node_count(), 0);
  std::vector<ColorId> digits(free_nodes.size(), 0);
  std::optional<BruteForceResult> best;
  for (std::uint64_t it = 0; it < count; ++it) {
    const ObjectiveValue val = objective(h, lam, problem);
    bool feasible = true;
    if (problem.kind == ProblemKind::protected_color)
      feasible = *val.protected_unsatisfied <= *problem.budget + detail::kBudgetSlack;
    if (feasible) {
      const bool better = !best || (problem.minimizes() ? val.value < best->value : val.value > best->value);
      if (better) best = BruteForceResult{val.value, lam, val.protected_unsatisfied};
    }
    // Lexicographic increment, most significant digit = lowest node id.
    for (std::size_t i = digits.size(); i-- > 0;) {
      if (++digits[i] < h.color_count()) {
        lam[free_nodes[i]] = digits[i];
        break;
      }
      digits[i] = 0;
      lam[free_nodes[i]] = 0;
    }
  }
  if (!best) throw Error("brute force found no feasible coloring");
  return *best;
}

}  // namespace ecc
