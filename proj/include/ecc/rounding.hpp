#pragma once

// Rounding schemes from fractional solutions to colorings, and the
// Monte-Carlo estimator for per-edge satisfaction probabilities.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ecc/hypergraph.hpp"
#include "ecc/relaxations.hpp"

namespace ecc {

// 64-bit Mersenne Twister per trial, seeded by a splitmix64 mix of
// (master_seed, trial_index).
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t master_seed) : master_seed_(master_seed) {}

  static std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  class Stream {
   public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}
    // Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // Uniform integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
      const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                  std::numeric_limits<std::uint64_t>::max() % bound;
      std::uint64_t r;
      do {
        r = engine_();
      } while (r >= limit);
      return r % bound;
    }

   private:
    std::mt19937_64 engine_;
  };

  Stream stream(std::uint64_t trial_index) const {
    return Stream(splitmix64(splitmix64(master_seed_) ^ splitmix64(trial_index + 0x632be59bd9b4e019ULL)));
  }
  std::uint64_t master_seed() const noexcept { return master_seed_; }

 private:
  std::uint64_t master_seed_;
};

// Uniform random permutation of colors; larger priority wins.
class ColorPriority {
 public:
  static ColorPriority draw(std::size_t k, RandomSource::Stream& rng) {
    std::vector<ColorId> order(k);
    for (ColorId c = 0; c < k; ++c) order[c] = c;
    for (std::size_t i = k; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    ColorPriority p;
    p.priority_.resize(k);
    for (std::size_t pos = 0; pos < k; ++pos) p.priority_[order[pos]] = pos;
    return p;
  }
  std::size_t operator()(ColorId c) const { return priority_.at(c); }
  std::size_t size() const { return priority_.size(); }

 private:
  std::vector<std::size_t> priority_;
};

namespace detail {

inline void require_orientation(const Hypergraph& h, const FractionalSolution& frac, Orientation o) {
  if (frac.orientation != o) throw Error("fractional solution has the wrong orientation for this rounding");
  if (frac.node_count != h.node_count() || frac.color_count != h.color_count() ||
      frac.edge_value.size() != h.edge_count())
    throw Error("fractional solution does not match the instance");
}

inline void require_assignment_rows(const FractionalSolution& frac) {
  for (NodeId v = 0; v < frac.node_count; ++v) {
    double s = 0.0;
    for (double x : frac.row(v)) s += x;
    if (std::abs(s - 1.0) > 1e-6) throw Error("assignment row of node " + std::to_string(v + 1) + " does not sum to 1");
  }
}

struct Thresholds {
  ColorPriority priority;
  std::vector<double> alpha;
};

// pi first (Fisher-Yates), then alpha_c in color order.
inline Thresholds draw_thresholds(std::size_t k, RandomSource::Stream& rng) {
  Thresholds t{ColorPriority::draw(k, rng), std::vector<double>(k)};
  for (double& a : t.alpha) a = rng.uniform();
  return t;
}

}  // namespace detail

// Each node takes the highest-priority color c with alpha_c < x_v^c.
inline Coloring hyper_maxecc_round(const Hypergraph& h, const FractionalSolution& frac, RandomSource::Stream& rng) {
  detail::require_orientation(h, frac, Orientation::assignment);
  detail::require_assignment_rows(frac);
  const auto [pi, alpha] = detail::draw_thresholds(h.color_count(), rng);
  const std::vector<ColorId> fallback = fractional_fallback(frac);
  Coloring lam(h.node_count());
  for (NodeId v = 0; v < h.node_count(); ++v) {
    bool wanted = false;
    ColorId pick = 0;
    for (ColorId c = 0; c < h.color_count(); ++c) {
      if (!(alpha[c] < frac.at(v, c))) continue;
      if (!wanted || pi(c) > pi(pick)) pick = c;
      wanted = true;
    }
    lam[v] = wanted ? pick : fallback[v];
  }
  return lam;
}

// Graph variant: weak wanted colors first, then the strong color (x >= 2/3).
inline Coloring graph_maxecc_round(const Hypergraph& h, const FractionalSolution& frac, RandomSource::Stream& rng) {
  detail::require_orientation(h, frac, Orientation::assignment);
  for (const Edge& e : h.edges())
    if (e.nodes.size() != 2) throw Error("graph rounding requires every edge to have exactly two nodes");
  detail::require_assignment_rows(frac);
  const auto [pi, alpha] = detail::draw_thresholds(h.color_count(), rng);
  const std::vector<ColorId> fallback = fractional_fallback(frac);
  Coloring lam(h.node_count());
  for (NodeId v = 0; v < h.node_count(); ++v) {
    std::optional<ColorId> strong;
    bool wanted = false;
    ColorId pick = 0;
    for (ColorId c = 0; c < h.color_count(); ++c) {
      const double x = frac.at(v, c);
      if (x >= 2.0 / 3.0) {
        if (strong) throw Error("node " + std::to_string(v + 1) + " has two strong colors");
        strong = c;
        continue;
      }
      if (!(alpha[c] < x)) continue;
      if (!wanted || pi(c) > pi(pick)) pick = c;
      wanted = true;
    }
    lam[v] = wanted ? pick : strong ? *strong : fallback[v];
  }
  return lam;
}

// lambda(v) = the unique c with d_v^c < 1/2, else argmin d.
inline Coloring half_threshold_round(const Hypergraph& h, const FractionalSolution& frac) {
  detail::require_orientation(h, frac, Orientation::distance);
  const std::vector<ColorId> fallback = fractional_fallback(frac);
  Coloring lam(h.node_count());
  for (NodeId v = 0; v < h.node_count(); ++v) {
    std::optional<ColorId> chosen;
    for (ColorId c = 0; c < h.color_count(); ++c) {
      if (!(frac.at(v, c) < 0.5)) continue;
      if (chosen) throw Error("node " + std::to_string(v + 1) + " has two colors with distance below 1/2");
      chosen = c;
    }
    lam[v] = chosen ? *chosen : fallback[v];
  }
  return lam;
}

// Removes protected edges with gamma >= 1 - rho and other edges with
// gamma >= rho, then satisfies everything else. Thresholds are relaxed by the
// LP feasibility tolerance so solver noise cannot break a pair cover.
inline Coloring protected_round(const Hypergraph& h, const FractionalSolution& frac, ColorId c1, double rho) {
  detail::require_orientation(h, frac, Orientation::distance);
  if (c1 >= h.color_count()) throw Error("protected color out of range");
  if (!(rho > 0.0 && rho <= 0.5)) throw Error("rho must lie in (0, 1/2]");
  EdgeSet removed = empty_edge_set(h);
  for (EdgeId e = 0; e < h.edge_count(); ++e) {
    const double g = frac.edge_value[e];
    removed[e] = h.color(e) == c1 ? g >= 1.0 - rho - kFeasibilityTol : g >= rho - kFeasibilityTol;
  }
  const std::vector<ColorId> fallback = fractional_fallback(frac);
  return extend_coloring(h, removed, fallback);
}

inline Coloring lovasz_round(const Hypergraph& h, std::span<const double> gamma) {
  if (gamma.size() != h.edge_count()) throw Error("gamma length does not match edge count");
  EdgeSet removed = empty_edge_set(h);
  for (EdgeId e = 0; e < h.edge_count(); ++e) removed[e] = gamma[e] >= 0.5;
  return extend_coloring(h, removed);
}

// ---------------------------------------------------------------------------
// Monte-Carlo

enum class Scheme { hyper, graph };

// Per-edge lower bound factor: (2/e)^r/(r+1) or 154/405.
inline double guarantee_factor(Scheme scheme, std::size_t rank) {
  if (scheme == Scheme::graph) return 154.0 / 405.0;
  const double r = static_cast<double>(rank);
  return std::pow(2.0 / std::exp(1.0), r) / (r + 1.0);
}

struct SatisfactionEstimate {
  std::size_t trials = 0;
  std::uint64_t master_seed = 0;
  std::vector<double> frequency;
  std::vector<double> standard_error;
  // Mean and standard error of the satisfied weight per trial.
  double mean_objective = 0.0;
  double objective_standard_error = 0.0;
};

inline SatisfactionEstimate estimate_satisfaction(const Hypergraph& h, const FractionalSolution& frac, Scheme scheme,
                                                  std::size_t trials, std::uint64_t master_seed) {
  if (trials == 0) throw Error("trials must be at least 1");
  const RandomSource source(master_seed);
  std::vector<std::uint64_t> hits(h.edge_count(), 0);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    RandomSource::Stream rng = source.stream(t);
    const Coloring lam = scheme == Scheme::hyper ? hyper_maxecc_round(h, frac, rng) : graph_maxecc_round(h, frac, rng);
    double sat = 0.0;
    for (EdgeId e = 0; e < h.edge_count(); ++e) {
      if (is_satisfied(h, lam, e)) {
        ++hits[e];
        sat += h.weight(e);
      }
    }
    sum += sat;
    sum_sq += sat * sat;
  }
  SatisfactionEstimate est;
  est.trials = trials;
  est.master_seed = master_seed;
  const double n = static_cast<double>(trials);
  for (EdgeId e = 0; e < h.edge_count(); ++e) {
    const double f = static_cast<double>(hits[e]) / n;
    est.frequency.push_back(f);
    est.standard_error.push_back(std::sqrt(f * (1.0 - f) / n));
  }
  est.mean_objective = sum / n;
  const double var = std::max(0.0, sum_sq / n - est.mean_objective * est.mean_objective);
  est.objective_standard_error = std::sqrt(var / n);
  return est;
}

}  // namespace ecc
