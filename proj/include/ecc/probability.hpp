#pragma once

// Exact-count probabilities of independent events and the weighted series
// used to bound the graph MaxECC rounding.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ecc/hypergraph.hpp"

namespace ecc {

// P(x, t) for t = 0..m: probability that exactly t of m independent events
// with probabilities x occur. O(m^2) subset-sum recurrence.
template <typename Scalar = double>
std::vector<Scalar> exact_count_distribution(std::span<const Scalar> x) {
  std::vector<Scalar> dist(x.size() + 1, Scalar(0));
  dist[0] = Scalar(1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Scalar p = x[i];
    const Scalar q = Scalar(1) - p;
    for (std::size_t t = i + 1; t > 0; --t) dist[t] = dist[t] * q + dist[t - 1] * p;
    dist[0] = dist[0] * q;
  }
  return dist;
}

inline double exactly_t_probability(std::span<const double> x, long long t) {
  if (t < 0 || static_cast<unsigned long long>(t) > x.size()) return 0.0;
  return exact_count_distribution<double>(x)[static_cast<std::size_t>(t)];
}

// Probability that at most one event occurs.
inline double at_most_one_probability(std::span<const double> x) {
  const auto dist = exact_count_distribution<double>(x);
  return dist[0] + (dist.size() > 1 ? dist[1] : 0.0);
}

// f(x) = sum_t a_t P(x, t); needs a.size() == x.size() + 1.
template <typename Scalar = double>
Scalar weighted_series(std::span<const Scalar> x, std::span<const Scalar> a) {
  if (a.size() != x.size() + 1) throw Error("coefficient sequence must have length m + 1");
  const auto dist = exact_count_distribution<Scalar>(x);
  Scalar f(0);
  for (std::size_t t = 0; t < a.size(); ++t) f += a[t] * dist[t];
  return f;
}

// a_{t+1} <= a_t and 2 a_{t+1} <= a_t + a_{t+2} for every valid t.
template <typename Scalar = double>
bool check_sequence_conditions(std::span<const Scalar> a) {
  if (a.size() < 3) throw Error("sequence must have at least three terms");
  for (std::size_t t = 0; t + 1 < a.size(); ++t)
    if (a[t + 1] > a[t]) return false;
  for (std::size_t t = 0; t + 2 < a.size(); ++t)
    if (Scalar(2) * a[t + 1] > a[t] + a[t + 2]) return false;
  return true;
}

// Minimum of f over {x in [0, 2/3]^m : sum x <= 1}, attained at a permutation
// of (2/3, 1/3, 0, ..., 0): 2/9 (a_0 + a_2) + 5/9 a_1.
template <typename Scalar = double>
Scalar lemma_bounding_min(std::span<const Scalar> a) {
  if (!check_sequence_conditions<Scalar>(a)) throw Error("sequence violates the monotone/convex conditions");
  return Scalar(2) / Scalar(9) * (a[0] + a[2]) + Scalar(5) / Scalar(9) * a[1];
}

// a_t = 1 / (1 + g + t), t = 0..m.
template <typename Scalar = double>
std::vector<Scalar> harmonic_sequence(std::size_t m, std::size_t g = 0) {
  std::vector<Scalar> a;
  for (std::size_t t = 0; t <= m; ++t) a.push_back(Scalar(1) / Scalar(static_cast<long long>(1 + g + t)));
  return a;
}

// a_t = 2/9 (1/(t+1) + 1/(t+3)) + 5/9 * 1/(t+2), t = 0..m.
template <typename Scalar = double>
std::vector<Scalar> composite_sequence(std::size_t m) {
  std::vector<Scalar> a;
  for (std::size_t t = 0; t <= m; ++t) {
    const auto n = static_cast<long long>(t);
    a.push_back(Scalar(2) / Scalar(9) * (Scalar(1) / Scalar(n + 1) + Scalar(1) / Scalar(n + 3)) +
                Scalar(5) / Scalar(9) * (Scalar(1) / Scalar(n + 2)));
  }
  return a;
}

struct GridMinimum {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> argmin;
  // argmin[i] == numerators[i] / denominator exactly.
  std::vector<std::uint64_t> numerators;
};

inline constexpr std::uint64_t kGridPointLimit = 50'000'000;

// Exhaustive minimum of weighted_series over the grid {i / denominator} of
// {x in [0, 2/3]^m : sum x <= 1}. Domain membership is decided on the integer
// numerators, so the 2/3 and 1/3 boundaries are hit exactly; denominator must
// be a multiple of 3.
inline GridMinimum grid_min_of_f(std::span<const double> a, std::size_t m, std::uint64_t denominator) {
  if (a.size() != m + 1) throw Error("coefficient sequence must have length m + 1");
  if (denominator == 0 || denominator % 3 != 0) throw Error("grid denominator must be a positive multiple of 3");
  const std::uint64_t cap = 2 * denominator / 3;
  double points = 1.0;
  for (std::size_t i = 0; i < m; ++i) points *= static_cast<double>(cap + 1);
  if (points > static_cast<double>(kGridPointLimit)) throw Error("grid too large");

  GridMinimum best;
  std::vector<std::uint64_t> num(m, 0);
  std::vector<double> x(m, 0.0);
  const double den = static_cast<double>(denominator);
  while (true) {
    std::uint64_t sum = 0;
    for (std::uint64_t v : num) sum += v;
    if (sum <= denominator) {
      for (std::size_t i = 0; i < m; ++i) x[i] = static_cast<double>(num[i]) / den;
      const double f = weighted_series<double>(x, a);
      if (f < best.value) {
        best.value = f;
        best.argmin = x;
        best.numerators = num;
      }
    }
    std::size_t i = 0;
    while (i < m && num[i] == cap) num[i++] = 0;
    if (i == m) break;
    ++num[i];
  }
  return best;
}

}  // namespace ecc
