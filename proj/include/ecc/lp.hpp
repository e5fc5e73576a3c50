#pragma once

// Dense LP solver (two-phase primal simplex on a full tableau) and a
// Frank-Wolfe minimizer that uses it as the linear-minimization oracle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ecc/hypergraph.hpp"

namespace ecc {

inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr double kObjectiveTol = 1e-7;

enum class Sense { minimize, maximize };
enum class Relation { less_equal, greater_equal, equal };

struct LpRow {
  std::vector<double> coefficients;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
};

struct LinearProgram {
  std::size_t variable_count = 0;
  Sense sense = Sense::minimize;
  std::vector<double> objective;
  std::vector<LpRow> rows;
  std::vector<double> lower;
  std::vector<double> upper;

  explicit LinearProgram(std::size_t n = 0, Sense s = Sense::minimize)
      : variable_count(n), sense(s), objective(n, 0.0), lower(n, 0.0), upper(n, 1.0) {}

  // Appends a row from sparse (index, coefficient) terms.
  void add_row(std::initializer_list<std::pair<std::size_t, double>> terms, Relation rel, double rhs) {
    add_row(std::vector<std::pair<std::size_t, double>>(terms), rel, rhs);
  }
  void add_row(const std::vector<std::pair<std::size_t, double>>& terms, Relation rel, double rhs) {
    LpRow row{std::vector<double>(variable_count, 0.0), rel, rhs};
    for (auto [j, a] : terms) row.coefficients.at(j) += a;
    rows.push_back(std::move(row));
  }

  void validate() const {
    if (objective.size() != variable_count || lower.size() != variable_count || upper.size() != variable_count)
      throw Error("linear program: vector length mismatch");
    for (double c : objective)
      if (!std::isfinite(c)) throw Error("linear program: non-finite objective coefficient");
    for (std::size_t j = 0; j < variable_count; ++j) {
      if (!std::isfinite(lower[j])) throw Error("linear program: lower bounds must be finite");
      if (std::isnan(upper[j]) || upper[j] < lower[j]) throw Error("linear program: invalid bounds");
    }
    for (const LpRow& r : rows) {
      if (r.coefficients.size() != variable_count) throw Error("linear program: row length mismatch");
      if (!std::isfinite(r.rhs)) throw Error("linear program: non-finite rhs");
      for (double a : r.coefficients)
        if (!std::isfinite(a)) throw Error("linear program: non-finite coefficient");
    }
  }

  double evaluate(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < variable_count; ++j) s += objective[j] * x[j];
    return s;
  }

  // Largest violation of any row or bound at x.
  double max_violation(std::span<const double> x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < variable_count; ++j) {
      worst = std::max(worst, lower[j] - x[j]);
      worst = std::max(worst, x[j] - upper[j]);
    }
    for (const LpRow& r : rows) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < variable_count; ++j) lhs += r.coefficients[j] * x[j];
      switch (r.relation) {
        case Relation::less_equal: worst = std::max(worst, lhs - r.rhs); break;
        case Relation::greater_equal: worst = std::max(worst, r.rhs - lhs); break;
        case Relation::equal: worst = std::max(worst, std::abs(lhs - r.rhs)); break;
      }
    }
    return worst;
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> values;
  double objective_value = 0.0;
  std::size_t pivots = 0;
};

namespace detail {

// Full-tableau simplex over  min c'y  s.t.  A y = b, y >= 0, b >= 0.
// Entering column: most negative reduced cost; after a run of degenerate
// pivots the rule switches to Bland's (lowest index) until the objective
// moves again, so cycling cannot occur.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, n_); }
  double& cost(std::size_t j) { return at(m_, j); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const std::size_t w = n_ + 1;
    double* prow = &t_[r * w];
    const double inv = 1.0 / prow[c];
    for (std::size_t j = 0; j < w; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double* row = &t_[i * w];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < w; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
    basis_[r] = c;
  }

  // Recomputes the cost row from raw column costs for the current basis.
  void price(std::span<const double> costs) {
    for (std::size_t j = 0; j <= n_; ++j) cost(j) = j < n_ ? costs[j] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = costs[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) cost(j) -= cb * at(i, j);
    }
  }

  enum class Outcome { optimal, unbounded, stalled };

  Outcome run(const std::vector<bool>& allowed, std::size_t& pivots, std::size_t max_pivots) {
    constexpr double kReducedCostTol = 1e-11;
    constexpr double kPivotTol = 1e-11;
    std::size_t degenerate_run = 0;
    bool bland = false;
    while (true) {
      std::size_t enter = n_;
      double best = -kReducedCostTol;
      for (std::size_t j = 0; j < n_; ++j) {
        if (!allowed[j]) continue;
        const double d = cost(j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter == n_) return Outcome::optimal;

      std::size_t leave = m_;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotTol) continue;
        const double q = std::max(0.0, rhs(i)) / a;
        if (q < ratio - 1e-12 || (q <= ratio + 1e-12 && leave < m_ && basis_[i] < basis_[leave])) {
          if (q < ratio) ratio = q;
          leave = i;
        }
      }
      if (leave == m_) return Outcome::unbounded;
      if (++pivots > max_pivots) return Outcome::stalled;

      const bool degenerate = ratio <= 1e-12;
      pivot(leave, enter);
      if (degenerate) {
        if (++degenerate_run > 8) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

// Solves lp to optimality or reports infeasible/unbounded. Throws ecc::Error
// when the pivot cap is hit. Output is deterministic for a fixed input.
inline LpSolution solve_lp(const LinearProgram& lp, std::size_t max_pivots = 200000) {
  lp.validate();
  const std::size_t nv = lp.variable_count;

  // Shift to y = x - lower, y in [0, upper - lower]; finite upper bounds become rows.
  struct StdRow {
    std::vector<double> a;
    Relation rel;
    double b;
  };
  std::vector<StdRow> rows;
  rows.reserve(lp.rows.size() + nv);
  for (const LpRow& r : lp.rows) {
    double shift = 0.0;
    for (std::size_t j = 0; j < nv; ++j) shift += r.coefficients[j] * lp.lower[j];
    rows.push_back({r.coefficients, r.relation, r.rhs - shift});
  }
  for (std::size_t j = 0; j < nv; ++j) {
    if (std::isinf(lp.upper[j])) continue;
    std::vector<double> a(nv, 0.0);
    a[j] = 1.0;
    rows.push_back({std::move(a), Relation::less_equal, lp.upper[j] - lp.lower[j]});
  }
  for (StdRow& r : rows) {
    if (r.b < 0.0) {
      for (double& a : r.a) a = -a;
      r.b = -r.b;
      if (r.rel == Relation::less_equal) r.rel = Relation::greater_equal;
      else if (r.rel == Relation::greater_equal) r.rel = Relation::less_equal;
    }
  }

  const std::size_t m = rows.size();
  std::size_t slack_count = 0;
  std::size_t artificial_count = 0;
  for (const StdRow& r : rows) {
    if (r.rel != Relation::equal) ++slack_count;
    if (r.rel != Relation::less_equal) ++artificial_count;
  }
  const std::size_t first_slack = nv;
  const std::size_t first_artificial = nv + slack_count;
  const std::size_t ncols = nv + slack_count + artificial_count;

  detail::Tableau tab(m, ncols);
  std::size_t next_slack = first_slack;
  std::size_t next_art = first_artificial;
  for (std::size_t i = 0; i < m; ++i) {
    const StdRow& r = rows[i];
    for (std::size_t j = 0; j < nv; ++j) tab.at(i, j) = r.a[j];
    tab.rhs(i) = r.b;
    switch (r.rel) {
      case Relation::less_equal:
        tab.at(i, next_slack) = 1.0;
        tab.basis()[i] = next_slack++;
        break;
      case Relation::greater_equal:
        tab.at(i, next_slack++) = -1.0;
        tab.at(i, next_art) = 1.0;
        tab.basis()[i] = next_art++;
        break;
      case Relation::equal:
        tab.at(i, next_art) = 1.0;
        tab.basis()[i] = next_art++;
        break;
    }
  }

  LpSolution sol;
  std::vector<bool> allowed(ncols, true);

  if (artificial_count > 0) {
    std::vector<double> phase1(ncols, 0.0);
    for (std::size_t j = first_artificial; j < ncols; ++j) phase1[j] = 1.0;
    tab.price(phase1);
    if (tab.run(allowed, sol.pivots, max_pivots) == detail::Tableau::Outcome::stalled)
      throw Error("simplex: pivot limit reached in phase 1");
    const double infeas = -tab.cost(ncols);
    double scale = 1.0;
    for (const StdRow& r : rows) scale = std::max(scale, r.b);
    if (infeas > kFeasibilityTol * scale) {
      sol.status = LpStatus::infeasible;
      return sol;
    }
    // Drive remaining (zero-level) artificials out of the basis.
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis()[i] < first_artificial) continue;
      std::size_t col = first_artificial;
      double best = 1e-9;
      for (std::size_t j = 0; j < first_artificial; ++j) {
        if (std::abs(tab.at(i, j)) > best) {
          best = std::abs(tab.at(i, j));
          col = j;
        }
      }
      if (col < first_artificial) tab.pivot(i, col);
      // Otherwise the row is redundant; its artificial stays basic at zero.
    }
    for (std::size_t j = first_artificial; j < ncols; ++j) allowed[j] = false;
  }

  std::vector<double> costs(ncols, 0.0);
  const double sign = lp.sense == Sense::maximize ? -1.0 : 1.0;
  for (std::size_t j = 0; j < nv; ++j) costs[j] = sign * lp.objective[j];
  tab.price(costs);
  switch (tab.run(allowed, sol.pivots, max_pivots)) {
    case detail::Tableau::Outcome::unbounded:
      sol.status = LpStatus::unbounded;
      return sol;
    case detail::Tableau::Outcome::stalled:
      throw Error("simplex: pivot limit reached in phase 2");
    case detail::Tableau::Outcome::optimal:
      break;
  }

  std::vector<double> y(ncols, 0.0);
  for (std::size_t i = 0; i < m; ++i) y[tab.basis()[i]] = std::max(0.0, tab.rhs(i));
  sol.values.resize(nv);
  for (std::size_t j = 0; j < nv; ++j)
    sol.values[j] = std::clamp(lp.lower[j] + y[j], lp.lower[j], lp.upper[j]);
  sol.objective_value = lp.evaluate(sol.values);
  sol.status = LpStatus::optimal;
  return sol;
}

// ---------------------------------------------------------------------------
// Frank-Wolfe

struct OracleValue {
  double value = 0.0;
  std::vector<double> gradient;
};

// Convex function on the LP region, returning value and (sub)gradient.
using ConvexObjectiveOracle = std::function<OracleValue(std::span<const double>)>;

struct FrankWolfeOptions {
  std::size_t max_iters = 5000;
  double tol = 1e-6;
};

struct FrankWolfeResult {
  std::vector<double> point;
  double value = 0.0;
  // Duality gap <grad, x - s> at the returned point; bounds value - min.
  double gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Minimizes t -> f(x + t d) on [0, t_max] by bisection on the directional
// derivative.
inline double line_search(const ConvexObjectiveOracle& f, std::span<const double> x, std::span<const double> d,
                          double t_max) {
  std::vector<double> y(x.size());
  auto slope = [&](double t) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + t * d[i];
    return dot(f(y).gradient, d);
  };
  if (slope(t_max) <= 0.0) return t_max;
  double lo = 0.0, hi = t_max;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) > 0.0) hi = mid;
    else lo = mid;
  }
  return lo;
}

}  // namespace detail

// Away-step Frank-Wolfe over the polytope of `region` (its objective is
// ignored). Each linear subproblem is one solve_lp call; the iterate is kept
// as an explicit convex combination of the LP vertices returned so far.
inline FrankWolfeResult frank_wolfe_minimize(const LinearProgram& region, const ConvexObjectiveOracle& oracle,
                                             const FrankWolfeOptions& options = {}) {
  const std::size_t n = region.variable_count;
  LinearProgram lmo = region;
  lmo.sense = Sense::minimize;
  std::fill(lmo.objective.begin(), lmo.objective.end(), 0.0);
  LpSolution start = solve_lp(lmo);
  if (start.status != LpStatus::optimal) throw Error("frank-wolfe: region is infeasible");

  std::vector<std::vector<double>> atoms{start.values};
  std::vector<double> weights{1.0};
  std::vector<double> x = start.values;

  FrankWolfeResult result;
  std::vector<double> d(n);
  for (std::size_t iter = 1;; ++iter) {
    OracleValue fx = oracle(x);
    if (fx.gradient.size() != n) throw Error("frank-wolfe: gradient length mismatch");
    lmo.objective = fx.gradient;
    LpSolution s = solve_lp(lmo);
    if (s.status != LpStatus::optimal) throw Error("frank-wolfe: linear subproblem failed");

    const double gap = detail::dot(fx.gradient, x) - detail::dot(fx.gradient, s.values);
    result.value = fx.value;
    result.gap = std::max(0.0, gap);
    result.iterations = iter - 1;
    if (gap <= options.tol) {
      result.converged = true;
      break;
    }
    if (iter > options.max_iters) break;

    // Away vertex: active atom with the largest gradient inner product.
    std::size_t away = 0;
    double away_score = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      const double sc = detail::dot(fx.gradient, atoms[a]);
      if (sc > away_score) {
        away_score = sc;
        away = a;
      }
    }
    const double away_gap = away_score - detail::dot(fx.gradient, x);

    if (gap >= away_gap || atoms.size() == 1) {
      for (std::size_t i = 0; i < n; ++i) d[i] = s.values[i] - x[i];
      const double t = detail::line_search(oracle, x, d, 1.0);
      for (std::size_t i = 0; i < n; ++i) x[i] += t * d[i];
      for (double& w : weights) w *= (1.0 - t);
      auto found = std::find(atoms.begin(), atoms.end(), s.values);
      if (found == atoms.end()) {
        atoms.push_back(s.values);
        weights.push_back(t);
      } else {
        weights[static_cast<std::size_t>(found - atoms.begin())] += t;
      }
      if (t >= 1.0) {
        atoms.assign(1, s.values);
        weights.assign(1, 1.0);
        x = s.values;
      }
    } else {
      const double wa = weights[away];
      const double t_max = wa / (1.0 - wa);
      for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - atoms[away][i];
      const double t = detail::line_search(oracle, x, d, t_max);
      for (std::size_t i = 0; i < n; ++i) x[i] += t * d[i];
      for (double& w : weights) w *= (1.0 + t);
      weights[away] -= t;
      if (t >= t_max || weights[away] <= 1e-15) {
        atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(away));
        weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(away));
      }
    }
  }
  result.point = x;
  return result;
}

}  // namespace ecc
