#pragma once

// Degree-d l1 polynomial regression learner under the uniform marginal.
//
// Labels y in {-1,1} with E[y | x] = g(x). For a point carrying label mass
// w+ (y = +1) and w- (y = -1) the loss of a prediction u is
//   w+ |1 - u| + w- |1 + u|,
// convex piecewise linear with breakpoints at -1 and 1. The LP writes
//   u = -1 - s0 + s1 + s2,  s0, s2 >= 0,  s1 in [0, 2]
// with per-unit costs W, (w- - w+), W where W = w+ + w-; convexity makes the
// split exact. The rounded hypothesis is h = +1 iff p(x) > t for the best
// threshold t.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "resil/error.hpp"
#include "resil/fourier.hpp"
#include "resil/lp.hpp"
#include "resil/resilience_lp.hpp"

namespace resil {

struct LabeledDistribution {
  BoundedFunction g;  ///< E[y | x]; marginal is uniform
  int dim() const { return g.dim(); }
};

struct PointMass {
  PointIndex x = 0;
  double plus = 0.0;   ///< mass of (x, +1)
  double minus = 0.0;  ///< mass of (x, -1)
};

struct PointRegression {
  SparsePolynomial poly{0, 0};
  double loss = 0.0;  ///< sum of w+|1-p| + w-|1+p|, recomputed from poly
  lp::Status status = lp::Status::optimal;
  std::size_t iterations = 0;
};

inline PointRegression pointwise_l1_regression(int n, int d, const std::vector<PointMass>& rows,
                                               const lp::Options& opt = {}) {
  check_lp_params(n, d);
  const auto masks = low_degree_masks(n, d);
  const std::size_t k = masks.size();
  lp::LinearProgram prog(k + 3 * rows.size());
  for (std::size_t j = 0; j < k; ++j) {
    prog.lower[j] = -lp::kInf;
    prog.upper[j] = lp::kInf;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    require(r.plus >= 0.0 && r.minus >= 0.0, Errc::invalid_argument, "label masses must be nonnegative");
    const double w = r.plus + r.minus;
    const std::size_t row = prog.add_row(-1.0);
    for (std::size_t j = 0; j < k; ++j) prog.at(row, j) = character(masks[j], r.x);
    const std::size_t c = k + 3 * i;
    prog.at(row, c) = 1.0;
    prog.at(row, c + 1) = -1.0;
    prog.at(row, c + 2) = -1.0;
    prog.upper[c + 1] = 2.0;
    prog.objective[c] = -w;
    prog.objective[c + 1] = -(r.minus - r.plus);
    prog.objective[c + 2] = -w;
  }
  const lp::Result res = lp::solve(prog, opt);
  require_solved(res, "regression");
  PointRegression out;
  out.poly = SparsePolynomial(n, d);
  for (std::size_t j = 0; j < k; ++j) out.poly.set(masks[j], res.point[j]);
  out.status = res.status;
  out.iterations = res.iterations;
  for (const auto& r : rows) {
    const double u = out.poly(r.x);
    out.loss += r.plus * std::abs(1.0 - u) + r.minus * std::abs(1.0 + u);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Threshold rounding

struct ThresholdChoice {
  double threshold = -std::numeric_limits<double>::infinity();
  double cost = 0.0;
};

/// Minimizes sum_x (h(x) = +1 ? cost_plus[x] : cost_minus[x]) over
/// h = [p > t], t in {-inf} U {p(x)}; ties go to the smallest t.
inline ThresholdChoice best_threshold(const std::vector<double>& p, const std::vector<double>& cost_plus,
                                      const std::vector<double>& cost_minus) {
  require(p.size() == cost_plus.size() && p.size() == cost_minus.size(), Errc::dimension_mismatch,
          "threshold inputs differ in length");
  std::vector<std::size_t> order(p.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  ThresholdChoice best;
  double cur = 0.0;
  for (double c : cost_plus) cur += c;
  best.cost = cur;
  for (std::size_t i = 0; i < order.size();) {
    const double t = p[order[i]];
    std::size_t j = i;
    for (; j < order.size() && p[order[j]] == t; ++j) cur += cost_minus[order[j]] - cost_plus[order[j]];
    if (cur < best.cost) {
      best.cost = cur;
      best.threshold = t;
    }
    i = j;
  }
  return best;
}

inline BooleanFunction threshold_hypothesis(const SparsePolynomial& p, double t) {
  const auto table = p.to_table();
  return BooleanFunction::from(p.dim(), [&](PointIndex x) { return table[x] > t ? 1 : -1; });
}

/// Pr[h(x) != y] = E[(1 - h g) / 2]
inline double classification_error(const BooleanFunction& h, const LabeledDistribution& dist) {
  require(h.dim() == dist.dim(), Errc::dimension_mismatch, "hypothesis and distribution differ in dimension");
  double e = 0.0;
  for (PointIndex x = 0; x < h.size(); ++x) e += (1.0 - h[x] * dist.g[x]) / 2.0;
  return e / double(h.size());
}

inline double opt_of_class(const std::vector<BooleanFunction>& cls, const LabeledDistribution& dist) {
  require(!cls.empty(), Errc::invalid_argument, "comparison class is empty");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cls) best = std::min(best, classification_error(c, dist));
  return best;
}

/// max over the class of Delta_{P_d}(c).
inline double class_l1_distance(const std::vector<BooleanFunction>& cls, int d) {
  require(!cls.empty(), Errc::invalid_argument, "comparison class is empty");
  double worst = 0.0;
  for (const auto& c : cls) worst = std::max(worst, l1_poly_distance(c, d).delta);
  return worst;
}

inline std::vector<BooleanFunction> dictator_class(int n, bool with_negations = true) {
  std::vector<BooleanFunction> out;
  for (int i = 1; i <= n; ++i) {
    auto f = BooleanFunction::from(n, [&](PointIndex x) { return coordinate(x, i); });
    if (with_negations) out.push_back(f.negated());
    out.push_back(std::move(f));
  }
  return out;
}

struct LearnReport {
  int n = 0;
  int d = 0;
  SparsePolynomial regressor{0, 0};
  BooleanFunction hypothesis;
  double threshold = 0.0;
  double error = 0.0;             ///< exact Pr[h != y]
  double regression_delta = 0.0;  ///< E|y - p| under the data used for fitting
  std::optional<double> opt;
  std::optional<double> class_delta;  ///< Delta_{P_d}(C)
  std::optional<double> excess;
  std::optional<bool> excess_within_bound;  ///< excess <= class_delta/2 + epsilon
  double epsilon = 0.0;
  // sampled mode
  bool sampled = false;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double empirical_error = 0.0;
  std::size_t lp_iterations = 0;
};

namespace detail {

inline LearnReport fit_and_round(int n, int d, const std::vector<PointMass>& rows, double total_mass,
                                 const LabeledDistribution& dist, const lp::Options& opt) {
  LearnReport rep;
  rep.n = n;
  rep.d = d;
  const PointRegression reg = pointwise_l1_regression(n, d, rows, opt);
  rep.regressor = reg.poly;
  rep.regression_delta = reg.loss / total_mass;
  rep.lp_iterations = reg.iterations;
  std::vector<double> p, plus, minus;
  for (const auto& r : rows) {
    p.push_back(reg.poly(r.x));
    plus.push_back(r.minus);  // predicting +1 errs on the -1 mass
    minus.push_back(r.plus);
  }
  const ThresholdChoice t = best_threshold(p, plus, minus);
  rep.threshold = t.threshold;
  rep.empirical_error = t.cost / total_mass;
  rep.hypothesis = threshold_hypothesis(reg.poly, t.threshold);
  rep.error = classification_error(rep.hypothesis, dist);
  return rep;
}

inline void attach_class(LearnReport& rep, const std::vector<BooleanFunction>* cls,
                         const LabeledDistribution& dist, double epsilon) {
  rep.epsilon = epsilon;
  if (cls == nullptr) return;
  rep.opt = opt_of_class(*cls, dist);
  rep.class_delta = class_l1_distance(*cls, rep.d);
  rep.excess = rep.error - *rep.opt;
  rep.excess_within_bound = *rep.excess <= *rep.class_delta / 2.0 + epsilon + 1e-12;
}

}  // namespace detail

inline LearnReport learn_exact(const LabeledDistribution& dist, int d, double epsilon,
                               const std::vector<BooleanFunction>* cls = nullptr, const lp::Options& opt = {}) {
  const int n = dist.dim();
  check_lp_params(n, d);
  require(epsilon >= 0.0, Errc::invalid_argument, "epsilon must be nonnegative");
  if (cls)
    for (const auto& c : *cls) require(c.dim() == n, Errc::dimension_mismatch, "class member dimension differs");
  std::vector<PointMass> rows;
  for (PointIndex x = 0; x < dist.g.size(); ++x)
    rows.push_back({x, (1.0 + dist.g[x]) / 2.0, (1.0 - dist.g[x]) / 2.0});
  LearnReport rep = detail::fit_and_round(n, d, rows, double(rows.size()), dist, opt);
  detail::attach_class(rep, cls, dist, epsilon);
  return rep;
}

inline LearnReport learn_sampled(const LabeledDistribution& dist, int d, std::size_t m, std::uint64_t seed,
                                 const std::vector<BooleanFunction>* cls = nullptr, double epsilon = 0.0,
                                 const lp::Options& opt = {}) {
  const int n = dist.dim();
  check_lp_params(n, d);
  require(m >= 1, Errc::invalid_argument, "sample count must be >= 1");
  std::mt19937_64 rng(seed);
  const PointIndex mask = (PointIndex{1} << n) - 1;
  std::vector<std::size_t> plus(dist.g.size(), 0), minus(dist.g.size(), 0);
  for (std::size_t i = 0; i < m; ++i) {
    const PointIndex x = rng() & mask;
    const double u = double(rng() >> 11) * 0x1.0p-53;
    if (u < (1.0 + dist.g[x]) / 2.0) ++plus[x];
    else ++minus[x];
  }
  std::vector<PointMass> rows;
  for (PointIndex x = 0; x < dist.g.size(); ++x)
    if (plus[x] + minus[x] > 0) rows.push_back({x, double(plus[x]), double(minus[x])});
  LearnReport rep = detail::fit_and_round(n, d, rows, double(m), dist, opt);
  rep.sampled = true;
  rep.samples = m;
  rep.seed = seed;
  detail::attach_class(rep, cls, dist, epsilon);
  return rep;
}

}  // namespace resil
