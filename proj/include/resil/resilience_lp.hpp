#pragma once

// The two linear programs linking distance-to-resilience with l1
// approximation by low-degree polynomials, each solved independently and
// re-verified outside the solver.
//
//   resilience side:  max sum_x f(x) g(x)
//                     s.t. sum_x g(x) chi_S(x) = 0 for |S| <= d, |g| <= 1
//                     alpha = 1 - value / 2^n
//   regression side:  min sum_x |f(x) - sum_{|S|<=d} p_S chi_S(x)|
//                     delta = value / 2^n
//
// LP duality makes alpha + delta = 1; the gap is reported, never assumed.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "resil/error.hpp"
#include "resil/fourier.hpp"
#include "resil/lp.hpp"

namespace resil {

inline constexpr int kMaxLpDimension = 12;
inline constexpr double kWitnessTol = 1e-7;

/// Real polynomial of degree <= d stored by its nonzero Fourier coefficients.
class SparsePolynomial {
 public:
  SparsePolynomial(int n, int degree) : n_(n), degree_(degree) { check_dimension(n); }

  int dim() const { return n_; }
  int degree_bound() const { return degree_; }
  const std::map<SubsetMask, double>& coeffs() const { return coeffs_; }

  void set(SubsetMask s, double c) {
    require(cardinality(s) <= degree_, Errc::invalid_argument,
            "monomial exceeds the polynomial's degree bound");
    require(s < table_size(n_), Errc::invalid_argument, "mask outside dimension");
    if (c == 0.0) coeffs_.erase(s);
    else coeffs_[s] = c;
  }

  double coefficient(SubsetMask s) const {
    auto it = coeffs_.find(s);
    return it == coeffs_.end() ? 0.0 : it->second;
  }

  double operator()(PointIndex x) const {
    double v = 0.0;
    for (const auto& [s, c] : coeffs_) v += c * character(s, x);
    return v;
  }

  std::vector<double> to_table() const {
    std::vector<double> a(table_size(n_), 0.0);
    for (const auto& [s, c] : coeffs_) a[s] = c;
    wht_butterfly<double>(a);
    return a;
  }

 private:
  int n_;
  int degree_;
  std::map<SubsetMask, double> coeffs_;
};

struct ResilienceResult {
  double alpha = 0.0;
  BoundedFunction witness;
  int d = 0;
  lp::Status status = lp::Status::optimal;
  double lp_value = 0.0;
  std::size_t iterations = 0;
  ResilienceCheck resilience;  ///< re-verified from the witness spectrum
};

struct L1ApproxResult {
  double delta = 0.0;
  SparsePolynomial poly{0, 0};
  lp::Status status = lp::Status::optimal;
  double lp_value = 0.0;
  std::size_t iterations = 0;
};

inline void check_lp_params(int n, int d) {
  require(n <= kMaxLpDimension, Errc::dimension_too_large,
          "exact LP certificates are limited to n <= 12");
  require(d >= 0 && d <= n, Errc::invalid_argument, "degree must satisfy 0 <= d <= n");
}

inline void require_solved(const lp::Result& r, const char* which) {
  require(r.status == lp::Status::optimal, Errc::solver_failure, std::string(which) + " LP ended " + lp::to_string(r.status));
}

/// Distance from f to the nearest bounded d-resilient function.
inline ResilienceResult distance_to_resilience(const BooleanFunction& f, int d,
                                               const lp::Options& opt = {}) {
  const int n = f.dim();
  check_lp_params(n, d);
  const std::size_t size = table_size(n);
  lp::LinearProgram prog(size);
  for (PointIndex x = 0; x < size; ++x) {
    prog.objective[x] = f[x];
    prog.lower[x] = -1.0;
    prog.upper[x] = 1.0;
  }
  for (SubsetMask s : low_degree_masks(n, d)) {
    const std::size_t row = prog.add_row(0.0);
    for (PointIndex x = 0; x < size; ++x) prog.at(row, x) = character(s, x);
  }
  const lp::Result r = lp::solve(prog, opt);
  require_solved(r, "resilience");

  std::vector<double> g(r.point);
  for (double& v : g) v = std::clamp(v, -1.0, 1.0);
  ResilienceResult out;
  out.witness = BoundedFunction(n, std::move(g));
  out.d = d;
  out.status = r.status;
  out.lp_value = r.value;
  out.iterations = r.iterations;
  out.alpha = l1_distance(f, out.witness);
  out.resilience = is_d_resilient(out.witness, d, kWitnessTol);
  require(out.resilience.resilient, Errc::invariant_violation,
          "LP witness failed the independent resilience check");
  return out;
}

/// One weighted absolute-deviation term: weight * |label - p(point)|.
struct WeightedSample {
  PointIndex point = 0;
  double label = 0.0;
  double weight = 0.0;
};

/// min over degree-<=d p of sum_i weight_i |label_i - p(x_i)|, split as
/// label - p(x) = r+ - r- with r+, r- >= 0.
inline L1ApproxResult weighted_l1_regression(int n, int d, const std::vector<WeightedSample>& samples,
                                             const lp::Options& opt = {}) {
  check_lp_params(n, d);
  const auto masks = low_degree_masks(n, d);
  const std::size_t k = masks.size();
  lp::LinearProgram prog(k + 2 * samples.size());
  for (std::size_t j = 0; j < k; ++j) {
    prog.lower[j] = -lp::kInf;
    prog.upper[j] = lp::kInf;
  }
  double total_weight = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& smp = samples[i];
    require(smp.weight >= 0.0, Errc::invalid_argument, "sample weights must be nonnegative");
    total_weight += smp.weight;
    const std::size_t row = prog.add_row(smp.label);
    for (std::size_t j = 0; j < k; ++j) prog.at(row, j) = character(masks[j], smp.point);
    prog.at(row, k + 2 * i) = 1.0;
    prog.at(row, k + 2 * i + 1) = -1.0;
    prog.objective[k + 2 * i] = -smp.weight;
    prog.objective[k + 2 * i + 1] = -smp.weight;
  }
  const lp::Result r = lp::solve(prog, opt);
  require_solved(r, "regression");

  L1ApproxResult out;
  out.poly = SparsePolynomial(n, d);
  for (std::size_t j = 0; j < k; ++j) out.poly.set(masks[j], r.point[j]);
  out.status = r.status;
  out.lp_value = -r.value;
  out.iterations = r.iterations;
  double loss = 0.0;
  for (const auto& smp : samples) loss += smp.weight * std::abs(smp.label - out.poly(smp.point));
  out.delta = total_weight > 0.0 ? loss / total_weight : 0.0;
  return out;
}

/// Delta_{P_d}(f) = min_p E|f - p| over degree-<=d polynomials.
inline L1ApproxResult l1_poly_distance(const BooleanFunction& f, int d, const lp::Options& opt = {}) {
  check_lp_params(f.dim(), d);
  std::vector<WeightedSample> samples;
  samples.reserve(f.size());
  for (PointIndex x = 0; x < f.size(); ++x) samples.push_back({x, double(f[x]), 1.0});
  L1ApproxResult out = weighted_l1_regression(f.dim(), d, samples, opt);
  out.delta = l1_distance(BoundedFunction(f).values(), out.poly.to_table());
  return out;
}

struct DualityCertificate {
  double alpha = 0.0;
  double delta = 0.0;
  double gap = 0.0;  ///< |alpha + delta - 1|
  ResilienceResult resilience;
  L1ApproxResult approximation;
};

inline DualityCertificate duality_certificate(const BooleanFunction& f, int d,
                                              const lp::Options& opt = {}) {
  DualityCertificate c;
  c.resilience = distance_to_resilience(f, d, opt);
  c.approximation = l1_poly_distance(f, d, opt);
  c.alpha = c.resilience.alpha;
  c.delta = c.approximation.delta;
  c.gap = std::abs(c.alpha + c.delta - 1.0);
  return c;
}

}  // namespace resil
