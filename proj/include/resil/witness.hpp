#pragma once

// Low-degree truncation witness:
//   l = f_{<=d},  h = f - l,  q = h where |l| <= tau (else 0),
//   p = q_{>d} / ||q_{>d}||_inf.
// p is d-resilient by construction and bounded by normalization.
//
// Boolean f makes 2^n l and 2^n q integer tables, so for n <= 12 the high
// part 4^n q_{>d} is carried in int64 and p is certified with exact zeros.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "resil/error.hpp"
#include "resil/fourier.hpp"

namespace resil {

inline constexpr int kMaxWitnessDimension = 22;
inline constexpr int kExactWitnessDimension = 12;

struct WitnessParams {
  int d = 1;
  double tau = 0.1;
};

struct WitnessReport {
  int n = 0;
  WitnessParams params;
  BoundedFunction p;
  double gamma = 0.0;          ///< sum_{|S|<=d} f^(S)^2
  double ell_sup = 0.0;        ///< ||l||_inf
  double delta_emp = 0.0;      ///< Pr[|l(x)| > tau]
  double corr_qf = 0.0;        ///< E[q f]
  double q_sup = 0.0;          ///< ||q||_inf
  double low_part_sup = 0.0;   ///< ||q_{<=d}||_inf
  double high_sup = 0.0;       ///< ||q_{>d}||_inf
  double corr_pf = 0.0;        ///< E[p f]
  double chain_bound = 0.0;    ///< (corr_qf - low_part_sup) / (q_sup + low_part_sup)
  bool q_in_range = false;     ///< ||q||_inf <= 1 + tau
  ResilienceCheck float_check;  ///< tolerance 1e-10
  bool exact_checked = false;
  bool exact_resilient = false;
};

inline constexpr double kWitnessFloatTol = 1e-10;

namespace detail {

/// 2^n l(x) as integers.
inline std::vector<std::int64_t> scaled_low_part(const BooleanFunction& f, int d) {
  auto c = wht_integer(f);
  for (SubsetMask m = 0; m < c.size(); ++m)
    if (cardinality(m) > d) c[m] = 0;
  wht_butterfly<std::int64_t>(c);  // sum_S 2^n f^(S) chi_S(x)
  return c;
}

inline double sup_norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace detail

inline WitnessReport build_witness(const BooleanFunction& f, const WitnessParams& params) {
  const int n = f.dim();
  require(n <= kMaxWitnessDimension, Errc::dimension_too_large, "witness pipeline limited to n <= 22");
  require(params.d >= 0 && params.d <= n, Errc::invalid_argument, "degree must satisfy 0 <= d <= n");
  require(params.tau > 0.0 && std::isfinite(params.tau), Errc::invalid_argument, "tau must be positive");
  const std::size_t size = f.size();
  const double inv = std::ldexp(1.0, -n);

  WitnessReport rep;
  rep.n = n;
  rep.params = params;
  rep.gamma = wht(f).low_weight(params.d);

  const auto ell2n = detail::scaled_low_part(f, params.d);
  const double cut = params.tau * std::ldexp(1.0, n);
  std::vector<std::int64_t> q2n(size, 0);  // 2^n q(x)
  std::size_t heavy = 0;
  std::int64_t ell_sup2n = 0;
  for (PointIndex x = 0; x < size; ++x) {
    ell_sup2n = std::max(ell_sup2n, std::abs(ell2n[x]));
    if (double(std::abs(ell2n[x])) > cut) {
      ++heavy;
      continue;
    }
    q2n[x] = (std::int64_t(f[x]) << n) - ell2n[x];
  }
  rep.ell_sup = double(ell_sup2n) * inv;
  rep.delta_emp = double(heavy) * inv;

  std::vector<double> q(size);
  for (PointIndex x = 0; x < size; ++x) q[x] = double(q2n[x]) * inv;
  rep.q_sup = detail::sup_norm(q);
  rep.q_in_range = rep.q_sup <= 1.0 + params.tau + kBoundedSlack;
  double corr = 0.0;
  for (PointIndex x = 0; x < size; ++x) corr += q[x] * f[x];
  rep.corr_qf = corr * inv;

  const Spectrum qs = wht(std::span<const double>(q));
  const auto q_low = inverse_wht(truncate(qs, params.d, false));
  const auto q_high = inverse_wht(truncate(qs, params.d, true));
  rep.low_part_sup = detail::sup_norm(q_low);
  rep.high_sup = detail::sup_norm(q_high);
  require(rep.high_sup > 0.0, Errc::degenerate_high_part, "q_{>d} vanishes identically");

  std::vector<double> p(size);
  if (n <= kExactWitnessDimension) {
    // 4^n q_{>d}(x) = sum_{|S|>d} (sum_y 2^n q(y) chi_S(y)) chi_S(x)
    std::vector<std::int64_t> r(q2n);
    wht_butterfly<std::int64_t>(r);
    for (SubsetMask m = 0; m < size; ++m)
      if (cardinality(m) <= params.d) r[m] = 0;
    wht_butterfly<std::int64_t>(r);
    std::int64_t rmax = 0;
    for (auto v : r) rmax = std::max(rmax, std::abs(v));
    require(rmax > 0, Errc::degenerate_high_part, "q_{>d} vanishes identically");
    std::vector<std::int64_t> cert(r);
    wht_butterfly<std::int64_t>(cert);
    rep.exact_checked = true;
    rep.exact_resilient = true;
    for (SubsetMask m = 0; m < size; ++m)
      if (cardinality(m) <= params.d && cert[m] != 0) rep.exact_resilient = false;
    for (PointIndex x = 0; x < size; ++x) p[x] = double(r[x]) / double(rmax);
  } else {
    for (PointIndex x = 0; x < size; ++x) p[x] = q_high[x] / rep.high_sup;
  }
  rep.p = BoundedFunction(n, std::move(p));
  rep.float_check = is_d_resilient(rep.p, params.d, kWitnessFloatTol);
  rep.corr_pf = correlation(f, rep.p);
  rep.chain_bound = (rep.corr_qf - rep.low_part_sup) / (rep.q_sup + rep.low_part_sup);
  return rep;
}

struct ConcentrationProbe {
  double p2norm_lowpart = 0.0;  ///< ||l||_2
  double tail_prob = 0.0;       ///< Pr[|l(x)| >= t ||l||_2]
};

inline ConcentrationProbe concentration_probe(const BooleanFunction& f, int d, double t) {
  require(f.dim() <= kMaxWitnessDimension, Errc::dimension_too_large, "probe limited to n <= 22");
  require(d >= 0, Errc::invalid_argument, "degree must be nonnegative");
  require(t > 0.0, Errc::invalid_argument, "t must be positive");
  const Spectrum s = wht(f);
  ConcentrationProbe out;
  out.p2norm_lowpart = std::sqrt(s.low_weight(d));
  const auto ell = inverse_wht(truncate(s, d, false));
  const double cut = t * out.p2norm_lowpart - 1e-12;
  std::size_t hits = 0;
  for (double v : ell)
    if (std::abs(v) >= cut) ++hits;
  out.tail_prob = double(hits) / double(ell.size());
  return out;
}

}  // namespace resil
