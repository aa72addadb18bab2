#pragma once

// Named Boolean functions: Tribes (with its closed-form spectrum), CycleRun,
// majority, parity, dictator, AND, and the symmetric threshold functions f_t
// with binomial-exact statistics.
//
// Sign conventions are per function:
//   tribes / and_function: an input is TRUE when x_j = -1 (bit set) and a TRUE
//     output is encoded as -1.
//   cyclerun: +1 when the 1-player (x_j = +1, bit clear) wins.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "resil/error.hpp"
#include "resil/fourier.hpp"

namespace resil {

// ---------------------------------------------------------------------------
// Tribes

struct TribesParams {
  int w = 1;
  int s = 1;
  int n() const { return w * s; }
};

inline void check_tribes(const TribesParams& p) {
  require(p.w >= 1 && p.s >= 1, Errc::invalid_argument, "tribes needs w >= 1 and s >= 1");
  require(p.w * p.s <= kMaxDimension, Errc::dimension_too_large, "tribes arity w*s exceeds 28");
}

/// Block b occupies bits [b*w, (b+1)*w).
inline BooleanFunction tribes(int w, int s) {
  const TribesParams p{w, s};
  check_tribes(p);
  const PointIndex block = (PointIndex{1} << w) - 1;
  return BooleanFunction::from(p.n(), [&](PointIndex x) {
    for (int b = 0; b < s; ++b)
      if (((x >> (b * w)) & block) == block) return -1;
    return 1;
  });
}

inline double tribes_coefficient(int w, int s, SubsetMask t) {
  const TribesParams p{w, s};
  check_tribes(p);
  require(t < table_size(p.n()), Errc::invalid_argument, "mask outside tribes arity");
  const double q = 1.0 - std::ldexp(1.0, -w);
  if (t == 0) return 2.0 * std::pow(q, s) - 1.0;
  const PointIndex block = (PointIndex{1} << w) - 1;
  int k = 0;
  for (int b = 0; b < s; ++b)
    if ((t >> (b * w)) & block) ++k;
  const double sign = ((k + cardinality(t)) & 1) ? -1.0 : 1.0;
  return 2.0 * sign * std::ldexp(1.0, -k * w) * std::pow(q, s - k);
}

/// 2 (2 ln n)^(2d+4) / n for n = w*s.
inline double tribes_weight_bound(int w, int s, int d) {
  const TribesParams p{w, s};
  require(p.w >= 1 && p.s >= 1 && d >= 0, Errc::invalid_argument, "tribes bound needs w,s >= 1, d >= 0");
  const double n = double(p.n());
  return 2.0 * std::pow(2.0 * std::log(n), 2 * d + 4) / n;
}

/// s closest to ln(2) * 2^w.
inline int tribes_balanced_s(int w) { return int(std::lround(std::numbers::ln2 * std::ldexp(1.0, w))); }

// ---------------------------------------------------------------------------
// Simple functions

inline BooleanFunction majority(int n) {
  require(n >= 1 && n % 2 == 1, Errc::invalid_argument, "majority needs odd n");
  return BooleanFunction::from(n, [&](PointIndex x) { return hamming_sum(x, n); });
}

inline BooleanFunction parity(SubsetMask s, int n) {
  check_dimension(n);
  require(s < table_size(n), Errc::invalid_argument, "parity mask outside dimension");
  return BooleanFunction::from(n, [&](PointIndex x) { return character(s, x); });
}

/// chi_[k] on n variables.
inline BooleanFunction parity_prefix(int k, int n) {
  require(k >= 0 && k <= n, Errc::invalid_argument, "parity prefix needs 0 <= k <= n");
  return parity((SubsetMask{1} << k) - 1, n);
}

inline BooleanFunction dictator(int i, int n) {
  check_dimension(n);
  require(i >= 1 && i <= n, Errc::invalid_argument, "dictator index must be in 1..n");
  return BooleanFunction::from(n, [&](PointIndex x) { return coordinate(x, i); });
}

/// AND of n inputs: -1 only on the all-TRUE point (all bits set).
inline BooleanFunction and_function(int n) {
  require(n >= 1, Errc::invalid_argument, "AND needs n >= 1");
  return tribes(n, 1);
}

// ---------------------------------------------------------------------------
// CycleRun

inline constexpr int kMaxCycleRunDimension = 25;

struct CycleRunOutcome {
  int value = 0;
  int stage = 0;  ///< 1, 2, 3 decided by that stage; 4 = sign fallback
};

/// Rotate the low n bits of x right by r: coordinate j+r moves to j.
inline PointIndex rotate_bits(PointIndex x, int r, int n) {
  const PointIndex mask = (PointIndex{1} << n) - 1;
  r %= n;
  if (r == 0) return x & mask;
  return ((x >> r) | (x << (n - r))) & mask;
}

inline void check_cyclerun_dimension(int n) {
  require(n >= 3 && n % 2 == 1, Errc::invalid_argument, "CycleRun needs odd n >= 3");
  require(n <= kMaxCycleRunDimension, Errc::dimension_too_large, "CycleRun limited to n <= 25");
}

/// Three-stage run game on the cycle 1..n (clockwise = increasing index).
inline CycleRunOutcome cyclerun_outcome(PointIndex x, int n) {
  const PointIndex mask = (PointIndex{1} << n) - 1;
  x &= mask;
  if (x == 0) return {1, 1};
  if (x == mask) return {-1, 1};

  auto bit = [&](int j) { return int((x >> (j % n)) & 1U); };
  int start = 0;  // some position where a run begins
  while (bit(start) == bit(start + n - 1)) ++start;

  struct Run {
    int player;
    int begin;
    int len;
  };
  std::array<Run, 64> runs{};
  int count = 0;
  for (int pos = 0; pos < n;) {
    const int b = bit(start + pos);
    int len = 0;
    while (pos + len < n && bit(start + pos + len) == b) ++len;
    runs[count++] = {b ? -1 : 1, pos, len};
    pos += len;
  }

  int longest[2] = {0, 0};  // [0] 1-player, [1] -1-player
  for (int i = 0; i < count; ++i) {
    int& l = longest[runs[i].player < 0];
    l = std::max(l, runs[i].len);
  }
  if (longest[0] != longest[1]) return {longest[0] > longest[1] ? 1 : -1, 1};

  const int top = longest[0];
  int number[2] = {0, 0};
  for (int i = 0; i < count; ++i)
    if (runs[i].len == top) ++number[runs[i].player < 0];
  if (number[0] != number[1]) return {number[0] > number[1] ? 1 : -1, 2};

  // Segment after each maximal run, up to the next maximal run, goes to the
  // owner of the run it starts from.
  int credit[2] = {0, 0};
  int first = -1;
  int prev = -1;
  for (int i = 0; i < count; ++i) {
    if (runs[i].len != top) continue;
    if (prev >= 0) credit[runs[prev].player < 0] += runs[i].begin - (runs[prev].begin + top);
    else first = i;
    prev = i;
  }
  credit[runs[prev].player < 0] += n + runs[first].begin - (runs[prev].begin + top);
  if (credit[0] != credit[1]) return {credit[0] > credit[1] ? 1 : -1, 3};

  return {hamming_sum(x, n) > 0 ? 1 : -1, 4};
}

inline int cyclerun_value(PointIndex x, int n) { return cyclerun_outcome(x, n).value; }

struct CycleRunTable {
  BooleanFunction f;
  std::size_t fallback_count = 0;
};

inline CycleRunTable cyclerun_with_stats(int n) {
  check_cyclerun_dimension(n);
  CycleRunTable out;
  out.f = BooleanFunction::from(n, [&](PointIndex x) {
    const auto o = cyclerun_outcome(x, n);
    if (o.stage == 4) ++out.fallback_count;
    return o.value;
  });
  return out;
}

inline BooleanFunction cyclerun(int n) { return cyclerun_with_stats(n).f; }

// ---------------------------------------------------------------------------
// Symmetric functions and f_t

/// Function of the Hamming sum only; level k holds the value at points with
/// k coordinates equal to -1, i.e. sum x_i = n - 2k.
class SymmetricFunction {
 public:
  SymmetricFunction(int n, std::vector<double> levels) : n_(n), levels_(std::move(levels)) {
    require(n >= 0, Errc::invalid_argument, "dimension must be nonnegative");
    require(levels_.size() == std::size_t(n) + 1, Errc::dimension_mismatch, "need n+1 levels");
    for (double v : levels_)
      require(std::abs(v) <= 1.0 + kBoundedSlack, Errc::out_of_range, "level value outside [-1,1]");
  }

  int dim() const { return n_; }
  const std::vector<double>& levels() const { return levels_; }
  double at_level(int k) const { return levels_.at(std::size_t(k)); }
  double operator()(PointIndex x) const { return levels_[std::size_t(std::popcount(x))]; }

  BoundedFunction materialize() const {
    return BoundedFunction::from(n_, [&](PointIndex x) { return (*this)(x); });
  }

 private:
  int n_;
  std::vector<double> levels_;
};

inline void check_ft(double t, int n) {
  require(n >= 1 && n <= 1000000, Errc::invalid_argument, "f_t needs 1 <= n <= 10^6");
  require(t >= 0.0 && std::isfinite(t), Errc::invalid_argument, "f_t needs t >= 0");
}

/// f_t(x) = sign(|x|) when |sum x| > t sqrt(n), else 0.
inline int ft_level_value(int k, double t, int n) {
  const int sum = n - 2 * k;
  const double cut = t * std::sqrt(double(n));
  if (double(sum) > cut) return 1;
  if (double(sum) < -cut) return -1;
  return 0;
}

inline SymmetricFunction threshold_ft(double t, int n) {
  check_ft(t, n);
  std::vector<double> levels(std::size_t(n) + 1);
  for (int k = 0; k <= n; ++k) levels[std::size_t(k)] = ft_level_value(k, t, n);
  return SymmetricFunction(n, std::move(levels));
}

struct FtStats {
  double influence_sum = 0.0;  ///< E[f_t(x) * sum_i x_i]
  double support_prob = 0.0;   ///< Pr[f_t(x) != 0]
  bool exact = false;          ///< integer binomial path was used
};

inline constexpr int kFtExactLimit = 64;

__extension__ using Int128 = __int128;
__extension__ using UInt128 = unsigned __int128;

/// ln C(n, k)
inline double log_binomial(int n, int k) {
  return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) - std::lgamma(double(n - k) + 1.0);
}

inline FtStats ft_stats(double t, int n) {
  check_ft(t, n);
  FtStats out;
  if (n <= kFtExactLimit) {
    // Numerators over 2^n, accumulated exactly.
    Int128 inf = 0;
    UInt128 support = 0;
    UInt128 c = 1;  // C(n, k)
    for (int k = 0; k <= n; ++k) {
      const int v = ft_level_value(k, t, n);
      if (v != 0) {
        inf += Int128(c) * v * (n - 2 * k);
        support += c;
      }
      c = c * unsigned(n - k) / unsigned(k + 1);
    }
    const long double scale = std::ldexp(1.0L, -n);
    out.influence_sum = double(static_cast<long double>(inf) * scale);
    out.support_prob = double(static_cast<long double>(support) * scale);
    out.exact = true;
    return out;
  }
  long double inf = 0.0L;
  long double support = 0.0L;
  const double ln2n = double(n) * std::numbers::ln2;
  for (int k = 0; k <= n; ++k) {
    const int v = ft_level_value(k, t, n);
    if (v == 0) continue;
    const long double pk = std::exp(static_cast<long double>(log_binomial(n, k) - ln2n));
    inf += pk * v * (n - 2 * k);
    support += pk;
  }
  out.influence_sum = double(inf);
  out.support_prob = double(support);
  return out;
}

/// Pr[sum x_i = s] for a level s of the same parity as n (0 otherwise).
inline double hamming_level_prob(int s, int n) {
  require(n >= 1, Errc::invalid_argument, "n must be positive");
  if (std::abs(s) > n || (n - s) % 2 != 0) return 0.0;
  const int k = (n - s) / 2;
  return std::exp(log_binomial(n, k) - double(n) * std::numbers::ln2);
}

enum class PhiNormalization { printed, standard };

inline const char* to_string(PhiNormalization p) {
  return p == PhiNormalization::printed ? "printed" : "standard";
}

/// exp(-u^2/2) / (2 pi) as printed, or / sqrt(2 pi) for the standard density.
inline double phi(double u, PhiNormalization norm) {
  const double c = norm == PhiNormalization::printed ? 1.0 / (2.0 * std::numbers::pi)
                                                    : std::numbers::inv_sqrtpi / std::numbers::sqrt2;
  return c * std::exp(-u * u / 2.0);
}

/// One row of the Gaussian sandwich comparison for f_t.
struct FtEstimateRow {
  int n = 0;
  double t = 0.0;
  PhiNormalization norm = PhiNormalization::standard;
  double phi_t = 0.0;
  double influence_sum = 0.0;
  double support_prob = 0.0;
  int level = 0;            ///< smallest attainable sum x_i strictly above t sqrt(n)
  double level_prob = 0.0;  ///< Pr[sum x_i = level]
  // Ratios against the printed constants 3 (first two) and 4 (third).
  double inf_ratio = 0.0;      ///< Inf / (phi sqrt n)
  double support_ratio = 0.0;  ///< Pr[f_t != 0] / (phi / t)
  double level_ratio = 0.0;    ///< level_prob / (phi / sqrt n)
  bool holds_printed_factor = false;  ///< 1/3..3, 1/3..3, <= 4
  bool holds_relaxed_factor = false;  ///< 1/4..4, 1/4..4, <= 4
};

inline FtEstimateRow ft_estimate_row(double t, int n, PhiNormalization norm) {
  require(t > 0.0, Errc::invalid_argument, "estimates need t > 0");
  const FtStats st = ft_stats(t, n);
  FtEstimateRow r;
  r.n = n;
  r.t = t;
  r.norm = norm;
  r.phi_t = phi(t, norm);
  r.influence_sum = st.influence_sum;
  r.support_prob = st.support_prob;
  const double rn = std::sqrt(double(n));
  int level = n;
  for (int k = n; k >= 0; --k)
    if (double(n - 2 * k) > t * rn) {
      level = n - 2 * k;
      break;
    }
  r.level = level;
  r.level_prob = hamming_level_prob(level, n);
  r.inf_ratio = r.influence_sum / (r.phi_t * rn);
  r.support_ratio = r.support_prob / (r.phi_t / t);
  r.level_ratio = r.level_prob / (r.phi_t / rn);
  auto within = [](double v, double f) { return v >= 1.0 / f && v <= f; };
  r.holds_printed_factor = within(r.inf_ratio, 3.0) && within(r.support_ratio, 3.0) && r.level_ratio <= 4.0;
  r.holds_relaxed_factor = within(r.inf_ratio, 4.0) && within(r.support_ratio, 4.0) && r.level_ratio <= 4.0;
  return r;
}

}  // namespace resil
