#pragma once

// Dense truth tables on the hypercube {-1,1}^n and their Walsh-Hadamard
// spectra.
//
// Coordinate convention (used everywhere in the library):
//   a point is a PointIndex in [0, 2^n); coordinate j in 1..n reads
//   x_j = +1 when bit (j-1) of the index is 0 and x_j = -1 when it is 1.
// A subset S of [n] is a SubsetMask with bit (j-1) set iff j is in S, so
//   chi_S(x) = (-1)^popcount(S & x).
// Fourier coefficients are expectations: f^(S) = 2^-n sum_x f(x) chi_S(x).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "resil/error.hpp"

namespace resil {

using PointIndex = std::uint64_t;
using SubsetMask = std::uint64_t;

inline constexpr int kMaxDimension = 28;
inline constexpr double kBoundedSlack = 1e-12;

inline int cardinality(SubsetMask s) { return std::popcount(s); }

/// x_j in {-1,+1} for 1-based coordinate j.
inline int coordinate(PointIndex x, int j) { return ((x >> (j - 1)) & 1U) ? -1 : 1; }

inline int character(SubsetMask s, PointIndex x) { return (std::popcount(s & x) & 1) ? -1 : 1; }

/// Hamming sum |x| = sum_i x_i.
inline int hamming_sum(PointIndex x, int n) { return n - 2 * std::popcount(x); }

inline std::size_t table_size(int n) { return std::size_t{1} << n; }

inline void check_dimension(int n) {
  require(n >= 0, Errc::invalid_argument, "dimension must be nonnegative");
  require(n <= kMaxDimension, Errc::dimension_too_large,
          "n = " + std::to_string(n) + " exceeds the dense-table limit of " +
              std::to_string(kMaxDimension));
}

/// All masks of cardinality <= d over n coordinates, in increasing order.
inline std::vector<SubsetMask> low_degree_masks(int n, int d) {
  std::vector<SubsetMask> out;
  for (SubsetMask s = 0; s < table_size(n); ++s)
    if (cardinality(s) <= d) out.push_back(s);
  return out;
}

class BooleanFunction {
 public:
  BooleanFunction() = default;

  BooleanFunction(int n, std::vector<std::int8_t> table) : n_(n), table_(std::move(table)) {
    check_dimension(n);
    require(table_.size() == table_size(n), Errc::dimension_mismatch,
            "truth table length must be 2^n");
    for (auto v : table_) require(v == 1 || v == -1, Errc::not_boolean, "entries must be +-1");
  }

  template <typename Fn>
  static BooleanFunction from(int n, Fn&& fn) {
    check_dimension(n);
    std::vector<std::int8_t> t(table_size(n));
    for (PointIndex x = 0; x < t.size(); ++x) t[x] = static_cast<std::int8_t>(fn(x) > 0 ? 1 : -1);
    return BooleanFunction(n, std::move(t));
  }

  int dim() const { return n_; }
  std::size_t size() const { return table_.size(); }
  int operator[](PointIndex x) const { return table_[x]; }
  std::span<const std::int8_t> values() const { return table_; }

  BooleanFunction negated() const {
    auto t = table_;
    for (auto& v : t) v = static_cast<std::int8_t>(-v);
    return BooleanFunction(n_, std::move(t));
  }

  bool operator==(const BooleanFunction&) const = default;

 private:
  int n_ = 0;
  std::vector<std::int8_t> table_{1};
};

/// Real table with entries in [-1, 1] (up to kBoundedSlack).
class BoundedFunction {
 public:
  BoundedFunction() = default;

  BoundedFunction(int n, std::vector<double> table) : n_(n), table_(std::move(table)) {
    check_dimension(n);
    require(table_.size() == table_size(n), Errc::dimension_mismatch,
            "table length must be 2^n");
    for (double v : table_)
      require(std::isfinite(v) && std::abs(v) <= 1.0 + kBoundedSlack, Errc::out_of_range,
              "bounded function entry outside [-1,1]: " + std::to_string(v));
  }

  explicit BoundedFunction(const BooleanFunction& f)
      : n_(f.dim()), table_(f.values().begin(), f.values().end()) {}

  template <typename Fn>
  static BoundedFunction from(int n, Fn&& fn) {
    check_dimension(n);
    std::vector<double> t(table_size(n));
    for (PointIndex x = 0; x < t.size(); ++x) t[x] = fn(x);
    return BoundedFunction(n, std::move(t));
  }

  int dim() const { return n_; }
  std::size_t size() const { return table_.size(); }
  double operator[](PointIndex x) const { return table_[x]; }
  std::span<const double> values() const { return table_; }

  /// True when every entry is exactly +-1.
  bool is_boolean() const {
    return std::all_of(table_.begin(), table_.end(), [](double v) { return v == 1.0 || v == -1.0; });
  }

  std::optional<BooleanFunction> to_boolean() const {
    if (!is_boolean()) return std::nullopt;
    return BooleanFunction::from(n_, [&](PointIndex x) { return table_[x]; });
  }

  bool operator==(const BoundedFunction&) const = default;

 private:
  int n_ = 0;
  std::vector<double> table_{0.0};
};

class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(int n, std::vector<double> coeffs) : n_(n), coeffs_(std::move(coeffs)) {
    check_dimension(n);
    require(coeffs_.size() == table_size(n), Errc::dimension_mismatch,
            "spectrum length must be 2^n");
  }

  int dim() const { return n_; }
  std::size_t size() const { return coeffs_.size(); }
  double operator[](SubsetMask s) const { return coeffs_[s]; }
  std::span<const double> coeffs() const { return coeffs_; }

  /// sum_{|S| <= d} f^(S)^2
  double low_weight(int d) const {
    double w = 0.0;
    for (SubsetMask s = 0; s < coeffs_.size(); ++s)
      if (cardinality(s) <= d) w += coeffs_[s] * coeffs_[s];
    return w;
  }

  double total_weight() const {
    double w = 0.0;
    for (double c : coeffs_) w += c * c;
    return w;
  }

 private:
  int n_ = 0;
  std::vector<double> coeffs_{0.0};
};

// ---------------------------------------------------------------------------
// Transforms

/// Unnormalized in-place butterfly: a[S] <- sum_x a[x] chi_S(x).
template <typename T>
void wht_butterfly(std::span<T> a) {
  const std::size_t size = a.size();
  for (std::size_t half = 1; half < size; half <<= 1) {
    for (std::size_t base = 0; base < size; base += 2 * half) {
      for (std::size_t i = base; i < base + half; ++i) {
        const T u = a[i];
        const T v = a[i + half];
        a[i] = u + v;
        a[i + half] = u - v;
      }
    }
  }
}

inline int dimension_of(std::size_t size) {
  require(size != 0 && std::has_single_bit(size), Errc::dimension_mismatch,
          "table length must be a power of two");
  return std::countr_zero(size);
}

/// Forward transform of an arbitrary real table.
inline Spectrum wht(std::span<const double> table) {
  const int n = dimension_of(table.size());
  check_dimension(n);
  std::vector<double> a(table.begin(), table.end());
  wht_butterfly<double>(a);
  const double scale = std::ldexp(1.0, -n);
  for (double& c : a) c *= scale;
  return Spectrum(n, std::move(a));
}

inline Spectrum wht(const BoundedFunction& f) { return wht(f.values()); }

inline Spectrum wht(const BooleanFunction& f) {
  std::vector<double> t(f.values().begin(), f.values().end());
  return wht(std::span<const double>(t));
}

/// Exact integer spectrum: entry S is 2^n * f^(S).
inline std::vector<std::int64_t> wht_integer(const BooleanFunction& f) {
  std::vector<std::int64_t> a(f.values().begin(), f.values().end());
  wht_butterfly<std::int64_t>(a);
  return a;
}

/// Reconstructs the table sum_S f^(S) chi_S(x).
inline std::vector<double> inverse_wht(const Spectrum& s) {
  std::vector<double> a(s.coeffs().begin(), s.coeffs().end());
  wht_butterfly<double>(a);
  return a;
}

/// Keeps only the coefficients with |S| <= d (or > d when `high` is set).
inline Spectrum truncate(const Spectrum& s, int d, bool high = false) {
  std::vector<double> c(s.coeffs().begin(), s.coeffs().end());
  for (SubsetMask m = 0; m < c.size(); ++m)
    if ((cardinality(m) <= d) == high) c[m] = 0.0;
  return Spectrum(s.dim(), std::move(c));
}

// ---------------------------------------------------------------------------
// Spectral statistics

struct SpectralStats {
  double low_weight = 0.0;
  double total_influence = 0.0;
  std::vector<double> per_coordinate_influence;
  /// sum_S |S| f^(S)^2; equals total_influence for Boolean functions.
  double fourier_influence = 0.0;
};

/// Edge-count influences Pr[f(x) != f(x^(+i))].
inline std::vector<double> edge_influences(const BooleanFunction& f) {
  const int n = f.dim();
  std::vector<double> inf(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const PointIndex bit = PointIndex{1} << i;
    std::uint64_t cut = 0;
    for (PointIndex x = 0; x < f.size(); ++x)
      if (!(x & bit) && f[x] != f[x | bit]) ++cut;
    inf[i] = std::ldexp(static_cast<double>(2 * cut), -n);
  }
  return inf;
}

inline std::vector<double> fourier_influences(const Spectrum& s) {
  std::vector<double> inf(s.dim(), 0.0);
  for (SubsetMask m = 0; m < s.size(); ++m) {
    const double w = s[m] * s[m];
    for (SubsetMask r = m; r; r &= r - 1) inf[std::countr_zero(r)] += w;
  }
  return inf;
}

inline SpectralStats spectral_stats_from(const Spectrum& s, int d) {
  SpectralStats st;
  st.low_weight = s.low_weight(d);
  st.per_coordinate_influence = fourier_influences(s);
  for (SubsetMask m = 0; m < s.size(); ++m) st.fourier_influence += cardinality(m) * s[m] * s[m];
  st.total_influence = st.fourier_influence;
  return st;
}

inline SpectralStats spectral_stats(const BooleanFunction& f, int d) {
  SpectralStats st = spectral_stats_from(wht(f), d);
  st.per_coordinate_influence = edge_influences(f);
  st.total_influence = 0.0;
  for (double v : st.per_coordinate_influence) st.total_influence += v;
  return st;
}

inline SpectralStats spectral_stats(const BoundedFunction& f, int d) {
  return spectral_stats_from(wht(f), d);
}

inline double total_influence(const BooleanFunction& f) {
  double s = 0.0;
  for (double v : edge_influences(f)) s += v;
  return s;
}

// ---------------------------------------------------------------------------
// Noise sensitivity

inline void check_noise_rate(double delta) {
  require(delta >= 0.0 && delta <= 1.0, Errc::invalid_argument,
          "noise rate must lie in [0,1]");
}

/// NS_delta[f] = (1 - sum_S (1-2 delta)^|S| f^(S)^2) / 2.
inline double noise_sensitivity(const Spectrum& s, double delta) {
  check_noise_rate(delta);
  const double rho = 1.0 - 2.0 * delta;
  std::vector<double> rho_pow(s.dim() + 1, 1.0);
  for (int k = 1; k <= s.dim(); ++k) rho_pow[k] = rho_pow[k - 1] * rho;
  double stab = 0.0;
  for (SubsetMask m = 0; m < s.size(); ++m) stab += rho_pow[cardinality(m)] * s[m] * s[m];
  return std::clamp(0.5 - 0.5 * stab, 0.0, 1.0);
}

inline double noise_sensitivity(const BooleanFunction& f, double delta) {
  return noise_sensitivity(wht(f), delta);
}

inline constexpr int kDirectNoiseLimit = 14;

/// Pr[f(y) != f(z)] summed over every (y, z) pair with its flip-pattern weight.
inline double noise_sensitivity_direct(const BooleanFunction& f, double delta) {
  check_noise_rate(delta);
  const int n = f.dim();
  require(n <= kDirectNoiseLimit, Errc::dimension_too_large,
          "direct noise-sensitivity enumeration is limited to n <= 14");
  std::vector<double> pattern_weight(n + 1);
  for (int k = 0; k <= n; ++k)
    pattern_weight[k] = std::pow(delta, k) * std::pow(1.0 - delta, n - k);
  double total = 0.0;
  for (PointIndex e = 0; e < f.size(); ++e) {
    std::uint64_t disagree = 0;
    for (PointIndex y = 0; y < f.size(); ++y)
      if (f[y] != f[y ^ e]) ++disagree;
    total += pattern_weight[std::popcount(e)] * static_cast<double>(disagree);
  }
  return std::ldexp(total, -n);
}

// ---------------------------------------------------------------------------
// Distance, correlation, resilience

inline void check_same_dim(int a, int b) {
  require(a == b, Errc::dimension_mismatch,
          "dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

inline double correlation(std::span<const double> f, std::span<const double> g) {
  check_same_dim(dimension_of(f.size()), dimension_of(g.size()));
  double s = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) s += f[x] * g[x];
  return s / static_cast<double>(f.size());
}

/// E|f - g|
inline double l1_distance(std::span<const double> f, std::span<const double> g) {
  check_same_dim(dimension_of(f.size()), dimension_of(g.size()));
  double s = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) s += std::abs(f[x] - g[x]);
  return s / static_cast<double>(f.size());
}

inline double correlation(const BoundedFunction& f, const BoundedFunction& g) {
  return correlation(f.values(), g.values());
}
inline double l1_distance(const BoundedFunction& f, const BoundedFunction& g) {
  return l1_distance(f.values(), g.values());
}
inline double correlation(const BooleanFunction& f, const BoundedFunction& g) {
  return correlation(BoundedFunction(f), g);
}
inline double l1_distance(const BooleanFunction& f, const BoundedFunction& g) {
  return l1_distance(BoundedFunction(f), g);
}

struct ResilienceCheck {
  bool resilient = true;
  SubsetMask worst_mask = 0;
  double worst_value = 0.0;
};

inline ResilienceCheck check_resilience(const Spectrum& s, int d, double tol) {
  ResilienceCheck r;
  for (SubsetMask m = 0; m < s.size(); ++m) {
    if (cardinality(m) > d) continue;
    if (std::abs(s[m]) > std::abs(r.worst_value)) {
      r.worst_value = s[m];
      r.worst_mask = m;
    }
  }
  r.resilient = std::abs(r.worst_value) <= tol;
  return r;
}

inline constexpr double kResilienceTol = 1e-9;

inline ResilienceCheck is_d_resilient(const BoundedFunction& g, int d, double tol = kResilienceTol) {
  return check_resilience(wht(g), d, tol);
}

inline ResilienceCheck is_d_resilient(const BooleanFunction& g, int d, double tol = kResilienceTol) {
  return check_resilience(wht(g), d, tol);
}

/// Integer certificate: every 2^n f^(S) with |S| <= d is exactly zero.
inline bool is_d_resilient_exact(const BooleanFunction& f, int d) {
  const auto c = wht_integer(f);
  for (SubsetMask m = 0; m < c.size(); ++m)
    if (cardinality(m) <= d && c[m] != 0) return false;
  return true;
}

/// Largest d with all coefficients of order <= d below tol; -1 if f^(empty) != 0.
inline int resilience_order(const Spectrum& s, double tol = kResilienceTol) {
  int first_bad = s.dim() + 1;
  for (SubsetMask m = 0; m < s.size(); ++m)
    if (std::abs(s[m]) > tol) first_bad = std::min(first_bad, cardinality(m));
  return first_bad - 1;
}

inline int resilience_order_exact(const BooleanFunction& f) {
  const auto c = wht_integer(f);
  int first_bad = f.dim() + 1;
  for (SubsetMask m = 0; m < c.size(); ++m)
    if (c[m] != 0) first_bad = std::min(first_bad, cardinality(m));
  return first_bad - 1;
}

}  // namespace resil
