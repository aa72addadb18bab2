#pragma once

// Greedy (n,k,d)-designs, junta embeddings f_S, and Gram checks for families
// of embedded resilient functions.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "resil/error.hpp"
#include "resil/fourier.hpp"

namespace resil {

inline constexpr std::size_t kMaxDesignCandidates = 5000000;

struct Design {
  int n = 0;
  int k = 0;
  int d = 0;
  std::vector<SubsetMask> sets;  ///< bit j-1 set iff j in the set
};

/// Sorted 1-based indices of a mask.
inline std::vector<int> mask_indices(SubsetMask s) {
  std::vector<int> out;
  for (int j = 0; s != 0; ++j, s >>= 1)
    if (s & 1U) out.push_back(j + 1);
  return out;
}

inline SubsetMask indices_mask(const std::vector<int>& idx, int n) {
  SubsetMask m = 0;
  for (int j : idx) {
    require(j >= 1 && j <= n, Errc::invalid_argument, "index outside 1..n");
    require(!((m >> (j - 1)) & 1U), Errc::invalid_argument, "repeated index");
    m |= SubsetMask{1} << (j - 1);
  }
  return m;
}

inline std::optional<std::pair<std::size_t, std::size_t>> find_design_violation(const Design& D) {
  for (std::size_t i = 0; i < D.sets.size(); ++i) {
    if (cardinality(D.sets[i]) != D.k) return std::make_pair(i, i);
    for (std::size_t j = i + 1; j < D.sets.size(); ++j)
      if (cardinality(D.sets[i] & D.sets[j]) > D.d) return std::make_pair(i, j);
  }
  return std::nullopt;
}

inline bool is_valid_design(const Design& D) { return !find_design_violation(D).has_value(); }

/// All k-subsets of [n] in lexicographic order of their sorted index lists.
inline std::vector<SubsetMask> k_subsets_lex(int n, int k) {
  std::vector<SubsetMask> out;
  std::vector<int> c(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) c[std::size_t(i)] = i;
  while (true) {
    SubsetMask m = 0;
    for (int v : c) m |= SubsetMask{1} << v;
    out.push_back(m);
    require(out.size() <= kMaxDesignCandidates, Errc::dimension_too_large, "too many candidate subsets");
    int i = k - 1;
    while (i >= 0 && c[std::size_t(i)] == n - k + i) --i;
    if (i < 0) break;
    ++c[std::size_t(i)];
    for (int j = i + 1; j < k; ++j) c[std::size_t(j)] = c[std::size_t(j - 1)] + 1;
  }
  return out;
}

struct DesignOrder {
  bool shuffled = false;
  std::uint64_t seed = 0;
};

inline Design greedy_design(int n, int k, int d, DesignOrder order = {}) {
  require(n >= 1 && n <= 63, Errc::invalid_argument, "design needs 1 <= n <= 63");
  require(d >= 0 && d < k && k <= n, Errc::invalid_argument, "design needs 0 <= d < k <= n");
  auto cand = k_subsets_lex(n, k);
  if (order.shuffled) {
    // Fisher-Yates with raw 64-bit draws so the order is platform independent.
    std::mt19937_64 rng(order.seed);
    for (std::size_t i = cand.size(); i > 1; --i) std::swap(cand[i - 1], cand[rng() % i]);
  }
  Design D{n, k, d, {}};
  for (SubsetMask c : cand) {
    bool ok = true;
    for (SubsetMask s : D.sets)
      if (cardinality(c & s) > d) {
        ok = false;
        break;
      }
    if (ok) D.sets.push_back(c);
  }
  return D;
}

/// (n d / (e^2 k^2))^d
inline double design_size_bound(int n, int k, int d) {
  require(k >= 1 && d >= 0, Errc::invalid_argument, "bound needs k >= 1, d >= 0");
  if (d == 0) return 1.0;
  const double e2 = std::numbers::e * std::numbers::e;
  return std::pow(double(n) * d / (e2 * double(k) * k), d);
}

/// Guaranteed size floor max(1, floor(bound)); only meaningful for d >= 1.
inline std::size_t design_size_floor(int n, int k, int d) {
  return std::size_t(std::max(1.0, std::floor(design_size_bound(n, k, d))));
}

// ---------------------------------------------------------------------------
// Junta embedding

/// f_S(x) = g(x restricted to S): coordinate i of g reads ambient coordinate
/// target[i-1] (1-based).
template <typename Fn>
inline Fn junta_embed(const Fn& g, const std::vector<int>& target, int ambient_n) {
  check_dimension(ambient_n);
  require(int(target.size()) == g.dim(), Errc::dimension_mismatch, "target set size must equal base arity");
  indices_mask(target, ambient_n);  // validates range and distinctness
  const int k = g.dim();
  return Fn::from(ambient_n, [&](PointIndex x) {
    PointIndex sub = 0;
    for (int i = 0; i < k; ++i) sub |= ((x >> (target[std::size_t(i)] - 1)) & 1U) << i;
    return g[sub];
  });
}

template <typename Fn>
inline Fn junta_embed(const Fn& g, SubsetMask target, int ambient_n) {
  return junta_embed(g, mask_indices(target), ambient_n);
}

// ---------------------------------------------------------------------------
// Orthogonal families

struct OrthogonalFamily {
  Design design;
  int g_order = 0;  ///< resilience order of the base function
  std::vector<BoundedFunction> members;
  std::vector<double> gram;             ///< m x m, E[g_Si g_Sj]
  std::vector<std::int64_t> gram_exact; ///< m x m, sum_x g_Si g_Sj; Boolean base only
  double max_off_diagonal = 0.0;
  bool exact = false;
  bool orthogonal = false;
};

inline constexpr int kMaxGramDimension = 22;
inline constexpr double kGramTol = 1e-10;

inline OrthogonalFamily orthogonal_family(const BoundedFunction& g, const Design& design) {
  require(g.dim() == design.k, Errc::dimension_mismatch, "base arity must equal the design's k");
  require(design.n <= kMaxGramDimension, Errc::dimension_too_large, "Gram check limited to n <= 22");
  require(is_valid_design(design), Errc::invalid_argument, "design fails its intersection bound");
  OrthogonalFamily fam;
  fam.design = design;
  const auto boolean = g.to_boolean();
  fam.g_order = boolean ? resilience_order_exact(*boolean) : resilience_order(wht(g));
  require(design.d <= fam.g_order, Errc::resilience_mismatch,
          "design intersections exceed the resilience order of g");

  const std::size_t m = design.sets.size();
  for (SubsetMask s : design.sets) fam.members.push_back(junta_embed(g, s, design.n));
  fam.gram.assign(m * m, 0.0);
  fam.exact = boolean.has_value();
  if (fam.exact) fam.gram_exact.assign(m * m, 0);
  const double inv = std::ldexp(1.0, -design.n);
  fam.orthogonal = true;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const auto a = fam.members[i].values();
      const auto b = fam.members[j].values();
      double v;
      if (fam.exact) {
        std::int64_t acc = 0;
        for (std::size_t x = 0; x < a.size(); ++x) acc += std::int64_t(a[x]) * std::int64_t(b[x]);
        fam.gram_exact[i * m + j] = fam.gram_exact[j * m + i] = acc;
        v = double(acc) * inv;
        if (i != j && acc != 0) fam.orthogonal = false;
      } else {
        double acc = 0.0;
        for (std::size_t x = 0; x < a.size(); ++x) acc += a[x] * b[x];
        v = acc * inv;
        if (i != j && std::abs(v) > kGramTol) fam.orthogonal = false;
      }
      fam.gram[i * m + j] = fam.gram[j * m + i] = v;
      if (i != j) fam.max_off_diagonal = std::max(fam.max_off_diagonal, std::abs(v));
    }
  return fam;
}

}  // namespace resil
