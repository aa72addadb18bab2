#pragma once

// Disjoint composition (G o g)(x^1..x^m) = E[G(b(g(x^1)), ..., b(g(x^m)))],
// where b(t) is +1 with probability (1+t)/2. Independence of the b bits makes
// this the multilinear extension of G at (g(x^1), ..., g(x^m)), which is
// what evaluate() computes by folding G's table one coordinate at a time.
//
// Block i of a composed point occupies coordinates [i*a, (i+1)*a) where a is
// the inner arity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <thread>
#include <variant>
#include <vector>

#include "resil/error.hpp"
#include "resil/fourier.hpp"

namespace resil {

inline constexpr int kMaxMaterializeArity = 22;
inline constexpr int kMaxOuterArity = 16;

/// One bit per coordinate: 1 means x_j = -1.
using BitPoint = std::vector<std::uint8_t>;

class ComposedFunction;
using ComposedPtr = std::shared_ptr<const ComposedFunction>;

class ComposedFunction {
 public:
  /// Leaf: a plain bounded table.
  explicit ComposedFunction(BoundedFunction leaf) : leaf_(std::move(leaf)), arity_(leaf_->dim()) {}

  ComposedFunction(BoundedFunction outer, ComposedPtr inner)
      : outer_(std::move(outer)), inner_(std::move(inner)) {
    require(inner_ != nullptr, Errc::invalid_argument, "inner function missing");
    require(outer_->dim() <= kMaxOuterArity, Errc::dimension_too_large, "outer arity limited to 16");
    arity_ = outer_->dim() * inner_->arity();
    depth_ = inner_->depth() + 1;
  }

  bool is_leaf() const { return leaf_.has_value(); }
  int arity() const { return arity_; }
  int depth() const { return depth_; }
  const BoundedFunction& outer() const { return is_leaf() ? *leaf_ : *outer_; }
  const ComposedPtr& inner() const { return inner_; }

  /// Value at a point given as bits[offset .. offset+arity).
  double evaluate(std::span<const std::uint8_t> bits) const {
    require(bits.size() == std::size_t(arity_), Errc::dimension_mismatch, "point length must equal arity");
    if (is_leaf()) {
      PointIndex x = 0;
      for (int j = 0; j < arity_; ++j) x |= PointIndex(bits[std::size_t(j)] & 1U) << j;
      return (*leaf_)[x];
    }
    const int m = outer_->dim();
    const std::size_t a = std::size_t(inner_->arity());
    std::vector<double> v(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) v[std::size_t(i)] = inner_->evaluate(bits.subspan(std::size_t(i) * a, a));
    return fold(v);
  }

  double evaluate_index(PointIndex x) const {
    require(arity_ <= 64, Errc::dimension_too_large, "index evaluation needs arity <= 64");
    BitPoint bits(static_cast<std::size_t>(arity_));
    for (int j = 0; j < arity_; ++j) bits[std::size_t(j)] = std::uint8_t((x >> j) & 1U);
    return evaluate(bits);
  }

  /// Multilinear extension of the outer table at v in [-1,1]^m.
  double fold(std::span<const double> v) const {
    const auto& t = outer().values();
    std::vector<double> cur(t.begin(), t.end());
    std::size_t len = cur.size();
    for (std::size_t i = 0; i < v.size(); ++i) {
      // coordinate i is the lowest remaining bit
      const double up = (1.0 + v[i]) / 2.0;
      const double down = (1.0 - v[i]) / 2.0;
      len /= 2;
      for (std::size_t k = 0; k < len; ++k) cur[k] = up * cur[2 * k] + down * cur[2 * k + 1];
    }
    return std::clamp(cur[0], -1.0, 1.0);
  }

 private:
  std::optional<BoundedFunction> leaf_;
  std::optional<BoundedFunction> outer_;
  ComposedPtr inner_;
  int arity_ = 0;
  int depth_ = 0;
};

inline ComposedPtr leaf(const BoundedFunction& g) { return std::make_shared<const ComposedFunction>(g); }
inline ComposedPtr leaf(const BooleanFunction& g) { return leaf(BoundedFunction(g)); }

inline ComposedPtr compose(const BoundedFunction& outer, ComposedPtr inner) {
  return std::make_shared<const ComposedFunction>(outer, std::move(inner));
}

inline ComposedPtr compose(const BoundedFunction& outer, const BoundedFunction& inner) {
  return compose(outer, leaf(inner));
}

/// g_0 = g, g_k = g o g_{k-1}.
inline ComposedPtr self_compose(const BoundedFunction& g, int k) {
  require(k >= 0, Errc::invalid_argument, "composition depth must be nonnegative");
  ComposedPtr cur = leaf(g);
  for (int i = 0; i < k; ++i) cur = compose(g, cur);
  return cur;
}

/// Dense table of a composition; inner tables are materialized once.
inline BoundedFunction materialize(const ComposedFunction& c) {
  require(c.arity() <= kMaxMaterializeArity, Errc::dimension_too_large,
          "materialize limited to total arity 22");
  if (c.is_leaf()) return c.outer();
  const BoundedFunction in = materialize(*c.inner());
  const int a = in.dim();
  const int m = c.outer().dim();
  const PointIndex block = (PointIndex{1} << a) - 1;
  std::vector<double> v(static_cast<std::size_t>(m));
  return BoundedFunction::from(c.arity(), [&](PointIndex x) {
    for (int i = 0; i < m; ++i) v[std::size_t(i)] = in[(x >> (i * a)) & block];
    return c.fold(v);
  });
}

inline BoundedFunction materialize(const ComposedPtr& c) { return materialize(*c); }

// ---------------------------------------------------------------------------
// Resilience of compositions

struct CompositionCertificate {
  int d_outer = 0;
  int d_inner = 0;
  int product_order = 0;  ///< d1 * d2
  int full_order = 0;     ///< (d1+1)(d2+1) - 1
  ResilienceCheck product_check;
  ResilienceCheck full_check;
  int measured_order = 0;
};

inline constexpr double kCompositionTol = 1e-10;

/// Spectrum-level check of G o g given the resilience orders the caller claims.
inline CompositionCertificate check_composed_resilience(const BoundedFunction& outer, int d1,
                                                        const BoundedFunction& inner, int d2,
                                                        double tol = kCompositionTol) {
  require(d1 >= -1 && d2 >= -1, Errc::invalid_argument, "resilience orders must be >= -1");
  require(is_d_resilient(outer, d1).resilient, Errc::resilience_mismatch, "outer function not d1-resilient");
  require(is_d_resilient(inner, d2).resilient, Errc::resilience_mismatch, "inner function not d2-resilient");
  const BoundedFunction t = materialize(compose(outer, inner));
  const Spectrum s = wht(t);
  CompositionCertificate c;
  c.d_outer = d1;
  c.d_inner = d2;
  c.product_order = d1 * d2;
  c.full_order = (d1 + 1) * (d2 + 1) - 1;
  c.product_check = check_resilience(s, c.product_order, tol);
  c.full_check = check_resilience(s, c.full_order, tol);
  c.measured_order = resilience_order(s, tol);
  return c;
}

// ---------------------------------------------------------------------------
// Distance amplification

/// dist(f, g) = E|f - g| / 2
inline double half_distance(std::span<const double> f, std::span<const double> g) {
  return l1_distance(f, g) / 2.0;
}

struct DistanceEstimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool exact = false;
  std::size_t samples = 0;
};

inline constexpr std::size_t kDefaultSamples = 1000000;
inline constexpr std::size_t kSampleShards = 16;

/// Worker count from RESIL_THREADS, default 1.
inline unsigned thread_count() {
  if (const char* env = std::getenv("RESIL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 256) return unsigned(v);
  }
  return 1;
}

/// Hoeffding half-width for a [0,1]-valued mean at confidence 1 - alpha.
inline double hoeffding_half_width(std::size_t m, double alpha = 0.01) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * double(m)));
}

/// Fixed shards with seeds derived from the master seed, so the estimate
/// does not depend on the worker count.
inline DistanceEstimate sampled_distance(const ComposedFunction& f, const ComposedFunction& g,
                                         std::size_t samples, std::uint64_t seed) {
  require(f.arity() == g.arity(), Errc::dimension_mismatch, "arity mismatch");
  require(samples >= 1, Errc::invalid_argument, "need at least one sample");
  const std::size_t arity = std::size_t(f.arity());
  std::vector<double> shard_sum(kSampleShards, 0.0);
  auto run_shard = [&](std::size_t s) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(s)};
    std::mt19937_64 rng(seq);
    const std::size_t count = samples / kSampleShards + (s < samples % kSampleShards ? 1 : 0);
    BitPoint bits(arity);
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < arity; j += 64) {
        std::uint64_t w = rng();
        for (std::size_t b = j; b < std::min(arity, j + 64); ++b, w >>= 1) bits[b] = std::uint8_t(w & 1U);
      }
      acc += std::abs(f.evaluate(bits) - g.evaluate(bits)) / 2.0;
    }
    shard_sum[s] = acc;
  };
  const unsigned workers = std::min<unsigned>(thread_count(), unsigned(kSampleShards));
  if (workers <= 1) {
    for (std::size_t s = 0; s < kSampleShards; ++s) run_shard(s);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < kSampleShards; s += workers) run_shard(s);
      });
    for (auto& t : pool) t.join();
  }
  double total = 0.0;
  for (double v : shard_sum) total += v;
  DistanceEstimate e;
  e.samples = samples;
  e.value = total / double(samples);
  const double h = hoeffding_half_width(samples);
  e.ci_low = std::max(0.0, e.value - h);
  e.ci_high = std::min(1.0, e.value + h);
  return e;
}

inline DistanceEstimate composed_distance(const ComposedFunction& f, const ComposedFunction& g,
                                          std::size_t samples = kDefaultSamples, std::uint64_t seed = 1) {
  require(f.arity() == g.arity(), Errc::dimension_mismatch, "arity mismatch");
  if (f.arity() <= kMaxMaterializeArity) {
    const auto a = materialize(f);
    const auto b = materialize(g);
    DistanceEstimate e;
    e.exact = true;
    e.value = half_distance(a.values(), b.values());
    e.ci_low = e.ci_high = e.value;
    return e;
  }
  return sampled_distance(f, g, samples, seed);
}

struct AmplificationLevel {
  int k = 0;
  int arity = 0;
  DistanceEstimate dist;  ///< dist(f_k, g_k)
  double bound = 0.0;     ///< dist(f,g) sum_{t<=k} Inf[f]^t
  bool within_bound = false;
  // Decomposition dist(f o f', g o g') <= dist(f o f', f o g') + dist(f o g', g o g'),
  // with f' = f_{k-1}, g' = g_{k-1}; exact levels only.
  std::optional<double> inner_swap;  ///< dist(f o f_{k-1}, f o g_{k-1})
  std::optional<double> outer_swap;  ///< dist(f o g_{k-1}, g o g_{k-1})
  bool triangle_holds = true;
  bool outer_swap_within = true;     ///< outer_swap <= dist(f, g)
  std::optional<double> noise_term;  ///< NS_{dist(f_{k-1},g_{k-1})}[f]
};

struct AmplificationReport {
  int n = 0;
  int k = 0;
  double base_distance = 0.0;  ///< dist(f, g)
  double influence = 0.0;      ///< Inf[f]
  double ns_exact = 0.0;       ///< NS_delta[f] with delta = dist(f, g)
  double ns_union_bound = 0.0; ///< delta * Inf[f]
  std::vector<AmplificationLevel> levels;  ///< k = 1..K
};

inline AmplificationReport amplification_report(const BooleanFunction& f, const BoundedFunction& g, int k,
                                                std::size_t samples = kDefaultSamples, std::uint64_t seed = 1) {
  require(f.dim() == g.dim(), Errc::dimension_mismatch, "f and g must share dimension");
  require(k >= 1, Errc::invalid_argument, "k must be >= 1");
  const Spectrum fs = wht(f);
  const Spectrum gs = wht(g);
  require(std::abs(fs[0]) <= 1e-12 && std::abs(gs[0]) <= 1e-12, Errc::unbalanced_input,
          "f and g must both have mean zero");
  const BoundedFunction fb(f);

  AmplificationReport rep;
  rep.n = f.dim();
  rep.k = k;
  rep.base_distance = half_distance(fb.values(), g.values());
  rep.influence = total_influence(f);
  rep.ns_exact = noise_sensitivity(fs, rep.base_distance);
  rep.ns_union_bound = rep.base_distance * rep.influence;

  ComposedPtr fk = leaf(fb);
  ComposedPtr gk = leaf(g);
  double prev_exact_dist = rep.base_distance;
  bool prev_exact = true;
  double geometric = 1.0;
  double power = 1.0;
  for (int level = 1; level <= k; ++level) {
    const ComposedPtr f_prev = fk;
    const ComposedPtr g_prev = gk;
    fk = compose(fb, f_prev);
    gk = compose(g, g_prev);
    power *= rep.influence;
    geometric += power;

    AmplificationLevel L;
    L.k = level;
    L.arity = fk->arity();
    L.dist = composed_distance(*fk, *gk, samples, seed + std::uint64_t(level));
    L.bound = rep.base_distance * geometric;
    L.within_bound = L.dist.ci_low <= L.bound + 1e-12;
    if (L.dist.exact) {
      const auto mixed = compose(fb, g_prev);
      L.inner_swap = composed_distance(*fk, *mixed).value;
      L.outer_swap = composed_distance(*mixed, *gk).value;
      L.triangle_holds = L.dist.value <= *L.inner_swap + *L.outer_swap + 1e-12;
      L.outer_swap_within = *L.outer_swap <= rep.base_distance + 1e-12;
      if (prev_exact) L.noise_term = noise_sensitivity(fs, std::min(1.0, prev_exact_dist));
    }
    prev_exact = L.dist.exact;
    prev_exact_dist = L.dist.value;
    rep.levels.push_back(std::move(L));
  }
  return rep;
}

}  // namespace resil
