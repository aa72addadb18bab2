#pragma once

// Greedy orbit-flipping repair of CycleRun into a balanced, exactly
// 1-resilient Boolean function. All sigma and first-level arithmetic is in
// 2^n-scaled integers.
//
// sigma = 2^n * sum_j f^({j}) = sum_x f(x) |x|. Flipping the orbit of a point
// x with CycleRun(x) = 1 lowers sigma by 2 |orbit| |x|.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "resil/error.hpp"
#include "resil/fourier.hpp"
#include "resil/zoo.hpp"

namespace resil {

inline constexpr int kBuilderMinDimension = 5;
inline constexpr int kBuilderMaxDimension = 21;
inline constexpr double kDefaultC1 = 8.0;

/// Cyclic shifts of x together with their negations.
struct Orbit {
  PointIndex representative = 0;
  std::vector<PointIndex> members;  ///< sorted, distinct
};

inline Orbit shift_orbit(PointIndex x, int n) {
  check_cyclerun_dimension(n);
  const PointIndex mask = (PointIndex{1} << n) - 1;
  require(x <= mask, Errc::invalid_argument, "point outside the hypercube");
  Orbit o;
  o.representative = x;
  for (int r = 0; r < n; ++r) {
    const PointIndex y = rotate_bits(x, r, n);
    o.members.push_back(y);
    o.members.push_back(~y & mask);
  }
  std::sort(o.members.begin(), o.members.end());
  o.members.erase(std::unique(o.members.begin(), o.members.end()), o.members.end());
  return o;
}

enum class BuilderStep { heavy_flip, weight_one_flip };  // steps 3c and 3b

inline const char* to_string(BuilderStep s) { return s == BuilderStep::heavy_flip ? "3c" : "3b"; }

struct IterationRecord {
  std::size_t iteration = 0;  ///< 1-based
  BuilderStep step = BuilderStep::heavy_flip;
  PointIndex candidate = 0;       ///< x chosen by the max-|x| search
  PointIndex representative = 0;  ///< orbit actually flipped
  int abs_sum = 0;                ///< |x| of the flipped representative
  std::size_t orbit_size = 0;
  std::int64_t sigma_before = 0;
  std::int64_t sigma_after = 0;
  std::vector<std::int64_t> first_level;  ///< 2^n f^({j}) after the flip
  std::int64_t constant = 0;              ///< 2^n f^(empty) after the flip
  std::size_t flipped_total = 0;          ///< |S-bar| after the flip
};

struct BuilderReport {
  int n = 0;
  double c1 = kDefaultC1;
  BooleanFunction cyclerun;
  BooleanFunction output;
  std::vector<bool> in_sbar;  ///< membership of S-bar by point index
  std::size_t sbar_size = 0;
  std::size_t sbar_prime_size = 0;
  std::int64_t sigma_initial = 0;
  std::int64_t sigma_final = 0;
  std::vector<std::int64_t> initial_first_level;
  std::vector<IterationRecord> log;
  double budget = 0.0;          ///< c1 sqrt(ln n / n) 2^n
  double distance = 0.0;        ///< |S-bar| / 2^n
  double distance_ratio = 0.0;  ///< distance / sqrt(ln n / n)
  double budget_used = 0.0;     ///< |S-bar| / budget
};

inline double builder_scale(int n) { return std::sqrt(std::log(double(n)) / double(n)); }

/// 2^n f^(empty) and 2^n f^({j}) for j = 1..n.
inline std::pair<std::int64_t, std::vector<std::int64_t>> low_level_integers(const BooleanFunction& f) {
  const int n = f.dim();
  std::int64_t c = 0;
  std::vector<std::int64_t> first(std::size_t(n), 0);
  for (PointIndex x = 0; x < f.size(); ++x) {
    const int v = f[x];
    c += v;
    for (int j = 0; j < n; ++j) first[std::size_t(j)] += ((x >> j) & 1U) ? -v : v;
  }
  return {c, first};
}

inline BuilderReport build_one_resilient(int n, double c1 = kDefaultC1) {
  require(n % 2 == 1 && n >= kBuilderMinDimension && n <= kBuilderMaxDimension, Errc::invalid_argument,
          "builder needs odd n in [5, 21]");
  require(c1 > 0.0 && std::isfinite(c1), Errc::invalid_argument, "c1 must be positive");
  const std::size_t size = table_size(n);

  BuilderReport rep;
  rep.n = n;
  rep.c1 = c1;
  rep.cyclerun = cyclerun(n);
  const auto& cr = rep.cyclerun;
  auto [constant, first] = low_level_integers(cr);
  rep.initial_first_level = first;
  std::int64_t sigma = 0;
  for (auto v : first) sigma += v;
  rep.sigma_initial = sigma;
  rep.budget = c1 * builder_scale(n) * double(size);

  // Candidates for 3a: CycleRun = 1, ordered by |x| descending then index.
  std::vector<PointIndex> heavy;
  std::vector<PointIndex> weight_one;
  for (PointIndex x = 0; x < size; ++x) {
    if (cr[x] != 1) continue;
    heavy.push_back(x);
    if (hamming_sum(x, n) == 1) weight_one.push_back(x);
  }
  std::stable_sort(heavy.begin(), heavy.end(),
                   [&](PointIndex a, PointIndex b) { return hamming_sum(a, n) > hamming_sum(b, n); });

  std::vector<std::int8_t> table(cr.values().begin(), cr.values().end());
  rep.in_sbar.assign(size, false);
  std::size_t heavy_pos = 0;
  std::size_t light_pos = 0;

  auto flip_orbit = [&](PointIndex rep_point) -> std::size_t {
    const Orbit o = shift_orbit(rep_point, n);
    for (PointIndex y : o.members) {
      require(!rep.in_sbar[y], Errc::invariant_violation, "orbit overlaps S-bar");
      const int v = table[y];
      constant -= 2 * v;
      for (int j = 0; j < n; ++j) first[std::size_t(j)] -= ((y >> j) & 1U) ? -2 * v : 2 * v;
      table[y] = std::int8_t(-v);
      rep.in_sbar[y] = true;
    }
    rep.sbar_size += o.members.size();
    return o.members.size();
  };

  bool done = sigma == 0;
  while (!done) {
    if (double(rep.sbar_size) > rep.budget)
      throw Error(Errc::budget_exhausted, "loop guard reached with sigma = " + std::to_string(sigma));

    while (heavy_pos < heavy.size() && rep.in_sbar[heavy[heavy_pos]]) ++heavy_pos;
    require(heavy_pos < heavy.size(), Errc::invariant_violation, "no CycleRun = 1 point left outside S-bar");
    const PointIndex x = heavy[heavy_pos];
    const int ax = hamming_sum(x, n);
    const std::int64_t orbit_x = std::int64_t(shift_orbit(x, n).members.size());
    const std::int64_t after_x = sigma - 2 * orbit_x * ax;

    IterationRecord rec;
    rec.iteration = rep.log.size() + 1;
    rec.candidate = x;
    rec.sigma_before = sigma;
    if (after_x < 0) {
      while (light_pos < weight_one.size() && rep.in_sbar[weight_one[light_pos]]) ++light_pos;
      if (light_pos == weight_one.size())
        throw Error(Errc::fail_no_weight_one_point, "no weight-one CycleRun = 1 point outside S-bar");
      const PointIndex xs = weight_one[light_pos];
      rec.step = BuilderStep::weight_one_flip;
      rec.representative = xs;
      rec.abs_sum = 1;
      rec.orbit_size = flip_orbit(xs);
      rep.sbar_prime_size += rec.orbit_size;
      sigma -= 4 * n;
      done = sigma == 0;
    } else {
      // after_x == 0 also flips: it lands exactly on sigma = 0.
      rec.step = BuilderStep::heavy_flip;
      rec.representative = x;
      rec.abs_sum = ax;
      rec.orbit_size = flip_orbit(x);
      sigma = after_x;
      done = sigma == 0;
    }
    rec.sigma_after = sigma;
    rec.first_level = first;
    rec.constant = constant;
    rec.flipped_total = rep.sbar_size;
    rep.log.push_back(std::move(rec));
  }

  rep.sigma_final = sigma;
  rep.output = BooleanFunction(n, std::move(table));
  rep.distance = double(rep.sbar_size) / double(size);
  rep.distance_ratio = rep.distance / builder_scale(n);
  rep.budget_used = double(rep.sbar_size) / rep.budget;
  return rep;
}

struct AuditResult {
  bool ok = true;
  std::optional<std::size_t> failed_iteration;  ///< 0 = initial state
  std::string detail;
};

/// Replays the flip log from CycleRun and checks at every iteration that the
/// first-level coefficients are equal, that sigma equals their sum, and that
/// sigma is a nonnegative multiple of 4n; also checks the logged values and
/// the final table against the replay.
inline AuditResult audit_invariants(const BuilderReport& rep) {
  AuditResult res;
  const int n = rep.n;
  auto fail = [&](std::size_t it, std::string why) {
    res.ok = false;
    res.failed_iteration = it;
    res.detail = std::move(why);
    return res;
  };
  if (rep.cyclerun.dim() != n) return fail(0, "report dimension mismatch");

  std::vector<std::int8_t> table(rep.cyclerun.values().begin(), rep.cyclerun.values().end());
  auto [constant, first] = low_level_integers(rep.cyclerun);
  auto check_state = [&](std::size_t it, std::int64_t sigma) -> bool {
    for (auto v : first)
      if (v != first[0]) {
        fail(it, "first-level coefficients differ");
        return false;
      }
    std::int64_t sum = 0;
    for (auto v : first) sum += v;
    if (sum != sigma) {
      fail(it, "sigma " + std::to_string(sigma) + " != coefficient sum " + std::to_string(sum));
      return false;
    }
    if (sigma < 0 || sigma % (4 * n) != 0) {
      fail(it, "sigma " + std::to_string(sigma) + " is not a nonnegative multiple of 4n");
      return false;
    }
    return true;
  };
  if (!check_state(0, rep.sigma_initial)) return res;

  std::vector<bool> seen(table.size(), false);
  std::int64_t prev_sigma = rep.sigma_initial;
  for (const auto& rec : rep.log) {
    if (rec.sigma_before != prev_sigma) return fail(rec.iteration, "sigma_before does not chain");
    const Orbit o = shift_orbit(rec.representative, n);
    if (o.members.size() != rec.orbit_size) return fail(rec.iteration, "orbit size mismatch");
    for (PointIndex y : o.members) {
      if (seen[y]) return fail(rec.iteration, "point flipped twice");
      seen[y] = true;
      const int v = table[y];
      constant -= 2 * v;
      for (int j = 0; j < n; ++j) first[std::size_t(j)] -= ((y >> j) & 1U) ? -2 * v : 2 * v;
      table[y] = std::int8_t(-v);
    }
    if (constant != 0) return fail(rec.iteration, "balance lost");
    if (rec.first_level != first || rec.constant != constant)
      return fail(rec.iteration, "logged coefficients disagree with replay");
    if (!check_state(rec.iteration, rec.sigma_after)) return res;
    prev_sigma = rec.sigma_after;
  }
  if (prev_sigma != rep.sigma_final) return fail(rep.log.size(), "final sigma mismatch");
  if (rep.output.dim() != n || !std::equal(table.begin(), table.end(), rep.output.values().begin()))
    return fail(rep.log.size(), "output table differs from replay");
  return res;
}

}  // namespace resil
