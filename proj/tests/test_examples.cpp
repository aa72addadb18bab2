#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "resil/amplifier.hpp"
#include "resil/cyclerun_builder.hpp"
#include "resil/designs.hpp"
#include "resil/learner.hpp"
#include "resil/resilience_lp.hpp"
#include "resil/witness.hpp"
#include "resil/zoo.hpp"

using namespace resil;

namespace {

PointIndex point_of(const std::vector<int>& x) {
  PointIndex p = 0;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < 0) p |= PointIndex{1} << j;
  return p;
}

BoundedFunction scaled(const BooleanFunction& f, double c) {
  std::vector<double> v(f.size());
  for (PointIndex x = 0; x < f.size(); ++x) v[x] = c * f[x];
  return BoundedFunction(f.dim(), std::move(v));
}

}  // namespace

TEST(Spectrum, SmallFunctions) {
  const Spectrum p = wht(parity(0b11, 2));
  EXPECT_EQ(std::vector<double>(p.coeffs().begin(), p.coeffs().end()), (std::vector<double>{0, 0, 0, 1}));

  const Spectrum m = wht(majority(3));
  for (SubsetMask s = 0; s < 8; ++s) {
    const double want = cardinality(s) == 1 ? 0.5 : (s == 0b111 ? -0.5 : 0.0);
    EXPECT_DOUBLE_EQ(m[s], want) << s;
  }

  const Spectrum one = wht(BooleanFunction::from(3, [](PointIndex) { return 1; }));
  EXPECT_DOUBLE_EQ(one[0], 1.0);
  for (SubsetMask s = 1; s < 8; ++s) EXPECT_DOUBLE_EQ(one[s], 0.0);
}

TEST(Spectrum, StatsOfSmallFunctions) {
  const auto m = spectral_stats(majority(3), 1);
  EXPECT_DOUBLE_EQ(m.total_influence, 1.5);
  EXPECT_DOUBLE_EQ(m.low_weight, 0.75);

  const auto p = spectral_stats(parity_prefix(4, 6), 3);
  EXPECT_DOUBLE_EQ(p.total_influence, 4.0);
  EXPECT_DOUBLE_EQ(p.low_weight, 0.0);

  const auto dct = spectral_stats(dictator(1, 5), 1);
  EXPECT_EQ(dct.per_coordinate_influence, (std::vector<double>{1, 0, 0, 0, 0}));

  EXPECT_TRUE(is_d_resilient(parity(0b011, 3), 1).resilient);
  EXPECT_DOUBLE_EQ(wht(dictator(2, 3))[0b010], 1.0);
}

TEST(Spectrum, DistanceAndCorrelationAnchors) {
  const auto f = majority(5);
  const BoundedFunction fb(f);
  EXPECT_DOUBLE_EQ(l1_distance(f, fb), 0.0);
  EXPECT_DOUBLE_EQ(correlation(f, fb), 1.0);
  const auto neg = scaled(f, -1.0);
  EXPECT_DOUBLE_EQ(l1_distance(f, neg), 2.0);
  EXPECT_DOUBLE_EQ(correlation(f, neg), -1.0);

  const BoundedFunction zero(2, std::vector<double>(4, 0.0));
  EXPECT_DOUBLE_EQ(l1_distance(and_function(2), zero), 1.0);
  EXPECT_DOUBLE_EQ(correlation(and_function(2), zero), 0.0);
  EXPECT_TRUE(is_d_resilient(zero, 0).resilient);
}

TEST(Simplex, TrivialBoxPrograms) {
  lp::LinearProgram one(1);
  one.objective = {1.0};
  one.lower = {-1.0};
  one.upper = {1.0};
  const auto r1 = lp::solve(one);
  ASSERT_EQ(r1.status, lp::Status::optimal);
  EXPECT_NEAR(r1.value, 1.0, 1e-12);

  lp::LinearProgram two(2);
  two.objective = {1.0, 1.0};
  two.lower = {-1.0, -1.0};
  two.upper = {1.0, 1.0};
  const auto row = two.add_row(0.0);
  two.at(row, 0) = 1.0;
  two.at(row, 1) = 1.0;
  const auto r2 = lp::solve(two);
  ASSERT_EQ(r2.status, lp::Status::optimal);
  EXPECT_NEAR(r2.value, 0.0, 1e-12);
}

TEST(ResilienceLp, AndTwoRawValue) {
  const auto r = distance_to_resilience(and_function(2), 0);
  EXPECT_NEAR(r.lp_value, 4.0 * (1.0 - 0.5), 1e-9);
  EXPECT_NEAR(r.alpha, 0.5, 1e-9);
}

TEST(ResilienceLp, DictatorAndMajorityApproximation) {
  const auto dct = l1_poly_distance(dictator(1, 3), 1);
  EXPECT_NEAR(dct.delta, 0.0, 1e-12);
  for (const auto& [s, c] : dct.poly.coeffs()) EXPECT_NEAR(c, s == 0b1 ? 1.0 : 0.0, 1e-12);

  const auto maj = majority(3);
  const double alpha = distance_to_resilience(maj, 1).alpha;
  EXPECT_NEAR(l1_poly_distance(maj, 1).delta, 1.0 - alpha, 1e-9);
}

TEST(ResilienceLp, ParityGapIsZeroForEveryDegree) {
  for (int n = 2; n <= 5; ++n)
    for (SubsetMask s : {SubsetMask{1}, SubsetMask{0b11}, SubsetMask((1U << n) - 1)})
      for (int d = 0; d <= n; ++d) EXPECT_LE(duality_certificate(parity(s, n), d).gap, 1e-9) << n << ' ' << s << ' ' << d;
}

TEST(Tribes, WorkedCoefficients) {
  EXPECT_DOUBLE_EQ(tribes_coefficient(2, 2, 0), 0.125);
  EXPECT_DOUBLE_EQ(tribes_coefficient(2, 2, 0b0011), -0.375);
  const Spectrum s = wht(tribes(2, 2));
  EXPECT_DOUBLE_EQ(s[0], 0.125);
  EXPECT_DOUBLE_EQ(s[0b0011], -0.375);
}

TEST(Tribes, WeightBoundSubstitution) {
  const double want = 2.0 * std::pow(2.0 * std::log(15.0), 6) / 15.0;
  EXPECT_NEAR(tribes_weight_bound(3, 5, 1), want, 1e-9 * want);
  for (auto [w, s] : {std::pair{2, 2}, {2, 3}, {3, 2}, {3, 4}, {4, 3}}) {
    const Spectrum sp = wht(tribes(w, s));
    EXPECT_GE(tribes_weight_bound(w, s, 0), sp[0] * sp[0]);
    for (int d = 0; d <= w; ++d) {
      double formula = 0.0;
      for (SubsetMask t = 0; t < sp.size(); ++t)
        if (cardinality(t) <= d) formula += std::pow(tribes_coefficient(w, s, t), 2);
      EXPECT_LE(sp.low_weight(d), formula + 1e-12);
    }
  }
}

TEST(CycleRun, ThreeBitExamples) {
  EXPECT_EQ(cyclerun_value(point_of({1, 1, -1}), 3), 1);
  EXPECT_EQ(cyclerun_value(point_of({1, -1, 1}), 3), 1);
}

TEST(Ft, DegenerateParameters) {
  const auto big = ft_stats(4.0, 9);  // 4 * 3 > 9
  EXPECT_EQ(big.influence_sum, 0.0);
  EXPECT_EQ(big.support_prob, 0.0);
  EXPECT_DOUBLE_EQ(ft_stats(0.0, 9).support_prob, 1.0);
  EXPECT_NEAR(ft_stats(0.0, 10).support_prob, 1.0 - 252.0 / 1024.0, 1e-15);
}

TEST(ShiftOrbit, Sizes) {
  EXPECT_EQ(shift_orbit(0, 5).members.size(), 2u);
  EXPECT_EQ(shift_orbit(0b11111, 5).members.size(), 2u);
  EXPECT_EQ(shift_orbit(0b00011, 5).members.size(), 10u);
  EXPECT_EQ(shift_orbit(0b0001011, 7).members.size(), 14u);
  EXPECT_EQ(shift_orbit(0b001001001, 9).members.size(), 6u);
}

TEST(Builder, SigmaOffByFourIsPinpointed) {
  const BuilderReport rep = build_one_resilient(9);
  ASSERT_GE(rep.log.size(), 2u);
  const std::size_t at = rep.log.size() / 2;
  BuilderReport bad = rep;
  bad.log[at].sigma_after += 4;
  const auto a = audit_invariants(bad);
  EXPECT_FALSE(a.ok);
  EXPECT_EQ(a.failed_iteration, std::optional<std::size_t>(at + 1));
  EXPECT_TRUE(audit_invariants(rep).ok);
}

TEST(Witness, ParityIsItsOwnWitness) {
  for (int k = 2; k <= 4; ++k)
    for (int d = 0; d < k; ++d) {
      const auto f = parity_prefix(k, 6);
      const auto rep = build_witness(f, {d, 0.3});
      EXPECT_NEAR(rep.corr_pf, 1.0, 1e-12);
      EXPECT_NEAR(l1_distance(f, rep.p), 0.0, 1e-12);
    }
}

TEST(Witness, MajorityHighThreshold) {
  const auto rep = build_witness(majority(3), {1, 0.9});
  EXPECT_DOUBLE_EQ(rep.delta_emp, 0.25);
  EXPECT_DOUBLE_EQ(rep.ell_sup, 1.5);
}

TEST(Witness, ChainInequalityHolds) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto t = oracle::random_boolean(8, seed);
    const auto f = BooleanFunction::from(8, [&](PointIndex x) { return t[x]; });
    for (double tau : {0.1, 0.3, 0.6}) {
      try {
        const auto rep = build_witness(f, {1, tau});
        EXPECT_GE(rep.corr_pf, rep.chain_bound - 1e-12);
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::degenerate_high_part);
      }
    }
  }
}

TEST(ConcentrationProbe, WorkedTails) {
  EXPECT_EQ(concentration_probe(dictator(1, 4), 1, 2.0).tail_prob, 0.0);
  const auto m = concentration_probe(majority(3), 1, 1.5);
  EXPECT_NEAR(m.p2norm_lowpart, std::sqrt(0.75), 1e-15);
  EXPECT_DOUBLE_EQ(m.tail_prob, 0.25);
  double prev = 1.0;
  for (double t = 0.25; t <= 4.0; t += 0.25) {
    const double p = concentration_probe(tribes(2, 3), 1, t).tail_prob;
    EXPECT_LE(p, prev);
    prev = p;
  }
}

TEST(Composition, WorkedExamples) {
  const BoundedFunction chi12(parity(0b11, 2));
  const auto pp = materialize(compose(chi12, chi12));
  const auto want4 = parity(0b1111, 4);
  for (PointIndex x = 0; x < 16; ++x) EXPECT_DOUBLE_EQ(pp[x], want4[x]);

  const auto maj = BoundedFunction(majority(3));
  const BoundedFunction zero(3, std::vector<double>(8, 0.0));
  const auto cz = materialize(compose(maj, zero));
  const double mean = wht(maj)[0];
  for (PointIndex x = 0; x < cz.size(); ++x) EXPECT_NEAR(cz[x], mean, 1e-15);

  const auto cert = check_composed_resilience(chi12, 1, BoundedFunction(parity(0b111, 3)), 2);
  EXPECT_TRUE(cert.full_check.resilient);
  EXPECT_EQ(cert.full_order, 5);
  EXPECT_EQ(resilience_order(wht(materialize(compose(chi12, BoundedFunction(parity(0b111, 3)))))), 5);

  const auto witness = distance_to_resilience(majority(3), 1).witness;
  const auto dc = materialize(compose(BoundedFunction(dictator(1, 2)), witness));
  EXPECT_NEAR(wht(dc)[0], 0.0, 1e-12);
}

TEST(Amplification, IdenticalPairHasZeroDistance) {
  const auto f = majority(3);
  const auto rep = amplification_report(f, BoundedFunction(f), 2, 20000, 7);
  ASSERT_EQ(rep.levels.size(), 2u);
  EXPECT_EQ(rep.base_distance, 0.0);
  for (const auto& lvl : rep.levels) EXPECT_EQ(lvl.dist.value, 0.0);
}

TEST(Designs, WorkedExamples) {
  const auto D = greedy_design(4, 2, 0);
  EXPECT_EQ(D.sets, (std::vector<SubsetMask>{0b0011, 0b1100}));
  const auto full = greedy_design(6, 6, 2);
  EXPECT_EQ(full.sets, (std::vector<SubsetMask>{0b111111}));

  const auto fam = orthogonal_family(BoundedFunction(parity(0b11, 2)), greedy_design(8, 2, 1));
  ASSERT_TRUE(fam.exact);
  const std::size_t m = fam.members.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) EXPECT_EQ(fam.gram_exact[i * m + j], 0);
  EXPECT_TRUE(fam.orthogonal);

  Design single{6, 3, 1, {0b000111}};
  const auto one = orthogonal_family(BoundedFunction(parity(0b111, 3)), single);
  EXPECT_TRUE(one.orthogonal);
  EXPECT_EQ(one.max_off_diagonal, 0.0);
}

TEST(Learner, ParityLabelsDefeatLowDegree) {
  const LabeledDistribution dist{BoundedFunction(parity_prefix(3, 4))};
  for (int d = 0; d < 3; ++d) {
    const auto rep = learn_exact(dist, d, 0.0);
    EXPECT_NEAR(rep.regression_delta, 1.0, 1e-9);
    EXPECT_NEAR(rep.error, 0.5, 1e-9);
  }
}

TEST(Learner, SampledNoisyDictatorAcrossSeeds) {
  const LabeledDistribution dist{scaled(dictator(1, 4), 0.8)};
  int good = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    if (learn_sampled(dist, 1, 100000, seed).error <= 0.12) ++good;
  EXPECT_GE(good, 19);
}

TEST(Learner, OptAnchors) {
  const auto f = majority(5);
  std::vector<double> v(f.size());
  for (PointIndex x = 0; x < f.size(); ++x) v[x] = f[x] * (0.2 + 0.7 * double(x % 3) / 2.0);
  const LabeledDistribution dist{BoundedFunction(5, v)};
  double want = 0.0;
  for (double g : v) want += (1.0 - std::abs(g)) / 2.0;
  want /= double(v.size());
  EXPECT_NEAR(opt_of_class({parity(0b1, 5), f}, dist), want, 1e-15);

  const auto one = BooleanFunction::from(5, [](PointIndex) { return 1; });
  const auto minus = BooleanFunction::from(5, [](PointIndex) { return -1; });
  const LabeledDistribution balanced{BoundedFunction(f)};
  EXPECT_DOUBLE_EQ(opt_of_class({one, minus}, balanced), 0.5);
}
