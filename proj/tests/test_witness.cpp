#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "resil/resilience_lp.hpp"
#include "resil/witness.hpp"
#include "resil/zoo.hpp"

using namespace resil;

TEST(Witness, TribesThreeFourAtModerateThresholds) {
  const auto f = tribes(3, 4);
  const double lp_corr = 1.0 - distance_to_resilience(f, 1).alpha;
  for (double tau : {0.2, 0.3}) {
    const WitnessReport w = build_witness(f, {1, tau});
    EXPECT_TRUE(w.exact_checked);
    EXPECT_TRUE(w.exact_resilient);
    EXPECT_TRUE(w.float_check.resilient);
    for (double v : w.p.values()) EXPECT_LE(std::abs(v), 1.0);
    EXPECT_TRUE(w.q_in_range);
    EXPECT_GE(w.corr_qf, (1.0 - tau) * (1.0 - w.delta_emp) - 1e-10);
    EXPECT_LE(w.corr_pf, lp_corr + 1e-6);
  }
}

TEST(Witness, LowPartIsTheDegreeOneTruncation) {
  // l = f^(0) + sum_j f^({j}) x_j, so ell_sup and delta_emp follow from the direct spectrum.
  const auto f = tribes(3, 4);
  const oracle::Table t(f.values().begin(), f.values().end());
  std::vector<double> c(13);
  c[0] = oracle::coefficient(t, 12, 0);
  for (int j = 1; j <= 12; ++j) c[std::size_t(j)] = oracle::coefficient(t, 12, SubsetMask{1} << (j - 1));
  double sup = 0.0;
  std::size_t heavy = 0;
  for (PointIndex x = 0; x < t.size(); ++x) {
    double l = c[0];
    for (int j = 1; j <= 12; ++j) l += c[std::size_t(j)] * oracle::x_coord(x, j);
    sup = std::max(sup, std::abs(l));
    heavy += std::abs(l) > 0.2;
  }
  const auto w = build_witness(f, {1, 0.2});
  EXPECT_NEAR(w.ell_sup, sup, 1e-12);
  EXPECT_NEAR(w.delta_emp, double(heavy) / 4096.0, 1e-15);
}

TEST(Witness, SmallThresholdOnTribesThreeFourIsDegenerate) {
  // min_x |l(x)| = 0.1626 here, so the mask is empty and q vanishes
  try {
    build_witness(tribes(3, 4), {1, 0.1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_high_part);
  }
}

TEST(Witness, LowDegreeInputIsDegenerate) {
  EXPECT_THROW(build_witness(dictator(2, 6), {1, 0.5}), Error);
}

TEST(Witness, RandomFunctionsGiveResilientBoundedWitness) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto t = oracle::random_boolean(8, 300 + seed);
    const auto f = BooleanFunction::from(8, [&](PointIndex x) { return t[x]; });
    for (int d : {0, 1, 2}) {
      const auto w = build_witness(f, {d, 0.5});
      EXPECT_TRUE(w.exact_resilient);
      double mx = 0.0;
      for (double v : w.p.values()) mx = std::max(mx, std::abs(v));
      EXPECT_NEAR(mx, 1.0, 1e-15);
      EXPECT_LE(w.corr_pf, 1.0 - distance_to_resilience(f, d).alpha + 1e-6);
    }
  }
}

TEST(Witness, FloatPathAboveExactLimit) {
  const auto f = tribes(2, 7);  // n = 14
  const auto w = build_witness(f, {1, 0.3});
  EXPECT_FALSE(w.exact_checked);
  EXPECT_TRUE(w.float_check.resilient);
}

TEST(Witness, Preconditions) {
  EXPECT_THROW(build_witness(tribes(2, 2), {1, 0.0}), Error);
  EXPECT_THROW(build_witness(tribes(2, 2), {5, 0.3}), Error);
}

TEST(ConcentrationProbe, MatchesDirectCount) {
  const auto f = majority(9);
  const auto pr = concentration_probe(f, 1, 1.0);
  const Spectrum s = wht(f);
  EXPECT_NEAR(pr.p2norm_lowpart, std::sqrt(s.low_weight(1)), 1e-15);
  EXPECT_GE(pr.tail_prob, 0.0);
  EXPECT_LE(pr.tail_prob, 1.0);
  // majority's degree-1 part is c * sum x_i; |sum x_i| >= 3 holds with probability 1 - Pr[|sum|=1]
  const double c = s[1];
  const double norm = std::abs(c) * 3.0;  // sqrt(9) |c|
  std::size_t hits = 0;
  for (PointIndex x = 0; x < 512; ++x) hits += std::abs(c * hamming_sum(x, 9)) >= norm - 1e-12;
  EXPECT_NEAR(pr.tail_prob, hits / 512.0, 1e-15);
}
