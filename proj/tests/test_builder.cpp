#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "resil/cyclerun_builder.hpp"

using namespace resil;

namespace {

// 2^n f^(S) for |S| <= 1 by direct summation.
std::vector<long long> low_sums(const BooleanFunction& f) {
  const int n = f.dim();
  std::vector<long long> out(std::size_t(n) + 1, 0);
  for (PointIndex x = 0; x < f.size(); ++x) {
    out[0] += f[x];
    for (int j = 1; j <= n; ++j) out[std::size_t(j)] += f[x] * oracle::x_coord(x, j);
  }
  return out;
}

}  // namespace

TEST(ShiftOrbit, ClosedUnderShiftAndNegation) {
  const int n = 7;
  for (PointIndex x : {PointIndex{0}, PointIndex{0b1}, PointIndex{0b1010101}, PointIndex{0b0011011}}) {
    const Orbit o = shift_orbit(x, n);
    for (PointIndex y : o.members) {
      EXPECT_TRUE(std::binary_search(o.members.begin(), o.members.end(), rotate_bits(y, 1, n)));
      EXPECT_TRUE(std::binary_search(o.members.begin(), o.members.end(), (~y) & 0x7F));
    }
    EXPECT_EQ(o.members.size() % 2, 0u);  // odd n: x and its negation never coincide
    EXPECT_LE(o.members.size(), std::size_t(2 * n));
  }
  EXPECT_EQ(shift_orbit(0, 7).members.size(), 2u);
}

class BuilderRun : public ::testing::TestWithParam<int> {};

TEST_P(BuilderRun, OutputIsBalancedOneResilient) {
  const int n = GetParam();
  const BuilderReport rep = build_one_resilient(n);
  const auto sums = low_sums(rep.output);
  for (long long v : sums) EXPECT_EQ(v, 0);
  EXPECT_TRUE(is_d_resilient_exact(rep.output, 1));
  EXPECT_EQ(rep.sigma_final, 0);
  EXPECT_EQ(rep.sigma_initial % (4 * n), 0);
  EXPECT_GT(rep.sigma_initial, 0);

  const AuditResult audit = audit_invariants(rep);
  EXPECT_TRUE(audit.ok) << audit.detail;

  std::size_t diff = 0;
  for (PointIndex x = 0; x < rep.output.size(); ++x) diff += rep.output[x] != rep.cyclerun[x];
  EXPECT_EQ(diff, rep.sbar_size);
  EXPECT_NEAR(rep.distance, double(diff) / double(rep.output.size()), 1e-15);
  EXPECT_LE(rep.distance_ratio, 8.0);
  EXPECT_LE(double(rep.sbar_size), rep.budget);
  ASSERT_FALSE(rep.log.empty());
  EXPECT_EQ(rep.log.front().step, BuilderStep::heavy_flip);

  // flips come in whole orbits, so the output stays odd and shift invariant
  const PointIndex full = (PointIndex{1} << n) - 1;
  for (PointIndex x = 0; x <= full; ++x) {
    ASSERT_EQ(rep.output[x ^ full], -rep.output[x]);
    ASSERT_EQ(rep.output[rotate_bits(x, 1, n)], rep.output[x]);
  }
}

INSTANTIATE_TEST_SUITE_P(OddN, BuilderRun, ::testing::Values(5, 7, 9, 11, 13));

TEST(Builder, InitialSigmaMatchesDirectSum) {
  const BuilderReport rep = build_one_resilient(9);
  const auto sums = low_sums(rep.cyclerun);
  long long sigma = 0;
  for (int j = 1; j <= 9; ++j) {
    EXPECT_EQ(sums[std::size_t(j)], sums[1]);
    sigma += sums[std::size_t(j)];
  }
  EXPECT_EQ(sigma, rep.sigma_initial);
  EXPECT_EQ(sums[0], 0);
}

TEST(Builder, AuditCatchesTampering) {
  BuilderReport rep = build_one_resilient(7);
  ASSERT_GE(rep.log.size(), 1u);
  BuilderReport bad = rep;
  bad.log.front().first_level[0] += 2;
  const auto a = audit_invariants(bad);
  EXPECT_FALSE(a.ok);
  EXPECT_EQ(a.failed_iteration, std::optional<std::size_t>(1));

  BuilderReport bad2 = rep;
  bad2.sigma_final = 4 * 7;
  EXPECT_FALSE(audit_invariants(bad2).ok);

  BuilderReport bad3 = rep;
  bad3.log.back().sigma_after += 1;
  EXPECT_FALSE(audit_invariants(bad3).ok);
}

TEST(Builder, Preconditions) {
  EXPECT_THROW(build_one_resilient(8), Error);
  EXPECT_THROW(build_one_resilient(3), Error);
  EXPECT_THROW(build_one_resilient(23), Error);
  try {
    build_one_resilient(11, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::budget_exhausted);
  }
}

TEST(Builder, Deterministic) {
  const auto a = build_one_resilient(11);
  const auto b = build_one_resilient(11);
  EXPECT_EQ(a.output, b.output);
  EXPECT_EQ(a.log.size(), b.log.size());
}
