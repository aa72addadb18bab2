#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "resil/cyclerun_builder.hpp"
#include "resil/designs.hpp"
#include "resil/resilience_lp.hpp"
#include "resil/zoo.hpp"

using namespace resil;

namespace {

bool pairwise_ok(const Design& D) {
  for (std::size_t i = 0; i < D.sets.size(); ++i) {
    if (cardinality(D.sets[i]) != D.k || D.sets[i] >> D.n) return false;
    for (std::size_t j = i + 1; j < D.sets.size(); ++j)
      if (__builtin_popcountll(D.sets[i] & D.sets[j]) > D.d) return false;
  }
  return true;
}

long long binom(int n, int k) {
  long long c = 1;
  for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return c;
}

}  // namespace

TEST(Designs, IndexMaskRoundTrip) {
  EXPECT_EQ(mask_indices(0b10110), (std::vector<int>{2, 3, 5}));
  EXPECT_EQ(indices_mask({2, 3, 5}, 6), SubsetMask{0b10110});
  EXPECT_THROW(indices_mask({2, 2}, 6), Error);
  EXPECT_THROW(indices_mask({7}, 6), Error);
}

TEST(Designs, LexicographicSubsets) {
  const auto s = k_subsets_lex(5, 2);
  EXPECT_EQ(s.size(), std::size_t(binom(5, 2)));
  EXPECT_EQ(mask_indices(s.front()), (std::vector<int>{1, 2}));
  EXPECT_EQ(mask_indices(s[1]), (std::vector<int>{1, 3}));
  EXPECT_EQ(mask_indices(s.back()), (std::vector<int>{4, 5}));
}

TEST(Designs, GreedySizesAndValidity) {
  struct Case {
    int n, k, d;
    std::size_t size;
  };
  for (auto c : {Case{6, 3, 1, 4}, Case{8, 2, 1, 28}, Case{12, 5, 1, 3}}) {
    const Design D = greedy_design(c.n, c.k, c.d);
    EXPECT_TRUE(pairwise_ok(D));
    EXPECT_TRUE(is_valid_design(D));
    EXPECT_EQ(D.sets.size(), c.size) << c.n << "," << c.k << "," << c.d;
    EXPECT_GE(D.sets.size(), design_size_floor(c.n, c.k, c.d));
  }
}

TEST(Designs, DisjointWhenDIsZero) {
  const Design D = greedy_design(10, 3, 0);
  EXPECT_EQ(D.sets.size(), 3u);
  EXPECT_TRUE(pairwise_ok(D));
}

TEST(Designs, GreedyIsMaximal) {
  const Design D = greedy_design(9, 4, 2);
  for (SubsetMask c : k_subsets_lex(9, 4)) {
    if (std::find(D.sets.begin(), D.sets.end(), c) != D.sets.end()) continue;
    bool blocked = false;
    for (SubsetMask s : D.sets) blocked = blocked || cardinality(c & s) > 2;
    EXPECT_TRUE(blocked);
  }
}

TEST(Designs, ShuffledOrderIsSeeded) {
  const Design a = greedy_design(10, 4, 1, {true, 5});
  const Design b = greedy_design(10, 4, 1, {true, 5});
  EXPECT_EQ(a.sets, b.sets);
  EXPECT_TRUE(pairwise_ok(a));
  const Design c = greedy_design(10, 4, 1, {true, 6});
  EXPECT_TRUE(pairwise_ok(c));
}

TEST(Designs, ViolationDetection) {
  Design D{6, 3, 1, {0b000111, 0b001011}};
  const auto v = find_design_violation(D);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(*v, (std::pair<std::size_t, std::size_t>{0, 1}));
  EXPECT_THROW(greedy_design(6, 3, 3), Error);
}

TEST(Designs, SizeBound) {
  const double e2 = std::exp(2.0);
  EXPECT_NEAR(design_size_bound(100, 5, 2), std::pow(100.0 * 2 / (e2 * 25), 2), 1e-12);
  EXPECT_EQ(design_size_bound(10, 3, 0), 1.0);
}

TEST(JuntaEmbed, ReadsTheTargetCoordinates) {
  const auto g = BooleanFunction::from(3, [](PointIndex x) { return coordinate(x, 1) * (x == 6 ? -1 : 1); });
  const std::vector<int> target = {5, 2, 7};
  const auto e = junta_embed(g, target, 8);
  for (PointIndex x = 0; x < e.size(); ++x) {
    PointIndex sub = 0;
    for (int i = 0; i < 3; ++i)
      if (oracle::x_coord(x, target[std::size_t(i)]) == -1) sub |= PointIndex{1} << i;
    ASSERT_EQ(e[x], g[sub]);
  }
  EXPECT_EQ(junta_embed(g, SubsetMask{0b1010010}, 8), junta_embed(g, std::vector<int>{2, 5, 7}, 8));
}

TEST(JuntaEmbed, PreservesResilienceOrder) {
  const auto g = build_one_resilient(5).output;
  const auto e = junta_embed(g, std::vector<int>{1, 3, 4, 8, 10}, 10);
  EXPECT_EQ(resilience_order_exact(e), resilience_order_exact(g));
}

TEST(OrthogonalFamily, BuilderOutputInAmbientTwelve) {
  const auto g = build_one_resilient(5).output;
  const Design D = greedy_design(12, 5, 1);
  const auto fam = orthogonal_family(BoundedFunction(g), D);
  EXPECT_TRUE(fam.exact);
  EXPECT_TRUE(fam.orthogonal);
  const std::size_t m = D.sets.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      // recompute each entry directly from the member tables
      long long acc = 0;
      for (PointIndex x = 0; x < 4096; ++x)
        acc += (long long)fam.members[i][x] * (long long)fam.members[j][x];
      EXPECT_EQ(fam.gram_exact[i * m + j], acc);
      EXPECT_EQ(acc, i == j ? 4096 : 0);
    }
}

TEST(OrthogonalFamily, RejectsInsufficientResilience) {
  const Design D = greedy_design(8, 3, 1);
  EXPECT_THROW(orthogonal_family(BoundedFunction(majority(3)), D), Error);
}

TEST(OrthogonalFamily, BoundedBaseUsesTolerance) {
  const auto chi = parity_prefix(3, 3);
  const auto w = BoundedFunction::from(3, [&](PointIndex x) { return 0.5 * chi[x]; });
  const auto fam = orthogonal_family(w, greedy_design(7, 3, 1));
  EXPECT_FALSE(fam.exact);
  EXPECT_TRUE(fam.orthogonal);
  EXPECT_LE(fam.max_off_diagonal, 1e-10);
}
