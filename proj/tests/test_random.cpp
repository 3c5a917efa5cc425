#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "diqsdc/random.hpp"

using diqsdc::RandomSource;

TEST(Random, SameSeedSameSequence) {
  RandomSource a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs = differs || x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(Random, SubstreamIndependentOfParentPosition) {
  RandomSource a(7), b(7);
  for (int i = 0; i < 10; ++i) b.next_u64();
  EXPECT_EQ(a.substream("bob").next_u64(), b.substream("bob").next_u64());
  EXPECT_NE(a.substream("bob").next_u64(), a.substream("alice").next_u64());
  EXPECT_NE(a.substream(std::uint64_t{0}).next_u64(), a.substream(std::uint64_t{1}).next_u64());
}

TEST(Random, UniformInUnitInterval) {
  RandomSource rng(1);
  double sum = 0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / kDraws, 0.5, 5 * std::sqrt(1.0 / 12 / kDraws));
}

TEST(Random, BelowIsUniformAndBounded) {
  RandomSource rng(2);
  std::array<int, 3> counts{};
  constexpr int kDraws = 60000;
  for (int i = 0; i < kDraws; ++i) {
    const auto v = rng.below(3);
    ASSERT_LT(v, 3u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c / double(kDraws), 1.0 / 3, 5 * std::sqrt(2.0 / 9 / kDraws));
  EXPECT_THROW(rng.below(0), std::invalid_argument);
}

TEST(Random, ChooseSortedIsSortedDistinctAndUniform) {
  RandomSource rng(3);
  std::array<int, 10> hits{};
  constexpr int kDraws = 20000;
  for (int i = 0; i < kDraws; ++i) {
    const auto pick = rng.choose_sorted(10, 3);
    ASSERT_EQ(pick.size(), 3u);
    ASSERT_TRUE(std::is_sorted(pick.begin(), pick.end()));
    ASSERT_EQ(std::set<std::size_t>(pick.begin(), pick.end()).size(), 3u);
    for (auto p : pick) ++hits[p];
  }
  for (int h : hits) EXPECT_NEAR(h / double(kDraws), 0.3, 5 * std::sqrt(0.21 / kDraws));
  EXPECT_EQ(rng.choose_sorted(5, 5), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(Random, DeriveSeedIsPureAndDistinct) {
  EXPECT_EQ(diqsdc::derive_seed(9, 4), diqsdc::derive_seed(9, 4));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(diqsdc::derive_seed(9, i));
  EXPECT_EQ(seen.size(), 1000u);
}
