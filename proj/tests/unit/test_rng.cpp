#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "edsense/rng.hpp"

using namespace edsense;

// ============================================================================
// Philox4x32-10 known-answer vectors
// ============================================================================
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UsableAtCompileTime) {
  constexpr auto block = philox4x32_10({0, 0, 0, 0}, {0, 0});
  static_assert(block[0] == 0x6627e8d5U);
  SUCCEED();
}

// ============================================================================
// CounterRng
// ============================================================================
TEST(CounterRng, SatisfiesUniformRandomBitGenerator) {
  static_assert(std::uniform_random_bit_generator<CounterRng>);
  CounterRng rng(1, 2, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double v = u(rng);
  EXPECT_GE(v, 0.0);
  EXPECT_LT(v, 1.0);
}

TEST(CounterRng, FirstBlockIsPhiloxOfAddress) {
  CounterRng rng(0x0000000200000001ULL, 7, 0x0000000500000004ULL);
  const auto block = philox4x32_10({0, 7, 4, 5}, {1, 2});
  for (int i = 0; i < 4; ++i) EXPECT_EQ(rng(), block[static_cast<std::size_t>(i)]);
  const auto next = philox4x32_10({1, 7, 4, 5}, {1, 2});
  EXPECT_EQ(rng(), next[0]);
}

TEST(CounterRng, ReproducibleAndAddressSensitive) {
  auto draw = [](std::uint64_t seed, std::uint32_t stream, std::uint64_t sub) {
    CounterRng rng(seed, stream, sub);
    std::vector<std::uint32_t> out(16);
    for (auto& v : out) v = rng();
    return out;
  };
  EXPECT_EQ(draw(1, 1, 42), draw(1, 1, 42));
  EXPECT_NE(draw(1, 1, 42), draw(2, 1, 42));
  EXPECT_NE(draw(1, 1, 42), draw(1, 2, 42));
  EXPECT_NE(draw(1, 1, 42), draw(1, 1, 43));
  EXPECT_NE(draw(1, 1, 42), draw(1, 1, 42 + (std::uint64_t{1} << 32)));
}

TEST(CounterRng, UniformMoments) {
  // Mean and variance of U(0,1) from 2e5 draws spread over many substreams.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double sum = 0.0, sum2 = 0.0;
  constexpr int kStreams = 20000;
  constexpr int kPerStream = 10;
  for (int s = 0; s < kStreams; ++s) {
    CounterRng rng(9, 1, static_cast<std::uint64_t>(s));
    for (int i = 0; i < kPerStream; ++i) {
      const double v = u(rng);
      sum += v;
      sum2 += v * v;
    }
  }
  const double n = kStreams * kPerStream;
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  EXPECT_NEAR(mean, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(var, 1.0 / 12.0, 0.002);
}

TEST(CounterRng, NeighbouringStreamsUncorrelated) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  constexpr int kN = 50000;
  double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
  for (int t = 0; t < kN; ++t) {
    CounterRng a(3, 1, static_cast<std::uint64_t>(t));
    CounterRng b(3, 1, static_cast<std::uint64_t>(t) + 1);
    const double x = u(a), y = u(b);
    sx += x;
    sy += y;
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  const double cov = sxy / kN - (sx / kN) * (sy / kN);
  const double corr = cov / std::sqrt((sxx / kN - sx * sx / kN / kN) * (syy / kN - sy * sy / kN / kN));
  EXPECT_LT(std::abs(corr), 5.0 / std::sqrt(kN));
}
