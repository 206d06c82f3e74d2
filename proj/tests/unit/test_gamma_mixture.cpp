#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "edsense/gamma_mixture.hpp"
#include "support/mixtures.hpp"
#include "support/oracles.hpp"

using namespace edsense;

namespace {

oracle::MixtureSpec spec_of(const GammaMixture& mix) {
  oracle::MixtureSpec s;
  for (const auto& c : mix.components()) {
    s.shapes.push_back(c.shape);
    s.scales.push_back(c.scale);
  }
  s.offset = mix.offset();
  return s;
}

}  // namespace

// ============================================================================
// merge_equal_scales
// ============================================================================
TEST(MergeEqualScales, IdenticalScalesAddShapes) {
  const auto out = merge_equal_scales({{1, 0.5}, {2, 0.5}});
  ASSERT_EQ(out.size(), 1U);
  EXPECT_EQ(out[0], (GammaComponent{3, 0.5}));
}

TEST(MergeEqualScales, DistinctScalesUntouched) {
  const std::vector<GammaComponent> in{{1, 0.5}, {1, 0.7}};
  EXPECT_EQ(merge_equal_scales(in), in);
}

TEST(MergeEqualScales, WithinToleranceMerged) {
  const auto out = merge_equal_scales({{1, 0.5}, {1, 0.5 * (1 + 1e-12)}});
  ASSERT_EQ(out.size(), 1U);
  EXPECT_EQ(out[0], (GammaComponent{2, 0.5}));
}

TEST(MergeEqualScales, OutputScalesPairwiseDistinct) {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> pick(0, 3);
  const double grid[] = {0.1, 0.25, 0.25 * (1 + 5e-10), 1.0};
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<GammaComponent> in;
    for (int i = 0; i < 6; ++i) in.push_back({1 + pick(gen), grid[pick(gen)]});
    const auto out = merge_equal_scales(in);
    int shape_in = 0, shape_out = 0;
    for (const auto& c : in) shape_in += c.shape;
    for (const auto& c : out) shape_out += c.shape;
    EXPECT_EQ(shape_in, shape_out);
    EXPECT_GT(GammaMixture(out, 0.0).min_relative_gap(), kScaleMergeTolerance);
  }
}

// ============================================================================
// xi_coefficients
// ============================================================================
TEST(XiCoefficients, SingleComponent) {
  const GammaMixture mix({{3, 0.5}}, 0.0);
  const auto xi = xi_coefficients(mix);
  EXPECT_EQ(xi(0, 3), 1.0);
  EXPECT_EQ(xi(0, 1), 0.0);
  EXPECT_EQ(xi(0, 2), 0.0);
}

TEST(XiCoefficients, HypoexponentialMatchesAnalyticDensity) {
  // Exp(2) + Exp(1): f(y) = e^{-y/2} - e^{-y}
  const GammaMixture mix({{1, 2.0}, {1, 1.0}}, 0.0);
  const auto xi = xi_coefficients(mix);
  EXPECT_NEAR(xi(0, 1), 2.0, 1e-14);
  EXPECT_NEAR(xi(1, 1), -1.0, 1e-14);
  for (double y : {0.0, 0.1, 0.7, 2.0, 5.0, 13.0}) {
    EXPECT_NEAR(mixture_pdf(mix, xi, y), std::exp(-y / 2) - std::exp(-y), 1e-12);
  }
}

TEST(XiCoefficients, RepeatedPolesMatchCollocationOracle) {
  // Exact values: -250/27, 125/27 ; 100/27, 40/27, 4/9
  const GammaMixture mix({{2, 1.0}, {3, 0.4}}, 0.5);
  const auto xi = xi_coefficients(mix);
  const auto ref = oracle::partial_fractions(spec_of(mix));
  const double exact[2][3] = {{-250.0 / 27, 125.0 / 27, 0}, {100.0 / 27, 40.0 / 27, 4.0 / 9}};
  for (std::size_t i = 0; i < 2; ++i) {
    for (int k = 1; k <= xi.order(i); ++k) {
      EXPECT_NEAR(ref[i][k - 1], exact[i][k - 1], 1e-9);
      EXPECT_NEAR(xi(i, k), exact[i][k - 1], 1e-12);
    }
  }
  EXPECT_NEAR(xi.sum(), 1.0, 1e-13);
}

TEST(XiCoefficients, RandomMixturesAgreeWithCollocation) {
  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 20; ++rep) {
    const auto mix = testsupport::random_mixture(gen, 6, 5);
    const auto xi = xi_coefficients(mix);
    const auto ref = oracle::partial_fractions(spec_of(mix));
    for (std::size_t i = 0; i < mix.size(); ++i) {
      for (int k = 1; k <= xi.order(i); ++k) {
        EXPECT_NEAR(xi(i, k), ref[i][k - 1], 1e-12 * std::max(1.0, std::abs(ref[i][k - 1])));
      }
    }
  }
}

TEST(XiCoefficients, CloseScalesFlagged) {
  const auto xi = xi_coefficients(GammaMixture({{1, 1.0}, {1, 1.0005}}, 0.0));
  ASSERT_EQ(xi.diagnostics().size(), 1U);
  EXPECT_EQ(xi.diagnostics()[0].code, "close_scales");
  EXPECT_TRUE(xi_coefficients(GammaMixture({{1, 1.0}, {1, 2.0}}, 0.0)).diagnostics().empty());
}

TEST(XiCoefficients, OverflowReported) {
  // Relative gap ~1e-8 with large shapes: leading terms ~ (1e8)^200.
  const GammaMixture mix({{200, 1.0}, {200, 1.0 + 1e-8}}, 0.0);
  EXPECT_THROW(xi_coefficients(mix), ConditioningError);
}

// ============================================================================
// mixture_pdf / mixture_mgf
// ============================================================================
TEST(MixturePdf, ZeroBelowOffset) {
  const GammaMixture mix({{2, 1.0}}, 0.5);
  const auto xi = xi_coefficients(mix);
  EXPECT_EQ(mixture_pdf(mix, xi, 0.49), 0.0);
  EXPECT_EQ(mixture_pdf(mix, xi, -3.0), 0.0);
  EXPECT_THROW(mixture_pdf(mix, xi, std::nan("")), DomainError);
}

TEST(MixturePdf, PlainExponential) {
  const GammaMixture mix({{1, 1.7}}, 0.0);
  const auto xi = xi_coefficients(mix);
  for (double y : {0.0, 0.3, 2.0, 9.0}) EXPECT_NEAR(mixture_pdf(mix, xi, y), std::exp(-y / 1.7) / 1.7, 1e-15);
}

TEST(MixturePdf, NormalisedForReferenceMixture) {
  const GammaMixture mix({{2, 1.0}, {3, 0.4}}, 0.5);
  const auto xi = xi_coefficients(mix);
  const double total = oracle::integrate_half_line([&](double y) { return mixture_pdf(mix, xi, y); }, 0.5);
  EXPECT_NEAR(total, 1.0, 1e-8);
}

TEST(MixtureProperties, NormalisationMeanAndMgfOnRandomMixtures) {
  std::mt19937_64 gen(29);
  for (int rep = 0; rep < 40; ++rep) {
    const auto mix = testsupport::random_mixture(gen, 6, 5);
    const auto xi = xi_coefficients(mix);
    auto pdf = [&](double y) { return mixture_pdf(mix, xi, y); };
    EXPECT_NEAR(oracle::integrate_half_line(pdf, mix.offset()), 1.0, 1e-8);
    const double mean = oracle::integrate_half_line([&](double y) { return y * pdf(y); }, mix.offset());
    EXPECT_NEAR(mean / mix.mean(), 1.0, 1e-6);
    for (double s : {-2.0, -1.0, -0.1}) {
      const double lt = oracle::integrate_half_line([&](double y) { return std::exp(s * y) * pdf(y); }, mix.offset());
      EXPECT_NEAR(lt, mixture_mgf(mix, s), 1e-7) << "s=" << s;
    }
  }
}

TEST(MixtureMgf, ClosedFormValues) {
  EXPECT_EQ(mixture_mgf(GammaMixture({{2, 1.0}, {3, 0.4}}, 0.5), 0.0), 1.0);
  EXPECT_NEAR(mixture_mgf(GammaMixture({{1, 2.0}}, 0.0), 0.25), 2.0, 1e-15);
  EXPECT_NEAR(mixture_mgf(GammaMixture({{2, 1.0}, {3, 0.4}}, 0.5), -1.0), 0.05525971753941631046, 1e-15);
}

TEST(MixtureMgf, PoleRejected) {
  const GammaMixture mix({{1, 2.0}, {2, 0.5}}, 0.0);
  EXPECT_THROW(mixture_mgf(mix, 0.5), DomainError);
  EXPECT_THROW(mixture_mgf(mix, 1.0), DomainError);
  EXPECT_NO_THROW(mixture_mgf(mix, 0.49));
}

TEST(MixtureLaw, EmpiricalCdfWithinDkwBand) {
  // c + sum Gamma(a_i, b_i) sampled directly; CDF from integrating the density.
  const GammaMixture mix({{2, 1.0}, {3, 0.4}, {1, 0.15}}, 0.5);
  const auto xi = xi_coefficients(mix);
  std::mt19937_64 gen(5);
  constexpr int kSamples = 100000;
  std::vector<double> draws(kSamples);
  for (auto& d : draws) {
    d = mix.offset();
    for (const auto& c : mix.components()) d += std::gamma_distribution<double>(c.shape, c.scale)(gen);
  }
  std::sort(draws.begin(), draws.end());
  const double band = std::sqrt(std::log(2.0 / 0.01) / (2.0 * kSamples));
  for (double y : {0.8, 1.2, 1.6, 2.0, 2.5, 3.0, 4.0, 6.0}) {
    const double cdf = 1.0 - oracle::integrate_half_line([&](double t) { return mixture_pdf(mix, xi, t); }, y);
    const double ecdf = static_cast<double>(std::upper_bound(draws.begin(), draws.end(), y) - draws.begin()) / kSamples;
    EXPECT_LE(std::abs(ecdf - cdf), band) << "y=" << y;
  }
}

TEST(GammaMixture, RejectsInvalidComponents) {
  EXPECT_THROW(GammaMixture({}, 0.0), DomainError);
  EXPECT_THROW(GammaMixture({{0, 1.0}}, 0.0), DomainError);
  EXPECT_THROW(GammaMixture({{1, 0.0}}, 0.0), DomainError);
  EXPECT_THROW(GammaMixture({{1, 1.0}}, -0.1), DomainError);
}
