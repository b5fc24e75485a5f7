#include "lce/convolution.hpp"
#include "lce/density.hpp"
#include "lce/moments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace lce;

namespace {

LatticePmf uniform_1d(int m) { return {BoxDomain({0}, {m - 1}), std::vector<double>(static_cast<std::size_t>(m), 1.0 / m)}; }

LatticePmf gaussian(double sigma, int d) {
    return quantize_density(make_gaussian(sigma, d), IndexVector(static_cast<std::size_t>(d), 0));
}

} // namespace

TEST(Entropy, Examples) {
    EXPECT_EQ(shannon_entropy(LatticePmf::point_mass({4, 2})), 0.0);
    for (int m : {2, 3, 7, 100}) {
        EXPECT_NEAR(shannon_entropy(uniform_1d(m)), std::log(m), 1e-13);
    }
}

TEST(Entropy, GaussianAgainstDirectSummation) {
    const double sigma = 10.0;
    const auto p = gaussian(sigma, 1);
    double z = 0.0;
    for (int k = -120; k <= 120; ++k) {
        z += std::exp(-k * k / (2 * sigma * sigma));
    }
    double h = 0.0;
    for (int k = -120; k <= 120; ++k) {
        const double q = std::exp(-k * k / (2 * sigma * sigma)) / z;
        h -= q * std::log(q);
    }
    const double value = shannon_entropy(p);
    EXPECT_NEAR(value, h, 1e-6);
    EXPECT_LT(std::abs(value - 0.5 * std::log(2 * std::numbers::pi * std::numbers::e * sigma * sigma)), 1e-3);
}

TEST(Entropy, ZeroCellsIgnored) {
    const LatticePmf p(BoxDomain({0}, {3}), {0.5, 0.0, 0.0, 0.5});
    EXPECT_NEAR(shannon_entropy(p), std::log(2.0), 1e-15);
}

TEST(Moments, Examples) {
    const auto m = discrete_moments(LatticePmf::point_mass({3, -1}));
    EXPECT_DOUBLE_EQ(m.mean[0], 3.0);
    EXPECT_DOUBLE_EQ(m.mean[1], -1.0);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            EXPECT_EQ(m.cov(i, j), 0.0);
        }
    }
    EXPECT_TRUE(m.degenerate);

    const auto u = discrete_moments(uniform_1d(2));
    EXPECT_DOUBLE_EQ(u.mean[0], 0.5);
    EXPECT_DOUBLE_EQ(u.cov(0, 0), 0.25);
    EXPECT_DOUBLE_EQ(u.max_value, 0.5);
}

TEST(Moments, ProductHasDiagonalCovariance) {
    const auto p = make_product({gaussian(2.0, 1), uniform_1d(5)});
    const auto m = discrete_moments(p);
    EXPECT_LT(std::abs(m.cov(0, 1)), 1e-12);
    EXPECT_NEAR(m.cov(1, 1), 2.0, 1e-12);
    EXPECT_NEAR(m.sigma_hat, std::pow(m.cov(0, 0) * m.cov(1, 1), 0.25), 1e-12);
}

TEST(MomentsProperty, ShiftInvariance) {
    SplitMix64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> v(12);
        double t = 0.0;
        for (double& x : v) {
            x = rng.uniform();
            t += x;
        }
        for (double& x : v) {
            x /= t;
        }
        const LatticePmf p(BoxDomain({0, 0}, {2, 3}), v);
        const auto q = p.shifted({rng.integer(-50, 50), rng.integer(-50, 50)});
        const auto mp = discrete_moments(p);
        const auto mq = discrete_moments(q);
        EXPECT_NEAR(shannon_entropy(p), shannon_entropy(q), 1e-14);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                EXPECT_NEAR(mp.cov(i, j), mq.cov(i, j), 1e-10);
            }
        }
    }
}

TEST(MomentsProperty, EntropyGrowsUnderConvolution) {
    SplitMix64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> v(5);
        double t = 0.0;
        for (double& x : v) {
            x = rng.uniform();
            t += x;
        }
        for (double& x : v) {
            x /= t;
        }
        const LatticePmf p(BoxDomain({0}, {4}), v);
        EXPECT_GE(shannon_entropy(convolve(p, p)), shannon_entropy(p) - 1e-14);
    }
}

TEST(Isotropy, Examples) {
    EXPECT_LT(isotropy_score(gaussian(8.0, 2)).normalized, 0.1);
    const auto coin = uniform_1d(2);
    EXPECT_NEAR(isotropy_score(make_product({coin, coin})).op_norm_deviation, 0.0, 1e-15);
    const auto s = isotropy_score(make_product({gaussian(4.0, 1), gaussian(16.0, 1)}));
    EXPECT_GT(s.normalized, 1.0);
    // Eigenvalues 16 and 256 against sigma_hat^2 = 64.
    EXPECT_NEAR(s.op_norm_deviation, 192.0, 1e-3);
}

TEST(Isotropy, DegenerateIsInfinite) {
    const auto s = isotropy_score(LatticePmf::point_mass({0, 0}));
    EXPECT_TRUE(s.degenerate);
    EXPECT_TRUE(std::isinf(s.normalized));
}

TEST(Bounds, UniformSpread) {
    const auto r = entropy_covariance_bounds(uniform_1d(3));
    ASSERT_TRUE(r.spread.has_value());
    EXPECT_NEAR(*r.spread, std::sqrt(1.0 + 8.0 / 3.0) / 3.0, 1e-14);
    EXPECT_NEAR(*r.spread, 0.638, 1e-3);
    EXPECT_NEAR(spread_ratio(uniform_1d(3)), *r.spread, 0.0);
    EXPECT_THROW(spread_ratio(LatticePmf::point_mass({0, 0})), InvalidArgument);
}

TEST(Bounds, PointMassSlack) {
    for (int d = 1; d <= 3; ++d) {
        const auto r = entropy_covariance_bounds(LatticePmf::point_mass(IndexVector(static_cast<std::size_t>(d), 0)));
        EXPECT_NEAR(r.gaussmax_slack, 0.5 * d * std::log(2 * std::numbers::pi * std::numbers::e / 12.0), 1e-13);
        EXPECT_EQ(r.ratio_ub, 0.0);
    }
}

TEST(Bounds, GaussianRatioUpperBound) {
    const auto r = entropy_covariance_bounds(gaussian(32.0, 2));
    EXPECT_NEAR(r.ratio_ub / (0.5 / std::numbers::pi), 1.0, 0.02);
    const auto u = entropy_covariance_bounds(uniform_1d(25));
    EXPECT_NEAR(u.ratio_ub, std::sqrt(624.0) / (25.0 * std::sqrt(12.0)), 1e-13);
}

TEST(Bounds, SlackIsNonNegativeForLogConcave) {
    for (double sigma : {0.5, 1.0, 4.0}) {
        EXPECT_GE(entropy_covariance_bounds(gaussian(sigma, 2)).gaussmax_slack, 0.0);
    }
    for (int m : {1, 2, 5, 40}) {
        EXPECT_GE(entropy_covariance_bounds(uniform_1d(m)).gaussmax_slack, 0.0);
    }
}

TEST(VariationSum, Examples) {
    EXPECT_DOUBLE_EQ(variation_sum(LatticePmf::point_mass({0, 0}), 1), 2.0);
    for (int m : {1, 3, 10}) {
        EXPECT_NEAR(variation_sum(uniform_1d(m), 0), 2.0 / m, 1e-15);
    }
    EXPECT_THROW(variation_sum(uniform_1d(2), 1), InvalidArgument);
}

TEST(VariationSum, GaussianRate) {
    double first = 0.0;
    double prev = 0.0;
    for (double sigma : {4.0, 8.0, 16.0, 32.0}) {
        const auto p = gaussian(sigma, 2);
        const double scaled = variation_sum(p, 0) * discrete_moments(p).sigma_hat;
        if (first == 0.0) {
            first = scaled;
        } else {
            EXPECT_LE(scaled, first * 1.01);
            EXPECT_LE(scaled, prev + 1e-9);
        }
        prev = scaled;
    }
    // Continuum limit: sigma * int |d/dx phi_sigma| = 2 / sqrt(2 pi).
    EXPECT_NEAR(prev, 2.0 / std::sqrt(2 * std::numbers::pi), 1e-2);
}

TEST(SumOfMaxima, Examples) {
    const auto p = gaussian(3.0, 2);
    EXPECT_NEAR(sum_of_maxima(p, 0, 0), p.retained_mass(), 1e-14);

    const LatticePmf q(BoxDomain({-1}, {2}), {0.1, 0.2, 0.3, 0.4});
    EXPECT_NEAR(sum_of_maxima(q, 2, 0), 0.1 + 0.0 + 0.3 + 1.6, 1e-15);
    EXPECT_NEAR(sum_of_maxima(q, 1, 0), 0.1 + 0.3 + 0.8, 1e-15);
}

TEST(SumOfMaxima, ColumnMaxima) {
    // Rows are axis 0; maxima over axis 0 for each column.
    const LatticePmf p(BoxDomain({0, 0}, {1, 2}), {0.1, 0.3, 0.1, 0.2, 0.2, 0.1});
    EXPECT_NEAR(sum_of_maxima(p, 0, 1), 0.2 + 0.3 + 0.1, 1e-15);
    EXPECT_NEAR(sum_of_maxima(p, 1, 1), 0.3 + 2 * 0.1, 1e-15);
}

TEST(SumOfMaxima, GaussianRate) {
    double prev = 0.0;
    for (double sigma : {4.0, 8.0, 16.0, 32.0}) {
        const auto p = gaussian(sigma, 2);
        const double scaled = sum_of_maxima(p, 0, 1) * discrete_moments(p).sigma_hat;
        EXPECT_LT(scaled, 0.5);
        prev = scaled;
    }
    EXPECT_NEAR(prev, 1.0 / std::sqrt(2 * std::numbers::pi), 1e-3);
}
