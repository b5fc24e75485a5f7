#include "lce/convolution.hpp"
#include "lce/density.hpp"
#include "lce/moments.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lce;

namespace {

LatticePmf coin() { return {BoxDomain({0}, {1}), {0.5, 0.5}}; }

double max_abs_diff(const LatticePmf& a, const LatticePmf& b) {
    double worst = 0.0;
    auto visit = [&](const IndexVector& k, std::size_t) { worst = std::max(worst, std::abs(a.at(k) - b.at(k))); };
    for_each_cell(a.box(), visit);
    for_each_cell(b.box(), visit);
    return worst;
}

LatticePmf random_pmf(SplitMix64& rng, int d, int extent) {
    const BoxDomain box(IndexVector(static_cast<std::size_t>(d), 0),
                        IndexVector(static_cast<std::size_t>(d), extent - 1));
    std::vector<double> v(box.cell_count());
    double total = 0.0;
    for (double& x : v) {
        x = rng.uniform();
        total += x;
    }
    for (double& x : v) {
        x /= total;
    }
    return {box, std::move(v)};
}

} // namespace

TEST(Convolve, PointMassShifts) {
    const LatticePmf p(BoxDomain({0, 0}, {1, 2}), {0.1, 0.2, 0.3, 0.05, 0.15, 0.2});
    const auto q = convolve(LatticePmf::point_mass({3, -1}), p);
    EXPECT_LT(max_abs_diff(q, p.shifted({3, -1})), 1e-15);
}

TEST(Convolve, TwoCoins) {
    for (auto method : {ConvolutionMethod::direct, ConvolutionMethod::fft}) {
        const auto r = convolve(coin(), coin(), {.method = method});
        EXPECT_NEAR(r.at({0}), 0.25, 1e-15);
        EXPECT_NEAR(r.at({1}), 0.5, 1e-15);
        EXPECT_NEAR(r.at({2}), 0.25, 1e-15);
    }
}

TEST(Convolve, DirectAgreesWithFftOnGaussian) {
    const auto g = quantize_density(make_gaussian(4.0, 2), {0, 0});
    const auto a = convolve(g, g, {.method = ConvolutionMethod::direct});
    const auto b = convolve(g, g, {.method = ConvolutionMethod::fft});
    EXPECT_LT(max_abs_diff(a, b), 1e-10);
}

TEST(Convolve, DeficitCombines) {
    const LatticePmf p(BoxDomain({0}, {0}), {0.9}, 0.1);
    const LatticePmf q(BoxDomain({0}, {0}), {0.8}, 0.2);
    const auto r = convolve(p, q);
    EXPECT_NEAR(r.at({0}), 0.72, 1e-15);
    EXPECT_NEAR(r.deficit(), 0.28, 1e-15);
}

TEST(Convolve, DimensionMismatch) {
    EXPECT_THROW(convolve(coin(), LatticePmf::point_mass({0, 0})), InvalidArgument);
}

TEST(Convolve, CapacityGuard) {
    const LatticePmf wide(BoxDomain({0}, {999}), std::vector<double>(1000, 1e-3));
    EXPECT_THROW(convolve(wide, wide, {.max_cells = 100}), CapacityExceeded);
}

TEST(SelfConvolve, Examples) {
    EXPECT_EQ(self_convolve(coin(), 1), coin());
    const auto b = self_convolve(coin(), 3);
    const double expect[] = {1.0 / 8, 3.0 / 8, 3.0 / 8, 1.0 / 8};
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(b.at({k}), expect[k], 1e-15);
    }
    EXPECT_THROW(self_convolve(coin(), 0), InvalidArgument);
}

TEST(SelfConvolve, VarianceDoubles) {
    const auto g = quantize_density(make_gaussian(3.0, 1), {0});
    const double v1 = discrete_moments(g).cov(0, 0);
    const double v2 = discrete_moments(self_convolve(g, 2)).cov(0, 0);
    EXPECT_NEAR(v2 / (2.0 * v1), 1.0, 1e-8);
}

TEST(ConvolveProperty, CommutativeAndAssociative) {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + trial % 3;
        const auto a = random_pmf(rng, d, 3);
        const auto b = random_pmf(rng, d, 2);
        const auto c = random_pmf(rng, d, 2);
        EXPECT_LT(max_abs_diff(convolve(a, b), convolve(b, a)), 1e-15);
        EXPECT_LT(max_abs_diff(convolve(convolve(a, b), c), convolve(a, convolve(b, c))), 1e-15);
        const auto fa = convolve(a, b, {.method = ConvolutionMethod::fft});
        EXPECT_LT(max_abs_diff(fa, convolve(a, b, {.method = ConvolutionMethod::direct})), 1e-13);
        EXPECT_NEAR(convolve(a, b).retained_mass(), 1.0, 1e-13);
    }
}

TEST(ConvolveProperty, MeansAndCovariancesAdd) {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_pmf(rng, 2, 4);
        const auto b = random_pmf(rng, 2, 3);
        const auto ma = discrete_moments(a);
        const auto mb = discrete_moments(b);
        const auto mc = discrete_moments(convolve(a, b));
        for (int i = 0; i < 2; ++i) {
            EXPECT_NEAR(mc.mean[static_cast<std::size_t>(i)],
                        ma.mean[static_cast<std::size_t>(i)] + mb.mean[static_cast<std::size_t>(i)], 1e-12);
            for (int j = 0; j < 2; ++j) {
                EXPECT_NEAR(mc.cov(i, j), ma.cov(i, j) + mb.cov(i, j), 1e-12);
            }
        }
    }
}
