#include "lce/numeric.hpp"
#include "lce/simplex.hpp"

#include <gtest/gtest.h>

using namespace lce;

namespace {

template <class T>
using Rows = std::vector<std::vector<T>>;

template <class T>
Rows<T> cast_rows(const Rows<double>& a) {
    Rows<T> out;
    for (const auto& row : a) {
        std::vector<T> r;
        for (double v : row) {
            r.push_back(to_rational(v));
        }
        out.push_back(r);
    }
    return out;
}

std::vector<Rational> cast_vec(const std::vector<double>& v) {
    std::vector<Rational> out;
    for (double x : v) {
        out.push_back(to_rational(x));
    }
    return out;
}

} // namespace

TEST(Simplex, TwoVariableOptimum) {
    // max x1 + x2 with x1 + 2 x2 <= 4, 3 x1 + x2 <= 6; slacks in columns 2, 3.
    const Rows<double> a{{1, 2, 1, 0}, {3, 1, 0, 1}};
    const std::vector<double> b{4, 6};
    const std::vector<double> c{-1, -1, 0, 0};
    const auto r = solve_lp(a, b, c);
    ASSERT_EQ(r.status, LpStatus::optimal);
    EXPECT_NEAR(r.objective, -14.0 / 5.0, 1e-12);
    EXPECT_NEAR(r.x[0], 8.0 / 5.0, 1e-12);
    EXPECT_NEAR(r.x[1], 6.0 / 5.0, 1e-12);

    const auto e = solve_lp(cast_rows<Rational>(a), cast_vec(b), cast_vec(c));
    ASSERT_EQ(e.status, LpStatus::optimal);
    EXPECT_EQ(e.objective, Rational(-14, 5));
}

TEST(Simplex, Infeasible) {
    const Rows<double> a{{1, 1}, {1, 1}};
    EXPECT_EQ(solve_lp(a, {1.0, 2.0}, {0.0, 0.0}).status, LpStatus::infeasible);
    EXPECT_EQ(solve_lp(cast_rows<Rational>(a), cast_vec({1, 2}), cast_vec({0, 0})).status, LpStatus::infeasible);
}

TEST(Simplex, NegativeRightHandSide) {
    // -x1 - x2 = -3, x1 <= 1 via slack: min x2 gives x2 = 2.
    const Rows<double> a{{-1, -1, 0}, {1, 0, 1}};
    const auto r = solve_lp(a, {-3.0, 1.0}, {0.0, 1.0, 0.0});
    ASSERT_EQ(r.status, LpStatus::optimal);
    EXPECT_NEAR(r.objective, 2.0, 1e-12);
}

TEST(Simplex, Unbounded) {
    const Rows<double> a{{1, -1}};
    EXPECT_EQ(solve_lp(a, {1.0}, {-1.0, 0.0}).status, LpStatus::unbounded);
}

TEST(Simplex, DegenerateCyclingExample) {
    // Classical degenerate instance on which Dantzig's rule without anti-cycling loops.
    const Rows<double> a{{1, 0, 0, 0.25, -8, -1, 9}, {0, 1, 0, 0.5, -12, -0.5, 3}, {0, 0, 1, 0, 0, 1, 0}};
    const std::vector<double> b{0, 0, 1};
    const std::vector<double> c{0, 0, 0, -0.75, 20, -0.5, 6};
    const auto r = solve_lp(a, b, c);
    ASSERT_EQ(r.status, LpStatus::optimal);
    EXPECT_NEAR(r.objective, -1.25, 1e-12);
    const auto e = solve_lp(cast_rows<Rational>(a), cast_vec(b), cast_vec(c));
    ASSERT_EQ(e.status, LpStatus::optimal);
    EXPECT_EQ(e.objective, Rational(-5, 4));
}

TEST(Simplex, RedundantRows) {
    const Rows<double> a{{1, 1, 0}, {2, 2, 0}, {0, 1, 1}};
    const auto r = solve_lp(a, {1.0, 2.0, 1.0}, {1.0, 0.0, 1.0});
    ASSERT_EQ(r.status, LpStatus::optimal);
    EXPECT_NEAR(r.objective, 0.0, 1e-12);
}

TEST(Simplex, ShapeErrors) {
    EXPECT_THROW(solve_lp(Rows<double>{{1, 1}}, {1.0, 2.0}, {0.0, 0.0}), InvalidArgument);
    EXPECT_THROW(solve_lp(Rows<double>{{1}}, {1.0}, {0.0, 0.0}), InvalidArgument);
}

TEST(ToRational, ExactBinaryExpansion) {
    EXPECT_EQ(to_rational(0.5), Rational(1, 2));
    EXPECT_EQ(to_rational(-3.0), Rational(-3));
    EXPECT_EQ(to_rational(0.1), Rational(3602879701896397LL, 36028797018963968LL));
    EXPECT_EQ(to_rational(0.0), Rational(0));
}

TEST(SimplexProperty, FloatingMatchesExactOnRandomPackingProblems) {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const int m = 2 + static_cast<int>(rng.integer(0, 2));
        const int n = 2 + static_cast<int>(rng.integer(0, 3));
        Rows<double> a;
        std::vector<double> b;
        std::vector<double> c(static_cast<std::size_t>(n + m), 0.0);
        for (int i = 0; i < m; ++i) {
            std::vector<double> row(static_cast<std::size_t>(n + m), 0.0);
            for (int j = 0; j < n; ++j) {
                row[static_cast<std::size_t>(j)] = static_cast<double>(rng.integer(1, 9));
            }
            row[static_cast<std::size_t>(n + i)] = 1.0;
            a.push_back(row);
            b.push_back(static_cast<double>(rng.integer(1, 20)));
        }
        for (int j = 0; j < n; ++j) {
            c[static_cast<std::size_t>(j)] = -static_cast<double>(rng.integer(0, 9));
        }
        const auto r = solve_lp(a, b, c);
        const auto e = solve_lp(cast_rows<Rational>(a), cast_vec(b), cast_vec(c));
        ASSERT_EQ(r.status, LpStatus::optimal);
        ASSERT_EQ(e.status, LpStatus::optimal);
        EXPECT_NEAR(r.objective, e.objective.convert_to<double>(), 1e-9);
        // Primal feasibility of the floating solution.
        for (int i = 0; i < m; ++i) {
            double lhs = 0.0;
            for (int j = 0; j < n + m; ++j) {
                lhs += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * r.x[static_cast<std::size_t>(j)];
            }
            EXPECT_NEAR(lhs, b[static_cast<std::size_t>(i)], 1e-9);
        }
    }
}
