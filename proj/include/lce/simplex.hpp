#ifndef LCE_SIMPLEX_HPP
#define LCE_SIMPLEX_HPP

// Dense two-phase simplex for small problems in standard form
//   minimize c^T x  subject to  A x = b,  x >= 0.
// Templated on the scalar: double (with tolerances) or an exact rational type.

#include "lce/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <type_traits>
#include <vector>

namespace lce {

using Rational = boost::multiprecision::cpp_rational;

template <class T>
struct LpTraits;

template <>
struct LpTraits<double> {
    static double pivot_eps() { return 1e-11; }
    static double feasibility_eps() { return 1e-9; }
};

template <>
struct LpTraits<Rational> {
    static Rational pivot_eps() { return 0; }
    static Rational feasibility_eps() { return 0; }
};

/// Exact conversion of a finite double to a rational.
inline Rational to_rational(double x) {
    if (!std::isfinite(x)) {
        throw NumericalError("to_rational: non-finite value");
    }
    if (x == 0.0) {
        return 0;
    }
    int exp = 0;
    const double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
    const auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
    exp -= 53;
    Rational r(m);
    const boost::multiprecision::cpp_int two_pow = boost::multiprecision::cpp_int(1) << std::abs(exp);
    if (exp >= 0) {
        r *= Rational(two_pow);
    } else {
        r /= Rational(two_pow);
    }
    return r;
}

enum class LpStatus { optimal, infeasible, unbounded };

template <class T>
struct LpResult {
    LpStatus status = LpStatus::infeasible;
    T objective{};
    std::vector<T> x;
};

namespace detail {

template <class T>
class Tableau {
public:
    Tableau(const std::vector<std::vector<T>>& a, const std::vector<T>& b, std::size_t n)
        : m_(a.size()), n_(n), cols_(n + a.size()) {
        rows_.assign(m_, std::vector<T>(cols_ + 1, T(0)));
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            const bool flip = b[i] < T(0);
            for (std::size_t j = 0; j < n_; ++j) {
                rows_[i][j] = flip ? T(-a[i][j]) : a[i][j];
            }
            rows_[i][n_ + i] = T(1);
            rows_[i][cols_] = flip ? T(-b[i]) : b[i];
            basis_[i] = n_ + i;
        }
        obj_.assign(cols_ + 1, T(0));
    }

    // Reduced costs for the objective with coefficients `cost` (size cols_).
    void set_objective(const std::vector<T>& cost) {
        obj_.assign(cols_ + 1, T(0));
        for (std::size_t j = 0; j < cols_; ++j) {
            obj_[j] = cost[j];
        }
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const T cb = cost[basis_[i]];
            if (cb == T(0)) {
                continue;
            }
            for (std::size_t j = 0; j <= cols_; ++j) {
                obj_[j] -= cb * rows_[i][j];
            }
        }
    }

    /// Runs simplex iterations over columns [0, allowed). Returns false if unbounded.
    bool optimize(std::size_t allowed, int max_iter) {
        const T eps = LpTraits<T>::pivot_eps();
        int degenerate_run = 0;
        for (int it = 0; it < max_iter; ++it) {
            // Dantzig pricing; Bland's rule after a run of degenerate pivots.
            const bool bland = degenerate_run > 50;
            std::size_t s = allowed;
            for (std::size_t j = 0; j < allowed; ++j) {
                if (obj_[j] < -eps && (s == allowed || (!bland && obj_[j] < obj_[s]))) {
                    s = j;
                    if (bland) {
                        break;
                    }
                }
            }
            if (s == allowed) {
                return true;
            }
            std::size_t r = rows_.size();
            T best{};
            for (std::size_t i = 0; i < rows_.size(); ++i) {
                if (rows_[i][s] > eps) {
                    const T ratio = rows_[i][cols_] / rows_[i][s];
                    if (r == rows_.size() || ratio < best || (ratio == best && basis_[i] < basis_[r])) {
                        r = i;
                        best = ratio;
                    }
                }
            }
            if (r == rows_.size()) {
                return false;
            }
            degenerate_run = (best == T(0)) ? degenerate_run + 1 : 0;
            pivot(r, s);
        }
        throw NumericalError("simplex: iteration limit reached");
    }

    void pivot(std::size_t r, std::size_t s) {
        const T piv = rows_[r][s];
        for (auto& v : rows_[r]) {
            v /= piv;
        }
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (i == r || rows_[i][s] == T(0)) {
                continue;
            }
            const T f = rows_[i][s];
            for (std::size_t j = 0; j <= cols_; ++j) {
                rows_[i][j] -= f * rows_[r][j];
            }
        }
        if (obj_[s] != T(0)) {
            const T f = obj_[s];
            for (std::size_t j = 0; j <= cols_; ++j) {
                obj_[j] -= f * rows_[r][j];
            }
        }
        basis_[r] = s;
    }

    /// Pivots artificial variables out of the basis; drops redundant rows.
    void expel_artificials() {
        const T eps = LpTraits<T>::pivot_eps();
        for (std::size_t i = 0; i < rows_.size();) {
            if (basis_[i] < n_) {
                ++i;
                continue;
            }
            std::size_t s = n_;
            for (std::size_t j = 0; j < n_; ++j) {
                if (abs_of(rows_[i][j]) > eps) {
                    s = j;
                    break;
                }
            }
            if (s == n_) {
                rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
                basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
            } else {
                pivot(i, s);
                ++i;
            }
        }
    }

    [[nodiscard]] T objective_value() const { return -obj_[cols_]; }
    [[nodiscard]] std::size_t cols() const { return cols_; }

    [[nodiscard]] std::vector<T> solution() const {
        std::vector<T> x(n_, T(0));
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (basis_[i] < n_) {
                x[basis_[i]] = rows_[i][cols_];
            }
        }
        return x;
    }

    static T abs_of(const T& v) { return v < T(0) ? T(-v) : v; }

private:
    std::size_t m_;
    std::size_t n_;
    std::size_t cols_;
    std::vector<std::vector<T>> rows_;
    std::vector<std::size_t> basis_;
    std::vector<T> obj_;
};

} // namespace detail

/// Solve min c^T x s.t. A x = b, x >= 0. `a` is row-major with `c.size()` columns.
template <class T>
LpResult<T> solve_lp(const std::vector<std::vector<T>>& a, const std::vector<T>& b,
                     const std::vector<T>& c, int max_iter = 200000) {
    const std::size_t m = a.size();
    const std::size_t n = c.size();
    detail::require(b.size() == m, "solve_lp: b size mismatch");
    for (const auto& row : a) {
        detail::require(row.size() == n, "solve_lp: row size mismatch");
    }
    detail::Tableau<T> tab(a, b, n);

    // Phase 1: minimize the sum of artificials.
    std::vector<T> phase1(n + m, T(0));
    for (std::size_t i = 0; i < m; ++i) {
        phase1[n + i] = T(1);
    }
    tab.set_objective(phase1);
    tab.optimize(n + m, max_iter);
    LpResult<T> res;
    if (tab.objective_value() > LpTraits<T>::feasibility_eps()) {
        res.status = LpStatus::infeasible;
        return res;
    }
    tab.expel_artificials();

    // Phase 2 over the original columns only.
    std::vector<T> cost(n + m, T(0));
    for (std::size_t j = 0; j < n; ++j) {
        cost[j] = c[j];
    }
    tab.set_objective(cost);
    if (!tab.optimize(n, max_iter)) {
        res.status = LpStatus::unbounded;
        return res;
    }
    res.status = LpStatus::optimal;
    res.objective = tab.objective_value();
    res.x = tab.solution();
    return res;
}

} // namespace lce

#endif // LCE_SIMPLEX_HPP
