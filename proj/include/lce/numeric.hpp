#ifndef LCE_NUMERIC_HPP
#define LCE_NUMERIC_HPP

// Small numerical toolkit shared by every module: compensated summation,
// Gauss-Legendre rules, adaptive 1-d quadrature, dense symmetric eigen-
// decomposition for d <= 4, determinants, deterministic directions and RNG.

#include "lce/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace lce {

/// Neumaier's variant of Kahan summation. Deterministic for a fixed order of add().
class CompensatedSum {
public:
    CompensatedSum() = default;
    explicit CompensatedSum(double init) : sum_(init) {}

    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }

    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

template <class Range>
double compensated_total(const Range& values) {
    CompensatedSum s;
    for (double v : values) {
        s.add(v);
    }
    return s.value();
}

// ---------------------------------------------------------------------------
// Gauss-Legendre

/// Nodes and weights of the n-point Gauss-Legendre rule mapped to [0, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    [[nodiscard]] int order() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

inline QuadratureRule compute_gauss_legendre(int n) {
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = (n == 1) ? x : p1;
            const double pn1 = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pn1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        {
            // Recompute derivative at the converged node.
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = (n == 1) ? x : p1;
            const double pn1 = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pn1) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1,1] -> [0,1]
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = 0.5 * (1.0 - x);
        rule.nodes[hi] = 0.5 * (1.0 + x);
        rule.weights[lo] = 0.5 * w;
        rule.weights[hi] = 0.5 * w;
    }
    if (n % 2 == 1) {
        rule.nodes[static_cast<std::size_t>(n / 2)] = 0.5;
    }
    return rule;
}

} // namespace detail

/// Cached Gauss-Legendre rule on [0,1]. Safe to call concurrently.
inline const QuadratureRule& gauss_legendre(int order) {
    detail::require(order >= 1 && order <= 4096, "gauss_legendre: order out of range");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[order];
    if (!slot) {
        slot = std::make_unique<QuadratureRule>(detail::compute_gauss_legendre(order));
    }
    return *slot;
}

template <class F>
double gauss_legendre_integral(F&& f, double a, double b, int order) {
    const auto& rule = gauss_legendre(order);
    CompensatedSum s;
    const double h = b - a;
    for (int i = 0; i < rule.order(); ++i) {
        const auto u = static_cast<std::size_t>(i);
        s.add(rule.weights[u] * f(a + h * rule.nodes[u]));
    }
    return h * s.value();
}

namespace detail {

template <class F>
double adaptive_step(F& f, double a, double b, double whole, double abs_tol, double rel_tol,
                     int depth, int& evaluations) {
    const double mid = 0.5 * (a + b);
    const double left = gauss_legendre_integral(f, a, mid, 15);
    const double right = gauss_legendre_integral(f, mid, b, 15);
    evaluations += 30;
    const double refined = left + right;
    if (std::abs(refined - whole) <= std::max(abs_tol, rel_tol * std::abs(refined))) {
        return refined;
    }
    if (depth <= 0) {
        throw NumericalError("adaptive quadrature: recursion budget exhausted");
    }
    return adaptive_step(f, a, mid, left, 0.5 * abs_tol, rel_tol, depth - 1, evaluations) +
           adaptive_step(f, mid, b, right, 0.5 * abs_tol, rel_tol, depth - 1, evaluations);
}

} // namespace detail

/// Adaptive bisection on 15-point Gauss-Legendre panels.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-14,
                          double rel_tol = 1e-12, int max_depth = 40) {
    if (a == b) {
        return 0.0;
    }
    int evaluations = 0;
    const double whole = gauss_legendre_integral(f, a, b, 15);
    return detail::adaptive_step(f, a, b, whole, abs_tol, rel_tol, max_depth, evaluations);
}

/// Integral over [a, inf) of an integrand that decays eventually. Panels of width
/// `scale` are added until `quiet_panels` consecutive panels contribute below
/// rel_tol of the running total. `hard_limit` caps the number of panels.
template <class F>
double integrate_to_infinity(F&& f, double a, double scale, double rel_tol = 1e-15,
                             int quiet_panels = 3, int hard_limit = 100000) {
    detail::require(scale > 0.0, "integrate_to_infinity: scale must be positive");
    CompensatedSum total;
    int quiet = 0;
    for (int i = 0; i < hard_limit; ++i) {
        const double lo = a + scale * i;
        const double crude = std::abs(gauss_legendre_integral(f, lo, lo + scale, 15));
        const double floor = 1e-14 * std::max(std::abs(total.value()), crude);
        const double piece = integrate_adaptive(f, lo, lo + scale, std::max(floor, 1e-300), 1e-13);
        total.add(piece);
        if (std::abs(piece) <= rel_tol * std::abs(total.value())) {
            if (++quiet >= quiet_panels) {
                return total.value();
            }
        } else {
            quiet = 0;
        }
    }
    throw NumericalError("integrate_to_infinity: integrand did not decay within panel budget");
}

// ---------------------------------------------------------------------------
// Dense small matrices

/// Row-major square matrix. Sized for covariance work (d <= 4) but not limited to it.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int n, double fill = 0.0)
        : n_(n), a_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {}

    static Matrix identity(int n) {
        Matrix m(n);
        for (int i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    [[nodiscard]] int size() const { return n_; }
    double& operator()(int i, int j) { return a_[index(i, j)]; }
    double operator()(int i, int j) const { return a_[index(i, j)]; }
    [[nodiscard]] std::span<const double> data() const { return a_; }

    friend Matrix operator+(Matrix lhs, const Matrix& rhs) {
        for (std::size_t i = 0; i < lhs.a_.size(); ++i) {
            lhs.a_[i] += rhs.a_[i];
        }
        return lhs;
    }
    friend Matrix operator-(Matrix lhs, const Matrix& rhs) {
        for (std::size_t i = 0; i < lhs.a_.size(); ++i) {
            lhs.a_[i] -= rhs.a_[i];
        }
        return lhs;
    }
    friend Matrix operator*(double s, Matrix m) {
        for (double& v : m.a_) {
            v *= s;
        }
        return m;
    }
    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    [[nodiscard]] std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(j);
    }
    int n_ = 0;
    std::vector<double> a_;
};

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    const int n = a.size();
    Matrix c(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) {
                s += a(i, k) * b(k, j);
            }
            c(i, j) = s;
        }
    }
    return c;
}

inline Matrix transpose(const Matrix& a) {
    Matrix t(a.size());
    for (int i = 0; i < a.size(); ++i) {
        for (int j = 0; j < a.size(); ++j) {
            t(i, j) = a(j, i);
        }
    }
    return t;
}

/// Determinant by LU with partial pivoting.
inline double determinant(Matrix m) {
    const int n = m.size();
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r) {
            if (std::abs(m(r, c)) > std::abs(m(piv, c))) {
                piv = r;
            }
        }
        if (m(piv, c) == 0.0) {
            return 0.0;
        }
        if (piv != c) {
            for (int j = 0; j < n; ++j) {
                std::swap(m(piv, j), m(c, j));
            }
            det = -det;
        }
        det *= m(c, c);
        for (int r = c + 1; r < n; ++r) {
            const double f = m(r, c) / m(c, c);
            for (int j = c; j < n; ++j) {
                m(r, j) -= f * m(c, j);
            }
        }
    }
    return det;
}

/// Solve A x = b by Gaussian elimination with partial pivoting. Returns false if
/// A is numerically singular (pivot below `singular_tol` times the largest entry).
inline bool solve_linear(Matrix a, std::vector<double>& b, double singular_tol = 1e-12) {
    const int n = a.size();
    double scale = 0.0;
    for (double v : a.data()) {
        scale = std::max(scale, std::abs(v));
    }
    if (scale == 0.0) {
        return false;
    }
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r) {
            if (std::abs(a(r, c)) > std::abs(a(piv, c))) {
                piv = r;
            }
        }
        if (std::abs(a(piv, c)) <= singular_tol * scale) {
            return false;
        }
        if (piv != c) {
            for (int j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(c, j));
            }
            std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(c)]);
        }
        for (int r = c + 1; r < n; ++r) {
            const double f = a(r, c) / a(c, c);
            for (int j = c; j < n; ++j) {
                a(r, j) -= f * a(c, j);
            }
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(c)];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (int j = r + 1; j < n; ++j) {
            s -= a(r, j) * b[static_cast<std::size_t>(j)];
        }
        b[static_cast<std::size_t>(r)] = s / a(r, r);
    }
    return true;
}

struct SymmetricEigen {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j is the eigenvector of values[j]
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `tol` times the matrix norm.
inline SymmetricEigen symmetric_eigen(Matrix a, double tol = 1e-12, int max_sweeps = 100) {
    const int n = a.size();
    Matrix v = Matrix::identity(n);
    double norm = 0.0;
    for (double x : a.data()) {
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                off += 2.0 * a(i, j) * a(i, j);
            }
        }
        if (std::sqrt(off) <= tol * norm || off == 0.0) {
            break;
        }
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        order[static_cast<std::size_t>(i)] = i;
    }
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
    SymmetricEigen out{std::vector<double>(static_cast<std::size_t>(n)), Matrix(n)};
    for (int j = 0; j < n; ++j) {
        const int src = order[static_cast<std::size_t>(j)];
        out.values[static_cast<std::size_t>(j)] = a(src, src);
        for (int k = 0; k < n; ++k) {
            out.vectors(k, j) = v(k, src);
        }
    }
    return out;
}

/// Largest absolute eigenvalue of a symmetric matrix.
inline double operator_norm_symmetric(const Matrix& a) {
    const auto eig = symmetric_eigen(a);
    double m = 0.0;
    for (double x : eig.values) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Directions and randomness

/// Deterministic RNG: splitmix64. Bit-identical across platforms, unlike the
/// standard distributions.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi].
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1U;
        return lo + static_cast<std::int64_t>(next() % span);
    }

    double normal() {
        // Box-Muller; one draw discarded to stay stateless.
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// `count` deterministic unit vectors in R^d: ±1 for d=1, equally spaced angles
/// for d=2, a Fibonacci lattice for d=3 and seeded normalized Gaussians beyond.
inline std::vector<Vec> unit_directions(int d, int count) {
    detail::require(d >= 1 && count >= 1, "unit_directions: need d >= 1 and count >= 1");
    std::vector<Vec> dirs;
    dirs.reserve(static_cast<std::size_t>(count));
    if (d == 1) {
        for (int i = 0; i < count; ++i) {
            dirs.push_back({i % 2 == 0 ? 1.0 : -1.0});
        }
    } else if (d == 2) {
        for (int i = 0; i < count; ++i) {
            const double t = 2.0 * std::numbers::pi * i / count;
            dirs.push_back({std::cos(t), std::sin(t)});
        }
    } else if (d == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / count;
            const double r = std::sqrt(1.0 - z * z);
            const double phi = golden * i;
            dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
        }
    } else {
        SplitMix64 rng(0x5eedULL + static_cast<std::uint64_t>(d));
        for (int i = 0; i < count; ++i) {
            Vec v(static_cast<std::size_t>(d));
            for (double& x : v) {
                x = rng.normal();
            }
            const double n = norm2(v);
            for (double& x : v) {
                x /= n;
            }
            dirs.push_back(std::move(v));
        }
    }
    return dirs;
}

} // namespace lce

#endif // LCE_NUMERIC_HPP
