#ifndef LCE_SMOOTHING_HPP
#define LCE_SMOOTHING_HPP

// Densities of S + U_1 + ... + U_n (tensor cardinal B-spline smoothing of a
// lattice p.m.f.), their differential entropy and the per-cell deviation from p.

#include "lce/lattice.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace lce {

/// Cardinal B-spline of order n (density of a sum of n uniforms on [0,1)),
/// supported on [0, n].
inline double bspline_eval(int n, double x) {
    detail::require(n >= 1, "bspline_eval: n must be >= 1");
    if (!(x >= 0.0 && x <= n)) {
        return 0.0;
    }
    // b[j] holds B_k(x - j).
    std::vector<double> b(static_cast<std::size_t>(n) + 1, 0.0);
    for (int j = 0; j < n; ++j) {
        const double t = x - j;
        b[static_cast<std::size_t>(j)] = (t >= 0.0 && t < 1.0) ? 1.0 : 0.0;
    }
    for (int k = 2; k <= n; ++k) {
        for (int j = 0; j <= n - k; ++j) {
            const double t = x - j;
            b[static_cast<std::size_t>(j)] =
                (t * b[static_cast<std::size_t>(j)] + (k - t) * b[static_cast<std::size_t>(j + 1)]) / (k - 1);
        }
    }
    return b[0];
}

/// f_n(x) = sum_s p(s) prod_i B_n(x_i - s_i).
inline double smoothed_density_eval(const LatticePmf& p, int n, std::span<const double> x) {
    detail::require(n >= 1, "smoothed_density_eval: n must be >= 1");
    const int d = p.dim();
    detail::require(static_cast<int>(x.size()) == d, "smoothed_density_eval: dimension mismatch");
    IndexVector k(static_cast<std::size_t>(d));
    IndexVector lo(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        k[i] = static_cast<std::int64_t>(std::floor(x[static_cast<std::size_t>(i)]));
        lo[i] = k[i] - (n - 1);
    }
    CompensatedSum s;
    for_each_cell(BoxDomain(lo, k), [&](const IndexVector& src, std::size_t) {
        const double m = p.at(src);
        if (m == 0.0) {
            return;
        }
        double w = m;
        for (int i = 0; i < d; ++i) {
            w *= bspline_eval(n, x[static_cast<std::size_t>(i)] - static_cast<double>(src[i]));
        }
        s.add(w);
    });
    return s.value();
}

inline double smoothed_density_eval(const LatticePmf& p, int n, std::initializer_list<double> x) {
    return smoothed_density_eval(p, n, std::span<const double>(x.begin(), x.size()));
}

/// Cells k whose unit cube k + [0,1)^d meets the support of f_n.
inline BoxDomain smoothed_cell_box(const LatticePmf& p, int n) {
    IndexVector hi = p.box().hi();
    for (int i = 0; i < p.dim(); ++i) {
        hi[i] += n - 1;
    }
    return {p.box().lo(), hi};
}

namespace detail {

/// Masses p(k - s) for s in {0..n-1}^d, row-major in s.
inline void gather_stencil(const LatticePmf& p, int n, const IndexVector& k, std::vector<double>& out, double& total) {
    const int d = p.dim();
    IndexVector lo(static_cast<std::size_t>(d), 0);
    IndexVector hi(static_cast<std::size_t>(d), n - 1);
    const BoxDomain sbox(lo, hi);
    out.assign(sbox.cell_count(), 0.0);
    total = 0.0;
    for_each_cell(sbox, [&](const IndexVector& s, std::size_t off) {
        const double m = p.at(k - s);
        out[off] = m;
        total += m;
    });
}

/// Values of f_n at the tensor nodes of one cell. `kernel[s * q + j]` = B_n(node_j + s).
inline void cell_values(const std::vector<double>& stencil, int d, int n, int q, const std::vector<double>& kernel,
                        std::vector<double>& work, std::vector<double>& out) {
    // Contract one stencil axis at a time into a node axis.
    out = stencil;
    std::vector<int> shape(static_cast<std::size_t>(d), n);
    for (int a = 0; a < d; ++a) {
        std::size_t outer = 1;
        for (int i = 0; i < a; ++i) {
            outer *= static_cast<std::size_t>(shape[static_cast<std::size_t>(i)]);
        }
        std::size_t inner = 1;
        for (int i = a + 1; i < d; ++i) {
            inner *= static_cast<std::size_t>(shape[static_cast<std::size_t>(i)]);
        }
        work.assign(outer * static_cast<std::size_t>(q) * inner, 0.0);
        for (std::size_t o = 0; o < outer; ++o) {
            for (int s = 0; s < n; ++s) {
                const double* src = out.data() + (o * static_cast<std::size_t>(n) + static_cast<std::size_t>(s)) * inner;
                for (int j = 0; j < q; ++j) {
                    const double kv = kernel[static_cast<std::size_t>(s * q + j)];
                    if (kv == 0.0) {
                        continue;
                    }
                    double* dst = work.data() + (o * static_cast<std::size_t>(q) + static_cast<std::size_t>(j)) * inner;
                    for (std::size_t i = 0; i < inner; ++i) {
                        dst[i] += kv * src[i];
                    }
                }
            }
        }
        out.swap(work);
        shape[static_cast<std::size_t>(a)] = q;
    }
}

struct CellRule {
    int q = 0;
    std::vector<double> kernel;   // n x q
    std::vector<double> weights;  // tensor weights, q^d
};

inline CellRule make_cell_rule(int n, int q, int d) {
    const auto& rule = gauss_legendre(q);
    CellRule r;
    r.q = q;
    r.kernel.resize(static_cast<std::size_t>(n * q));
    for (int s = 0; s < n; ++s) {
        for (int j = 0; j < q; ++j) {
            r.kernel[static_cast<std::size_t>(s * q + j)] = bspline_eval(n, rule.nodes[static_cast<std::size_t>(j)] + s);
        }
    }
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) {
        total *= static_cast<std::size_t>(q);
    }
    r.weights.assign(total, 1.0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        double w = 1.0;
        for (int i = 0; i < d; ++i) {
            w *= rule.weights[rem % static_cast<std::size_t>(q)];
            rem /= static_cast<std::size_t>(q);
        }
        r.weights[idx] = w;
    }
    return r;
}

} // namespace detail

struct EntropyOptions {
    int initial_order = 8;
    int max_order = 1024;
    double tol = 1e-8;
    double skip_mass = 1e-300;  // cells whose stencil mass is below this are bounded, not integrated
};

struct DifferentialEntropyResult {
    double value = 0.0;        // nats
    double tail_bound = 0.0;   // upper bound on the skipped cells' contribution
    double mass = 0.0;         // integral of f_n by the same quadrature
    int max_order_used = 0;
    std::size_t cells = 0;
    std::size_t skipped_cells = 0;
};

/// -int f_n log f_n, cell by cell with tensor Gauss-Legendre. Each cell doubles its
/// order until two successive values differ by less than tol/2 times (cell mass +
/// 1/cell count), so the accumulated refinement change stays below tol.
inline DifferentialEntropyResult differential_entropy_report(const LatticePmf& p, int n, const EntropyOptions& opt = {}) {
    detail::require(n >= 1, "differential_entropy: n must be >= 1");
    detail::require(opt.initial_order >= 1 && opt.tol > 0.0, "differential_entropy: invalid options");
    const int d = p.dim();
    // Keep q^d below ~2^20 points per cell.
    const int order_cap = std::max(1, std::min(opt.max_order, static_cast<int>(std::pow(2.0, 20.0 / d))));
    std::vector<detail::CellRule> rules;
    auto rule_for = [&](int level) -> const detail::CellRule& {
        while (static_cast<int>(rules.size()) <= level) {
            const int q = opt.initial_order << rules.size();
            rules.push_back(detail::make_cell_rule(n, q, d));
        }
        return rules[static_cast<std::size_t>(level)];
    };

    DifferentialEntropyResult res;
    CompensatedSum total;
    CompensatedSum mass;
    CompensatedSum tail;
    std::vector<double> stencil;
    std::vector<double> work;
    std::vector<double> values;
    auto integrate = [&](const detail::CellRule& r, double& cell_mass) {
        detail::cell_values(stencil, d, n, r.q, r.kernel, work, values);
        CompensatedSum h;
        CompensatedSum m;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double v = values[i];
            if (v > 0.0) {
                h.add(-r.weights[i] * v * std::log(v));
                m.add(r.weights[i] * v);
            }
        }
        cell_mass = m.value();
        return h.value();
    };

    const BoxDomain cells = smoothed_cell_box(p, n);
    const double per_cell_floor = 1.0 / static_cast<double>(cells.cell_count());
    for_each_cell(cells, [&](const IndexVector& k, std::size_t) {
        ++res.cells;
        double stencil_mass = 0.0;
        detail::gather_stencil(p, n, k, stencil, stencil_mass);
        if (stencil_mass < opt.skip_mass) {
            ++res.skipped_cells;
            if (stencil_mass > 0.0) {
                tail.add(-stencil_mass * std::log(stencil_mass));
            }
            return;
        }
        int level = 0;
        double cell_mass = 0.0;
        double prev = integrate(rule_for(0), cell_mass);
        if (n == 1) {  // piecewise constant: every rule is exact
            total.add(prev);
            mass.add(cell_mass);
            res.max_order_used = std::max(res.max_order_used, opt.initial_order);
            return;
        }
        while (true) {
            if ((opt.initial_order << (level + 1)) > order_cap) {
                throw NumericalError("differential_entropy: refinement budget exhausted");
            }
            ++level;
            const double cur = integrate(rule_for(level), cell_mass);
            if (std::abs(cur - prev) <= 0.5 * opt.tol * (cell_mass + per_cell_floor)) {
                total.add(cur);
                mass.add(cell_mass);
                res.max_order_used = std::max(res.max_order_used, opt.initial_order << level);
                break;
            }
            prev = cur;
        }
    });
    res.value = total.value();
    res.mass = mass.value();
    res.tail_bound = tail.value();
    return res;
}

inline double differential_entropy(const LatticePmf& p, int n, const EntropyOptions& opt = {}) {
    return differential_entropy_report(p, n, opt).value;
}

struct CellDeviationReport {
    std::vector<std::pair<IndexVector, double>> per_cell;  // sup |f_n - p(k)| on k + [0,1)^d
    double total = 0.0;
    bool exact = true;  // false: per-cell values are certified upper bounds
};

/// Per-cell sup of |f_n(x) - p(k)|. Exact for n <= 2 (f_2 is multilinear on each
/// cell); for n >= 3 the maximum over a grid plus a Lipschitz pad.
inline CellDeviationReport cell_deviation(const LatticePmf& p, int n, int grid = 8) {
    detail::require(n >= 1, "cell_deviation: n must be >= 1");
    detail::require(grid >= 1, "cell_deviation: grid must be >= 1");
    const int d = p.dim();
    CellDeviationReport rep;
    CompensatedSum total;
    if (n == 1) {
        for_each_cell(p.box(), [&](const IndexVector& k, std::size_t) { rep.per_cell.emplace_back(k, 0.0); });
        return rep;
    }
    const int g = (n == 2) ? 1 : grid;
    rep.exact = (n == 2);
    IndexVector zero(static_cast<std::size_t>(d), 0);
    IndexVector top(static_cast<std::size_t>(d), g);
    const BoxDomain nodes(zero, top);
    std::vector<double> stencil;
    Vec x(static_cast<std::size_t>(d));
    for_each_cell(smoothed_cell_box(p, n), [&](const IndexVector& k, std::size_t) {
        double smass = 0.0;
        detail::gather_stencil(p, n, k, stencil, smass);
        const double pk = p.at(k);
        double sup = 0.0;
        for_each_cell(nodes, [&](const IndexVector& t, std::size_t) {
            for (int i = 0; i < d; ++i) {
                x[static_cast<std::size_t>(i)] = static_cast<double>(k[i]) + static_cast<double>(t[i]) / g;
            }
            double f = 0.0;
            if (n == 2) {
                // Corner values of f_2: at integer m, f_2(m) = p(m - 1).
                IndexVector m = k;
                for (int i = 0; i < d; ++i) {
                    m[i] += t[i] - 1;
                }
                f = p.at(m);
            } else {
                // Evaluate on the closed cell: nodes on the upper face are limits from inside.
                f = 0.0;
                for (int i = 0; i < d; ++i) {
                    if (t[i] == g) {
                        x[static_cast<std::size_t>(i)] = std::nextafter(x[static_cast<std::size_t>(i)], -INFINITY);
                    }
                }
                f = smoothed_density_eval(p, n, x);
            }
            sup = std::max(sup, std::abs(f - pk));
        });
        if (n >= 3) {
            // |d f_n / d x_i| <= stencil mass since |B_n'| <= max B_(n-1) <= 1.
            sup += d * smass * (1.0 / g) * 0.5;
        }
        rep.per_cell.emplace_back(k, sup);
        total.add(sup);
    });
    rep.total = total.value();
    return rep;
}

/// (2 mu / M) log(1/mu) + |b - a| log(e D / mu).
inline double elementary_estimate(double a, double b, double mu, double big_d, double big_m) {
    detail::require(big_d >= 1.0 && big_m >= 1.0, "elementary_estimate: need D, M >= 1");
    detail::require(a >= 0.0 && b >= 0.0 && a <= big_d / big_m && b <= big_d / big_m,
                    "elementary_estimate: need 0 <= a, b <= D/M");
    detail::require(mu > 0.0 && mu < 1.0 / std::numbers::e, "elementary_estimate: need 0 < mu < 1/e");
    return (2.0 * mu / big_m) * std::log(1.0 / mu) + std::abs(b - a) * std::log(std::numbers::e * big_d / mu);
}

/// G(x) = -x log x - x log M, with G(0) = 0.
inline double elementary_g(double x, double big_m) {
    return x > 0.0 ? -x * std::log(x) - x * std::log(big_m) : 0.0;
}

} // namespace lce

#endif // LCE_SMOOTHING_HPP
