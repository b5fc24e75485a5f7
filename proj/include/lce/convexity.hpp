#ifndef LCE_CONVEXITY_HPP
#define LCE_CONVEXITY_HPP

// Minkowski sums, Z^d-convexity of finite sets and log-concave extensibility of p.m.f.s.

#include "lce/lattice.hpp"
#include "lce/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

namespace lce {

enum class Arithmetic { floating, exact };

struct ConvexityReport {
    bool is_convex = true;
    std::vector<IndexVector> witnesses;  // lattice points of conv(A) \ A, lexicographic
};

struct ConvexityOptions {
    Arithmetic arithmetic = Arithmetic::floating;
    std::size_t max_box_cells = std::size_t{1} << 22U;
};

struct ExtensibilityReport {
    bool is_extensible = false;
    bool support_convex = false;
    std::map<IndexVector, double> envelope_gaps;
    double tolerance_used = 0.0;
};

struct ExtensibilityOptions {
    double tol = 1e-9;
    Arithmetic mode = Arithmetic::floating;
    std::size_t max_support = 4096;
    bool one_dim_fast_path = true;
};

inline LatticeSet minkowski_sum(const LatticeSet& a, const LatticeSet& b) {
    detail::require(a.dim() == b.dim(), "minkowski_sum: dimension mismatch");
    std::vector<IndexVector> pts;
    pts.reserve(a.size() * b.size());
    for (const auto& x : a) {
        for (const auto& y : b) {
            pts.push_back(x + y);
        }
    }
    return {a.dim(), std::move(pts)};
}

/// A + ... + A (n copies); n >= 1.
inline LatticeSet minkowski_power(const LatticeSet& a, int n) {
    detail::require(n >= 1, "minkowski_power: n must be >= 1");
    LatticeSet acc = a;
    for (int i = 1; i < n; ++i) {
        acc = minkowski_sum(acc, a);
    }
    return acc;
}

namespace detail {

template <class T>
T convert_scalar(double x) {
    if constexpr (std::is_same_v<T, double>) {
        return x;
    } else {
        return to_rational(x);
    }
}

template <class T>
double to_double(const T& x) {
    if constexpr (std::is_same_v<T, double>) {
        return x;
    } else {
        return x.template convert_to<double>();
    }
}

/// LP over convex weights on `pts`: rows are the d coordinates and the weight sum.
template <class T>
LpResult<T> barycentric_lp(const std::vector<const IndexVector*>& pts, const IndexVector& z,
                           const std::vector<T>& cost) {
    const int d = z.dim();
    std::vector<std::vector<T>> a(static_cast<std::size_t>(d + 1), std::vector<T>(pts.size()));
    std::vector<T> b(static_cast<std::size_t>(d + 1));
    for (std::size_t j = 0; j < pts.size(); ++j) {
        for (int i = 0; i < d; ++i) {
            a[static_cast<std::size_t>(i)][j] = T((*pts[j])[i]);
        }
        a[static_cast<std::size_t>(d)][j] = T(1);
    }
    for (int i = 0; i < d; ++i) {
        b[static_cast<std::size_t>(i)] = T(z[i]);
    }
    b[static_cast<std::size_t>(d)] = T(1);
    return solve_lp<T>(a, b, cost);
}

inline bool hull_contains(const std::vector<const IndexVector*>& pts, const IndexVector& z,
                          Arithmetic arith) {
    if (pts.empty()) {
        return false;
    }
    if (arith == Arithmetic::exact) {
        return barycentric_lp<Rational>(pts, z, std::vector<Rational>(pts.size(), Rational(0))).status !=
               LpStatus::infeasible;
    }
    return barycentric_lp<double>(pts, z, std::vector<double>(pts.size(), 0.0)).status !=
           LpStatus::infeasible;
}

} // namespace detail

/// Is z a convex combination of points of `pts`?
inline bool in_convex_hull(const std::vector<IndexVector>& pts, const IndexVector& z,
                           Arithmetic arith = Arithmetic::floating) {
    std::vector<const IndexVector*> ptr;
    ptr.reserve(pts.size());
    for (const auto& p : pts) {
        detail::require(p.dim() == z.dim(), "in_convex_hull: dimension mismatch");
        ptr.push_back(&p);
    }
    return detail::hull_contains(ptr, z, arith);
}

/// Points of A that are not convex combinations of the other points of A.
inline std::vector<IndexVector> extreme_points(const LatticeSet& a, Arithmetic arith = Arithmetic::floating) {
    std::vector<IndexVector> out;
    const int d = a.dim();
    for (const auto& x : a) {
        // A point whose axis neighbours on both sides lie in A is a midpoint.
        bool interior = true;
        for (int i = 0; i < d && interior; ++i) {
            IndexVector lo = x;
            IndexVector hi = x;
            --lo[i];
            ++hi[i];
            interior = a.contains(lo) && a.contains(hi);
        }
        if (interior) {
            continue;
        }
        std::vector<const IndexVector*> others;
        others.reserve(a.size());
        for (const auto& y : a) {
            if (!(y == x)) {
                others.push_back(&y);
            }
        }
        if (!detail::hull_contains(others, x, arith)) {
            out.push_back(x);
        }
    }
    return out;
}

/// Decide A = conv(A) ∩ Z^d by testing every lattice point of the bounding box
/// of A that is not in A for hull membership.
inline ConvexityReport is_zd_convex(const LatticeSet& a, const ConvexityOptions& opt = {}) {
    detail::require(!a.empty(), "is_zd_convex: empty set");
    const BoxDomain box = a.bounding_box();
    if (box.cell_count() > opt.max_box_cells) {
        throw CapacityExceeded("is_zd_convex: bounding box exceeds cap");
    }
    ConvexityReport rep;
    if (box.cell_count() == a.size()) {
        return rep;
    }
    const auto ext = extreme_points(a, opt.arithmetic);
    std::vector<const IndexVector*> cols;
    cols.reserve(ext.size());
    for (const auto& e : ext) {
        cols.push_back(&e);
    }
    for_each_cell(box, [&](const IndexVector& z, std::size_t) {
        if (!a.contains(z) && detail::hull_contains(cols, z, opt.arithmetic)) {
            rep.witnesses.push_back(z);
        }
    });
    rep.is_convex = rep.witnesses.empty();
    return rep;
}

/// conv(A) ∩ Z^d.
inline LatticeSet convex_closure(const LatticeSet& a, Arithmetic arith = Arithmetic::floating) {
    detail::require(!a.empty(), "convex_closure: empty set");
    auto rep = is_zd_convex(a, {arith});
    std::vector<IndexVector> pts = a.points();
    pts.insert(pts.end(), rep.witnesses.begin(), rep.witnesses.end());
    return {a.dim(), std::move(pts)};
}

/// Convexity reports for A+A, A+A+A, ..., n_max copies (n = 2..n_max).
inline std::vector<ConvexityReport> check_self_sum_convexity(const LatticeSet& a, int n_max,
                                                             const ConvexityOptions& opt = {}) {
    detail::require(n_max >= 2, "check_self_sum_convexity: n_max must be >= 2");
    std::vector<ConvexityReport> out;
    LatticeSet acc = a;
    for (int n = 2; n <= n_max; ++n) {
        acc = minkowski_sum(acc, a);
        out.push_back(is_zd_convex(acc, opt));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Extensibility

namespace detail {

inline std::vector<std::pair<IndexVector, double>> potential(const LatticePmf& p) {
    std::vector<std::pair<IndexVector, double>> out;
    for_each_cell(p.box(), [&](const IndexVector& k, std::size_t off) {
        const double v = p.values()[off];
        if (v > 0.0) {
            const double pot = -std::log(v);
            if (!std::isfinite(pot)) {
                throw NumericalError("extensibility: non-finite potential");
            }
            out.emplace_back(k, pot);
        }
    });
    return out;
}

inline bool support_is_interval_1d(const std::vector<std::pair<IndexVector, double>>& pts) {
    return pts.back().first[0] - pts.front().first[0] + 1 == static_cast<std::int64_t>(pts.size());
}

template <class T>
std::map<IndexVector, double> lp_gaps(const std::vector<std::pair<IndexVector, double>>& pts) {
    std::map<IndexVector, double> gaps;
    std::vector<T> pot(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pot[i] = convert_scalar<T>(pts[i].second);
    }
    std::vector<const IndexVector*> cols;
    std::vector<T> cost;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        cols.clear();
        cost.clear();
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (j != k) {
                cols.push_back(&pts[j].first);
                cost.push_back(pot[j]);
            }
        }
        double gap = 0.0;
        if (!cols.empty()) {
            const auto res = barycentric_lp<T>(cols, pts[k].first, cost);
            if (res.status == LpStatus::optimal) {
                const T diff = pot[k] - res.objective;
                gap = std::max(0.0, to_double<T>(diff));
            }
        }
        gaps[pts[k].first] = gap;
    }
    return gaps;
}

} // namespace detail

/// Envelope gaps in d = 1 from the lower convex hull of {(k, V(k))}.
inline std::map<IndexVector, double> envelope_gaps_1d(const LatticePmf& p) {
    detail::require(p.dim() == 1, "envelope_gaps_1d: d must be 1");
    const auto pts = detail::potential(p);
    detail::require(!pts.empty(), "envelope_gaps_1d: empty support");
    // Monotone chain lower hull; points arrive sorted by k.
    std::vector<std::size_t> hull;
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        const double ax = static_cast<double>(pts[a].first[0] - pts[o].first[0]);
        const double ay = pts[a].second - pts[o].second;
        const double bx = static_cast<double>(pts[b].first[0] - pts[o].first[0]);
        const double by = pts[b].second - pts[o].second;
        return ax * by - ay * bx;
    };
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), i) <= 0.0) {
            hull.pop_back();
        }
        hull.push_back(i);
    }
    std::map<IndexVector, double> gaps;
    std::size_t seg = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (seg + 1 < hull.size() && hull[seg + 1] < i) {
            ++seg;
        }
        double gap = 0.0;
        if (std::find(hull.begin(), hull.end(), i) == hull.end()) {
            const auto& a = pts[hull[seg]];
            const auto& b = pts[hull[seg + 1]];
            const double t = static_cast<double>(pts[i].first[0] - a.first[0]) /
                             static_cast<double>(b.first[0] - a.first[0]);
            const double env = a.second + t * (b.second - a.second);
            gap = std::max(0.0, pts[i].second - env);
        }
        gaps[pts[i].first] = gap;
    }
    return gaps;
}

/// Classical one-dimensional test: interval support and p(k)^2 >= p(k-1) p(k+1).
/// `tol` is in log-mass units.
inline bool classical_log_concave_1d(const LatticePmf& p, double tol = 0.0) {
    detail::require(p.dim() == 1, "classical_log_concave_1d: d must be 1");
    const auto pts = detail::potential(p);
    detail::require(!pts.empty(), "classical_log_concave_1d: empty support");
    if (!detail::support_is_interval_1d(pts)) {
        return false;
    }
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        if (2.0 * pts[i].second > pts[i - 1].second + pts[i + 1].second + 2.0 * tol) {
            return false;
        }
    }
    return true;
}

/// Envelope gaps from the linear program, in any dimension.
inline std::map<IndexVector, double> envelope_gaps_lp(const LatticePmf& p, Arithmetic mode = Arithmetic::floating,
                                                      std::size_t max_support = 4096) {
    const auto pts = detail::potential(p);
    detail::require(!pts.empty(), "envelope_gaps_lp: empty support");
    if (pts.size() > max_support) {
        throw CapacityExceeded("extensibility: support exceeds LP budget");
    }
    return mode == Arithmetic::exact ? detail::lp_gaps<Rational>(pts) : detail::lp_gaps<double>(pts);
}

/// Brute force: for every k, minimum of sum lambda_j V(x_j) over affinely independent
/// subsets of at most d+1 other support points that contain k in their hull.
inline std::map<IndexVector, double> envelope_gaps_caratheodory(const LatticePmf& p, std::size_t cap = 16) {
    const auto pts = detail::potential(p);
    detail::require(!pts.empty(), "envelope_gaps_caratheodory: empty support");
    if (pts.size() > cap) {
        throw CapacityExceeded("caratheodory oracle: support exceeds cap");
    }
    const int d = p.dim();
    std::map<IndexVector, double> gaps;
    std::vector<std::size_t> subset;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        double best = std::numeric_limits<double>::infinity();
        const IndexVector& z = pts[k].first;
        std::function<void(std::size_t)> rec = [&](std::size_t start) {
            if (!subset.empty()) {
                const int s = static_cast<int>(subset.size());
                // Normal equations of [x_j; 1] lambda = [z; 1].
                Matrix ata(s);
                std::vector<double> atb(static_cast<std::size_t>(s));
                auto col = [&](int j, int r) {
                    return r < d ? static_cast<double>(pts[subset[static_cast<std::size_t>(j)]].first[r]) : 1.0;
                };
                auto rhs = [&](int r) { return r < d ? static_cast<double>(z[r]) : 1.0; };
                for (int i = 0; i < s; ++i) {
                    for (int j = 0; j < s; ++j) {
                        double acc = 0.0;
                        for (int r = 0; r <= d; ++r) {
                            acc += col(i, r) * col(j, r);
                        }
                        ata(i, j) = acc;
                    }
                    double acc = 0.0;
                    for (int r = 0; r <= d; ++r) {
                        acc += col(i, r) * rhs(r);
                    }
                    atb[static_cast<std::size_t>(i)] = acc;
                }
                if (solve_linear(ata, atb, 1e-10)) {
                    bool ok = true;
                    for (int r = 0; r <= d && ok; ++r) {
                        double acc = 0.0;
                        for (int j = 0; j < s; ++j) {
                            acc += col(j, r) * atb[static_cast<std::size_t>(j)];
                        }
                        ok = std::abs(acc - rhs(r)) <= 1e-9;
                    }
                    for (int j = 0; j < s && ok; ++j) {
                        ok = atb[static_cast<std::size_t>(j)] >= -1e-12;
                    }
                    if (ok) {
                        double val = 0.0;
                        for (int j = 0; j < s; ++j) {
                            val += std::max(0.0, atb[static_cast<std::size_t>(j)]) *
                                   pts[subset[static_cast<std::size_t>(j)]].second;
                        }
                        best = std::min(best, val);
                    }
                }
            }
            if (static_cast<int>(subset.size()) == d + 1) {
                return;
            }
            for (std::size_t j = start; j < pts.size(); ++j) {
                if (j == k) {
                    continue;
                }
                subset.push_back(j);
                rec(j + 1);
                subset.pop_back();
            }
        };
        rec(0);
        gaps[z] = std::isfinite(best) ? std::max(0.0, pts[k].second - best) : 0.0;
    }
    return gaps;
}

/// Extensible iff the support is Z^d-convex and -log p agrees with its lower
/// convex envelope on the support within `tol`.
inline ExtensibilityReport is_log_concave_extensible(const LatticePmf& p, const ExtensibilityOptions& opt = {}) {
    const LatticeSet support = p.support();
    detail::require(!support.empty(), "is_log_concave_extensible: empty support");
    ExtensibilityReport rep;
    rep.tolerance_used = opt.tol;
    if (p.dim() == 1 && opt.one_dim_fast_path && opt.mode == Arithmetic::floating) {
        const auto pts = detail::potential(p);
        rep.support_convex = detail::support_is_interval_1d(pts);
        rep.envelope_gaps = envelope_gaps_1d(p);
    } else {
        rep.support_convex = is_zd_convex(support, {opt.mode}).is_convex;
        rep.envelope_gaps = envelope_gaps_lp(p, opt.mode, opt.max_support);
    }
    bool within = true;
    for (const auto& [k, g] : rep.envelope_gaps) {
        within = within && g <= opt.tol;
    }
    rep.is_extensible = rep.support_convex && within;
    return rep;
}

} // namespace lce

#endif // LCE_CONVEXITY_HPP
