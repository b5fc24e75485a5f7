#ifndef LCE_BRIDGE_HPP
#define LCE_BRIDGE_HPP

// Lattice sums against integrals for continuous log-concave densities.

#include "lce/density.hpp"
#include "lce/geometry.hpp"
#include "lce/moments.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace lce {

struct GapReport {
    double sigma = 0.0;
    double lattice_mass = 0.0;           // sum of f(k) over the box
    double mass_gap = 0.0;               // sum f(k) - int f
    Vec mean_gap;                        // sum k_i f(k) - int x_i f
    Vec second_moment_gap;               // sum k_i^2 f(k) - int x_i^2 f
    std::vector<double> cross_moment;    // pairs i < j in row order: sum k_i k_j f(k) - int x_i x_j f
    double det_gap = 0.0;                // det Cov_Z - det Cov_R
    Matrix cov_lattice;
    Matrix cov_continuous;
};

/// Integral, first and second moments of f from the declared closed forms or,
/// when one is missing, from tensor Gauss-Legendre quadrature.
struct ContinuousMoments {
    double mass = 0.0;
    Vec first;      // int x_i f
    Matrix second;  // int x_i x_j f
};

struct QuadratureBudget {
    int panels_per_axis = 0;  // 0 disables quadrature
    int order = 20;
};

inline ContinuousMoments continuous_moments_quadrature(const ContinuousDensity& f, const QuadratureBudget& budget) {
    detail::require(budget.panels_per_axis > 0, "continuous moments: no quadrature budget");
    detail::require(f.tail.has_value(), "continuous moments: quadrature needs a tail bound");
    detail::require(f.dim >= 1 && f.dim <= 3, "continuous moments: quadrature supports d <= 3");
    const int d = f.dim;
    const double half = f.tail->radius + 45.0 / f.tail->rate;
    const double width = 2.0 * half / budget.panels_per_axis;
    const auto& rule = gauss_legendre(budget.order);
    const int q = rule.order();
    const long per_axis = static_cast<long>(budget.panels_per_axis) * q;
    std::vector<double> nodes(static_cast<std::size_t>(per_axis));
    std::vector<double> weights(static_cast<std::size_t>(per_axis));
    for (int p = 0; p < budget.panels_per_axis; ++p) {
        for (int i = 0; i < q; ++i) {
            const auto idx = static_cast<std::size_t>(p * q + i);
            nodes[idx] = -half + width * (p + rule.nodes[static_cast<std::size_t>(i)]);
            weights[idx] = width * rule.weights[static_cast<std::size_t>(i)];
        }
    }
    CompensatedSum mass;
    std::vector<CompensatedSum> first(static_cast<std::size_t>(d));
    std::vector<CompensatedSum> second(static_cast<std::size_t>(d * d));
    std::vector<long> it(static_cast<std::size_t>(d), 0);
    Vec x(static_cast<std::size_t>(d));
    while (true) {
        double w = 1.0;
        for (int a = 0; a < d; ++a) {
            x[static_cast<std::size_t>(a)] = nodes[static_cast<std::size_t>(it[static_cast<std::size_t>(a)])];
            w *= weights[static_cast<std::size_t>(it[static_cast<std::size_t>(a)])];
        }
        const double v = w * f(x);
        mass.add(v);
        for (int a = 0; a < d; ++a) {
            first[static_cast<std::size_t>(a)].add(v * x[static_cast<std::size_t>(a)]);
            for (int b = 0; b < d; ++b) {
                second[static_cast<std::size_t>(a * d + b)].add(v * x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(b)]);
            }
        }
        int a = d - 1;
        while (a >= 0 && ++it[static_cast<std::size_t>(a)] == per_axis) {
            it[static_cast<std::size_t>(a)] = 0;
            --a;
        }
        if (a < 0) {
            break;
        }
    }
    ContinuousMoments m;
    m.mass = mass.value();
    m.first.resize(static_cast<std::size_t>(d));
    m.second = Matrix(d);
    for (int a = 0; a < d; ++a) {
        m.first[static_cast<std::size_t>(a)] = first[static_cast<std::size_t>(a)].value();
        for (int b = 0; b < d; ++b) {
            m.second(a, b) = second[static_cast<std::size_t>(a * d + b)].value();
        }
    }
    return m;
}

inline ContinuousMoments continuous_moments(const ContinuousDensity& f, const QuadratureBudget& budget = {}) {
    if (!(f.known_mass && f.known_mean && f.known_cov)) {
        if (budget.panels_per_axis <= 0) {
            throw InvalidArgument("continuous moments: density has no known moments and no quadrature budget");
        }
        return continuous_moments_quadrature(f, budget);
    }
    const int d = f.dim;
    ContinuousMoments m;
    m.mass = *f.known_mass;
    m.first.resize(static_cast<std::size_t>(d));
    m.second = Matrix(d);
    for (int a = 0; a < d; ++a) {
        const double mu_a = (*f.known_mean)[static_cast<std::size_t>(a)];
        m.first[static_cast<std::size_t>(a)] = m.mass * mu_a;
        for (int b = 0; b < d; ++b) {
            m.second(a, b) = m.mass * ((*f.known_cov)(a, b) + mu_a * (*f.known_mean)[static_cast<std::size_t>(b)]);
        }
    }
    return m;
}

namespace detail {

inline Matrix covariance_from(double mass, const Vec& first, const Matrix& second) {
    const int d = second.size();
    Matrix c(d);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            c(a, b) = second(a, b) / mass - (first[static_cast<std::size_t>(a)] / mass) * (first[static_cast<std::size_t>(b)] / mass);
        }
    }
    return c;
}

} // namespace detail

/// Sums of f(k), k_i f(k), k_i k_j f(k) over `box` against the corresponding integrals.
inline GapReport lattice_vs_integral_gaps(const ContinuousDensity& f, const BoxDomain& box,
                                          const QuadratureBudget& budget = {}) {
    detail::require(box.dim() == f.dim, "lattice_vs_integral_gaps: dimension mismatch");
    const int d = f.dim;
    const auto ud = static_cast<std::size_t>(d);
    const ContinuousMoments cont = continuous_moments(f, budget);

    CompensatedSum mass;
    std::vector<CompensatedSum> second(ud * ud);
    std::vector<double> values(box.cell_count());
    for_each_cell(box, [&](const IndexVector& k, std::size_t off) {
        const auto x = k.as_real();
        const double v = f(x);
        values[off] = v;
        mass.add(v);
        for (std::size_t a = 0; a < ud; ++a) {
            for (std::size_t b = 0; b < ud; ++b) {
                second[a * ud + b].add(v * x[a] * x[b]);
            }
        }
    });
    // Positive and negative parts, the latter in mirrored cell order: exactly zero for
    // even f on a symmetric box.
    std::vector<CompensatedSum> pos(ud);
    std::vector<CompensatedSum> neg(ud);
    const std::size_t cells = box.cell_count();
    for (std::size_t i = 0; i < cells; ++i) {
        const IndexVector kp = box.point(i);
        const IndexVector kn = box.point(cells - 1 - i);
        for (std::size_t a = 0; a < ud; ++a) {
            const auto ia = static_cast<int>(a);
            if (kp[ia] > 0) {
                pos[a].add(values[i] * static_cast<double>(kp[ia]));
            }
            if (kn[ia] < 0) {
                neg[a].add(values[cells - 1 - i] * static_cast<double>(-kn[ia]));
            }
        }
    }
    GapReport r;
    r.sigma = f.scale;
    r.lattice_mass = mass.value();
    r.mass_gap = r.lattice_mass - cont.mass;
    Vec lat_first(ud);
    Matrix lat_second(d);
    for (std::size_t a = 0; a < ud; ++a) {
        lat_first[a] = pos[a].value() - neg[a].value();
        for (std::size_t b = 0; b < ud; ++b) {
            lat_second(static_cast<int>(a), static_cast<int>(b)) = second[a * ud + b].value();
        }
    }
    for (int a = 0; a < d; ++a) {
        r.mean_gap.push_back(lat_first[static_cast<std::size_t>(a)] - cont.first[static_cast<std::size_t>(a)]);
        r.second_moment_gap.push_back(lat_second(a, a) - cont.second(a, a));
        for (int b = a + 1; b < d; ++b) {
            r.cross_moment.push_back(lat_second(a, b) - cont.second(a, b));
        }
    }
    r.cov_lattice = detail::covariance_from(r.lattice_mass, lat_first, lat_second);
    r.cov_continuous = detail::covariance_from(cont.mass, cont.first, cont.second);
    r.det_gap = determinant(r.cov_lattice) - determinant(r.cov_continuous);
    return r;
}

namespace detail {

inline double max_of_1d(const ContinuousDensity& f) {
    if (f.known_max) {
        return *f.known_max;
    }
    detail::require(f.tail.has_value(), "max_of_1d: need a tail bound or a known maximum");
    const double half = f.tail->radius + 10.0 / f.tail->rate;
    double best = 0.0;
    const int n = 200000;
    for (int i = 0; i <= n; ++i) {
        const double x = -half + 2.0 * half * i / n;
        best = std::max(best, f({x}));
    }
    return best;
}

} // namespace detail

struct QuasiConcaveCheck {
    double gap = 0.0;    // |int f - sum f|
    double max_f = 0.0;
    bool holds = false;
};

/// d = 1: |int f - sum_k f(k)| <= max f for quasi-concave f.
inline QuasiConcaveCheck quasi_concave_check_1d(const ContinuousDensity& f, const BoxDomain& box,
                                                const QuadratureBudget& budget = {}) {
    detail::require(f.dim == 1, "quasi_concave_check_1d: d must be 1");
    const auto g = lattice_vs_integral_gaps(f, box, budget);
    QuasiConcaveCheck c;
    c.gap = std::abs(g.mass_gap);
    c.max_f = detail::max_of_1d(f);
    c.holds = c.gap <= c.max_f;
    return c;
}

struct FirstMomentCheck {
    double lhs = 0.0;  // |int x f - sum k f(k)|
    double rhs = 0.0;  // (e + 1) sum f(k)
    bool holds = false;
};

/// d = 1 first-moment bound with constant e + 1.
inline FirstMomentCheck first_moment_check_1d(const ContinuousDensity& f, const BoxDomain& box,
                                              const QuadratureBudget& budget = {}) {
    detail::require(f.dim == 1, "first_moment_check_1d: d must be 1");
    const auto g = lattice_vs_integral_gaps(f, box, budget);
    FirstMomentCheck c;
    c.lhs = std::abs(g.mean_gap[0]);
    c.rhs = (std::numbers::e + 1.0) * g.lattice_mass;
    c.holds = c.lhs <= c.rhs;
    return c;
}

/// #(K ∩ Z^d) / |K|.
inline double lattice_count_ratio(const ConvexBody& k, std::size_t max_cells = std::size_t{1} << 26U) {
    const auto [lo, hi] = k.bounding_box();
    const int d = k.dim();
    IndexVector ilo(static_cast<std::size_t>(d));
    IndexVector ihi(static_cast<std::size_t>(d));
    double cells = 1.0;
    for (int i = 0; i < d; ++i) {
        ilo[i] = static_cast<std::int64_t>(std::floor(lo[static_cast<std::size_t>(i)]));
        ihi[i] = static_cast<std::int64_t>(std::ceil(hi[static_cast<std::size_t>(i)]));
        cells *= static_cast<double>(ihi[i] - ilo[i] + 1);
    }
    if (cells > static_cast<double>(max_cells)) {
        throw CapacityExceeded("lattice_count_ratio: bounding box too large");
    }
    std::size_t count = 0;
    for_each_cell(BoxDomain(ilo, ihi), [&](const IndexVector& z, std::size_t) {
        if (k.contains(z.as_real(), 1e-12)) {
            ++count;
        }
    });
    return static_cast<double>(count) / k.volume();
}

struct ConcentrationReport {
    bool passed = true;
    double worst_ratio = 0.0;   // max of f(x) / (f(0) 2^(-|x| f(0)^(1/d) / c_d))
    double threshold = 0.0;     // c_d / f(0)^(1/d)
    Vec worst_point;
    std::size_t evaluations = 0;
};

/// f(x) <= f(0) 2^(-|x| f(0)^(1/d) / c_d) on `rays` directions times `samples_per_ray`
/// radii starting at the threshold radius c_d / f(0)^(1/d).
inline ConcentrationReport concentration_check(const ContinuousDensity& f, double c_d, int rays, int samples_per_ray) {
    detail::require(c_d > 0.0, "concentration_check: c_d must be positive");
    detail::require(rays >= 1 && samples_per_ray >= 1, "concentration_check: need rays and samples");
    const int d = f.dim;
    const Vec zero(static_cast<std::size_t>(d), 0.0);
    const double f0 = f(zero);
    if (!(f0 > 0.0)) {
        throw InvalidArgument("concentration_check: f(0) must be positive");
    }
    const double root = std::pow(f0, 1.0 / d);
    ConcentrationReport rep;
    rep.threshold = c_d / root;
    const double span = std::max(8.0 * f.scale, rep.threshold);
    for (const auto& u : unit_directions(d, rays)) {
        for (int s = 0; s < samples_per_ray; ++s) {
            const double r = rep.threshold + span * s / std::max(1, samples_per_ray - 1);
            Vec x(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) {
                x[i] = r * u[i];
            }
            const double bound = f0 * std::exp2(-r * root / c_d);
            const double ratio = f(x) / bound;
            ++rep.evaluations;
            if (ratio > rep.worst_ratio) {
                rep.worst_ratio = ratio;
                rep.worst_point = x;
            }
        }
    }
    rep.passed = rep.worst_ratio <= 1.0;
    return rep;
}

struct ArgmaxProfile {
    double integral_value = 0.0;  // int x n_max(x) max_y f(x, y) dx
    double lattice_value = 0.0;   // sum_k k n_max(k) max_y f(k, y)
};

namespace detail {

/// Golden-section maximisation of y -> f(x, y) for unimodal slices.
inline double slice_argmax_search(const ContinuousDensity& f, double x, double half) {
    auto g = [&](double y) { return f({x, y}); };
    double a = -half;
    double b = half;
    // Bracket check on a coarse grid; the maximiser must not sit on the boundary.
    const int n = 64;
    int best = 0;
    double bestv = -1.0;
    for (int i = 0; i <= n; ++i) {
        const double v = g(a + (b - a) * i / n);
        if (v > bestv) {
            bestv = v;
            best = i;
        }
    }
    if (bestv > 0.0 && (best == 0 || best == n)) {
        throw NumericalError("argmax_profile_moment: slice maximum not bracketed");
    }
    if (bestv <= 0.0) {
        return 0.0;
    }
    double lo = a + (b - a) * std::max(0, best - 1) / n;
    double hi = a + (b - a) * std::min(n, best + 1) / n;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - phi * (hi - lo);
    double e = lo + phi * (hi - lo);
    double gc = g(c);
    double ge = g(e);
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++it) {
        if (gc >= ge) {  // ties move left: infimum of the maximiser set
            hi = e;
            e = c;
            ge = gc;
            c = hi - phi * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = e;
            gc = ge;
            e = lo + phi * (hi - lo);
            ge = g(e);
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// d = 2: the x n_max(x) max_y f(x,y) moment, as an integral and as a lattice sum.
inline ArgmaxProfile argmax_profile_moment(const ContinuousDensity& f) {
    detail::require(f.dim == 2, "argmax_profile_moment: d must be 2");
    detail::require(f.tail.has_value(), "argmax_profile_moment: need a tail bound");
    const double half = f.tail->radius + 45.0 / f.tail->rate;
    auto nmax = [&](double x) {
        return f.slice_argmax ? f.slice_argmax(x) : detail::slice_argmax_search(f, x, half);
    };
    auto h = [&](double x) {
        const double y = nmax(x);
        return x * y * f({x, y});
    };
    ArgmaxProfile p;
    if (f.slice_argmax) {
        p.integral_value =
            integrate_adaptive(h, -half, 0.0, 1e-300, 1e-11) + integrate_adaptive(h, 0.0, half, 1e-300, 1e-11);
    } else {
        // Searched maximisers carry ~1e-8 relative noise; a fixed composite rule averages it.
        const double width = 0.25 * (f.scale > 0.0 ? f.scale : 1.0);
        const auto panels = static_cast<int>(std::ceil(half / width));
        CompensatedSum acc;
        for (int i = 0; i < panels; ++i) {
            acc.add(gauss_legendre_integral(h, -width * (i + 1), -width * i, 20));
            acc.add(gauss_legendre_integral(h, width * i, width * (i + 1), 20));
        }
        p.integral_value = acc.value();
    }
    CompensatedSum s;
    const auto kmax = static_cast<std::int64_t>(std::ceil(half));
    for (std::int64_t k = -kmax; k <= kmax; ++k) {
        s.add(h(static_cast<double>(k)));
    }
    p.lattice_value = s.value();
    return p;
}

} // namespace lce

#endif // LCE_BRIDGE_HPP
