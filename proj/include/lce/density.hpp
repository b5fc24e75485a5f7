#ifndef LCE_DENSITY_HPP
#define LCE_DENSITY_HPP

// Continuous densities on R^d, a small named registry of log-concave families,
// and quantization of a density onto the integer lattice.

#include "lce/lattice.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>

namespace lce {

/// f(x) <= amplitude * exp(-rate * |x|_2) whenever |x|_2 >= radius.
struct TailBound {
    double amplitude = 0.0;
    double rate = 0.0;
    double radius = 0.0;
};

using Params = std::map<std::string, double>;

struct ContinuousDensity {
    using Evaluator = std::function<double(std::span<const double>)>;

    std::string name;
    int dim = 0;
    Evaluator evaluate;
    std::optional<double> known_mass;  // integral of f
    std::optional<Vec> known_mean;     // mean of f / mass
    std::optional<Matrix> known_cov;   // covariance of f / mass
    std::optional<double> known_max;   // sup of f
    std::optional<TailBound> tail;
    // d = 2 only: inf argmax over y of f(x, y), when known in closed form.
    std::function<double(double)> slice_argmax;
    bool logconcave = false;
    double scale = 1.0;  // characteristic length (standard deviation for isotropic families)
    Params params;

    double operator()(std::span<const double> x) const { return evaluate(x); }
    double operator()(std::initializer_list<double> x) const {
        return evaluate(std::span<const double>(x.begin(), x.size()));
    }
};

namespace detail {

inline double param(const Params& p, const std::string& key, std::optional<double> fallback = std::nullopt) {
    auto it = p.find(key);
    if (it != p.end()) {
        return it->second;
    }
    if (fallback) {
        return *fallback;
    }
    throw InvalidArgument("density: missing parameter '" + key + "'");
}

inline Matrix diagonal(const Vec& v) {
    Matrix m(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        m(static_cast<int>(i), static_cast<int>(i)) = v[i];
    }
    return m;
}

} // namespace detail

/// Centered Gaussian with covariance diag(variances).
inline ContinuousDensity make_diagonal_gaussian(const Vec& variances) {
    const int d = static_cast<int>(variances.size());
    detail::require(d >= 1, "gaussian: dimension must be >= 1");
    double det = 1.0;
    double vmax = 0.0;
    for (double v : variances) {
        detail::require(v > 0.0 && std::isfinite(v), "gaussian: variances must be positive");
        det *= v;
        vmax = std::max(vmax, v);
    }
    const double norm = 1.0 / std::sqrt(std::pow(2.0 * std::numbers::pi, d) * det);
    ContinuousDensity f;
    f.name = "gaussian";
    f.dim = d;
    f.evaluate = [variances, norm](std::span<const double> x) {
        double q = 0.0;
        for (std::size_t i = 0; i < variances.size(); ++i) {
            q += x[i] * x[i] / variances[i];
        }
        return norm * std::exp(-0.5 * q);
    };
    f.known_mass = 1.0;
    f.known_mean = Vec(static_cast<std::size_t>(d), 0.0);
    f.known_cov = detail::diagonal(variances);
    f.known_max = norm;
    f.slice_argmax = [](double) { return 0.0; };
    const double smax = std::sqrt(vmax);
    // exp(-r^2 / 2s^2) <= exp(-3 r / s) once r >= 6 s.
    f.tail = TailBound{norm, 3.0 / smax, 6.0 * smax};
    f.logconcave = true;
    f.scale = smax;
    return f;
}

inline ContinuousDensity make_gaussian(double sigma, int dim) {
    detail::require(sigma > 0.0, "gaussian: sigma must be positive");
    auto f = make_diagonal_gaussian(Vec(static_cast<std::size_t>(dim), sigma * sigma));
    f.params = {{"sigma", sigma}, {"dim", dim}};
    return f;
}

/// Correlated planar Gaussian with covariance sigma^2 [[1, rho], [rho, 1]].
inline ContinuousDensity make_sheared_gaussian(double sigma, double rho) {
    detail::require(sigma > 0.0, "sheared_gaussian: sigma must be positive");
    detail::require(std::abs(rho) < 1.0, "sheared_gaussian: |rho| must be < 1");
    const double s2 = sigma * sigma;
    const double det = s2 * s2 * (1.0 - rho * rho);
    const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
    ContinuousDensity f;
    f.name = "sheared_gaussian";
    f.dim = 2;
    f.evaluate = [=](std::span<const double> x) {
        const double q = (x[0] * x[0] - 2.0 * rho * x[0] * x[1] + x[1] * x[1]) / (s2 * (1.0 - rho * rho));
        return norm * std::exp(-0.5 * q);
    };
    f.known_mass = 1.0;
    f.known_mean = Vec{0.0, 0.0};
    Matrix cov(2);
    cov(0, 0) = s2;
    cov(1, 1) = s2;
    cov(0, 1) = rho * s2;
    cov(1, 0) = rho * s2;
    f.known_cov = cov;
    f.known_max = norm;
    f.slice_argmax = [rho](double x) { return rho * x; };
    const double smax = sigma * std::sqrt(1.0 + std::abs(rho));
    f.tail = TailBound{norm, 3.0 / smax, 6.0 * smax};
    f.logconcave = true;
    f.scale = sigma;
    f.params = {{"sigma", sigma}, {"rho", rho}};
    return f;
}

/// Product of d Laplace densities (rate/2) exp(-rate |x_i|).
inline ContinuousDensity make_laplace_product(double rate, int dim) {
    detail::require(rate > 0.0 && dim >= 1, "laplace_product: need rate > 0 and dim >= 1");
    const double amp = std::pow(0.5 * rate, dim);
    ContinuousDensity f;
    f.name = "laplace_product";
    f.dim = dim;
    f.evaluate = [=](std::span<const double> x) {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) {
            s += std::abs(x[static_cast<std::size_t>(i)]);
        }
        return amp * std::exp(-rate * s);
    };
    f.known_mass = 1.0;
    f.known_mean = Vec(static_cast<std::size_t>(dim), 0.0);
    f.known_cov = (2.0 / (rate * rate)) * Matrix::identity(dim);
    f.known_max = amp;
    f.slice_argmax = [](double) { return 0.0; };
    // |x|_1 >= |x|_2 everywhere.
    f.tail = TailBound{amp, rate, 0.0};
    f.logconcave = true;
    f.scale = std::sqrt(2.0) / rate;
    f.params = {{"rate", rate}, {"dim", dim}};
    return f;
}

/// One-dimensional exponential with the given rate, shifted to mean zero.
inline ContinuousDensity make_centered_exponential(double rate) {
    detail::require(rate > 0.0, "exponential: rate must be positive");
    ContinuousDensity f;
    f.name = "exponential";
    f.dim = 1;
    f.evaluate = [=](std::span<const double> x) {
        const double y = x[0] + 1.0 / rate;
        return y >= 0.0 ? rate * std::exp(-rate * y) : 0.0;
    };
    f.known_mass = 1.0;
    f.known_mean = Vec{0.0};
    f.known_cov = (1.0 / (rate * rate)) * Matrix::identity(1);
    f.known_max = rate;
    // rate e^{-rate(x + 1/rate)} = (rate/e) e^{-rate x} for x >= 0; zero below -1/rate.
    f.tail = TailBound{rate / std::numbers::e, rate, (1.0 / rate) * (1.0 + 1e-12)};
    f.logconcave = true;
    f.scale = 1.0 / rate;
    f.params = {{"rate", rate}};
    return f;
}

/// Uniform density on [-half_width, half_width].
inline ContinuousDensity make_centered_uniform(double half_width) {
    detail::require(half_width > 0.0, "uniform: half_width must be positive");
    ContinuousDensity f;
    f.name = "uniform";
    f.dim = 1;
    f.evaluate = [=](std::span<const double> x) {
        return std::abs(x[0]) <= half_width ? 0.5 / half_width : 0.0;
    };
    f.known_mass = 1.0;
    f.known_mean = Vec{0.0};
    f.known_cov = (half_width * half_width / 3.0) * Matrix::identity(1);
    f.known_max = 0.5 / half_width;
    f.tail = TailBound{0.0, 1.0, half_width * (1.0 + 1e-12)};
    f.logconcave = true;
    f.scale = half_width / std::sqrt(3.0);
    f.params = {{"half_width", half_width}};
    return f;
}

/// Logistic density with scale s.
inline ContinuousDensity make_logistic(double s) {
    detail::require(s > 0.0, "logistic: scale must be positive");
    ContinuousDensity f;
    f.name = "logistic";
    f.dim = 1;
    f.evaluate = [=](std::span<const double> x) {
        const double e = std::exp(-std::abs(x[0]) / s);
        return e / (s * (1.0 + e) * (1.0 + e));
    };
    f.known_mass = 1.0;
    f.known_mean = Vec{0.0};
    f.known_cov = (s * s * std::numbers::pi * std::numbers::pi / 3.0) * Matrix::identity(1);
    f.known_max = 0.25 / s;
    f.tail = TailBound{1.0 / s, 1.0 / s, 0.0};
    f.logconcave = true;
    f.scale = s * std::numbers::pi / std::sqrt(3.0);
    f.params = {{"scale", s}};
    return f;
}

/// sigma^(-d) f(x / sigma).
inline ContinuousDensity rescaled(const ContinuousDensity& f, double sigma) {
    detail::require(sigma > 0.0, "rescaled: sigma must be positive");
    ContinuousDensity g = f;
    const double jac = std::pow(sigma, -f.dim);
    const auto base = f.evaluate;
    const int d = f.dim;
    g.evaluate = [=](std::span<const double> x) {
        Vec y(x.begin(), x.end());
        for (int i = 0; i < d; ++i) {
            y[static_cast<std::size_t>(i)] /= sigma;
        }
        return jac * base(y);
    };
    if (g.known_mean) {
        for (double& m : *g.known_mean) {
            m *= sigma;
        }
    }
    if (g.known_cov) {
        g.known_cov = (sigma * sigma) * *g.known_cov;
    }
    if (g.known_max) {
        g.known_max = *g.known_max * jac;
    }
    if (f.slice_argmax) {
        const auto inner = f.slice_argmax;
        g.slice_argmax = [inner, sigma](double x) { return sigma * inner(x / sigma); };
    }
    if (g.tail) {
        g.tail = TailBound{g.tail->amplitude * jac, g.tail->rate / sigma, g.tail->radius * sigma};
    }
    g.scale = f.scale * sigma;
    g.name = f.name + "_rescaled";
    return g;
}

/// Registry: gaussian{sigma,dim}, anisotropic_gaussian{var0,var1,...}, laplace_product{rate,dim},
/// sheared_gaussian{sigma,rho}, exponential{rate}, uniform{half_width}, logistic{scale}.
inline ContinuousDensity make_density(const std::string& name, const Params& p) {
    using detail::param;
    if (name == "gaussian") {
        return make_gaussian(param(p, "sigma"), static_cast<int>(param(p, "dim", 1.0)));
    }
    if (name == "anisotropic_gaussian") {
        Vec var;
        for (int i = 0;; ++i) {
            auto it = p.find("var" + std::to_string(i));
            if (it == p.end()) {
                break;
            }
            var.push_back(it->second);
        }
        auto f = make_diagonal_gaussian(var);
        f.name = "anisotropic_gaussian";
        f.params = p;
        return f;
    }
    if (name == "laplace_product") {
        return make_laplace_product(param(p, "rate"), static_cast<int>(param(p, "dim", 1.0)));
    }
    if (name == "sheared_gaussian") {
        return make_sheared_gaussian(param(p, "sigma"), param(p, "rho"));
    }
    if (name == "exponential") {
        return make_centered_exponential(param(p, "rate", 1.0));
    }
    if (name == "uniform") {
        return make_centered_uniform(param(p, "half_width"));
    }
    if (name == "logistic") {
        return make_logistic(param(p, "scale", 1.0));
    }
    throw InvalidArgument("make_density: unknown density '" + name + "'");
}

/// Spot check that the declared tail bound dominates f beyond its radius along
/// deterministic rays. Returns the largest ratio f / bound seen (<= 1 means ok).
inline double tail_bound_worst_ratio(const ContinuousDensity& f, int rays = 32, int samples = 32) {
    detail::require(f.tail.has_value(), "tail_bound_worst_ratio: no tail bound declared");
    const auto& t = *f.tail;
    double worst = 0.0;
    for (const auto& u : unit_directions(f.dim, rays)) {
        for (int s = 0; s < samples; ++s) {
            const double r = std::max(t.radius, 1e-9) + (s * 40.0 / t.rate) / samples;
            Vec x(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) {
                x[i] = r * u[i];
            }
            const double bound = t.amplitude * std::exp(-t.rate * r);
            const double v = f(x);
            if (v > 0.0) {
                worst = std::max(worst, bound > 0.0 ? v / bound : std::numeric_limits<double>::infinity());
            }
        }
    }
    return worst;
}

struct QuantizeOptions {
    double tail_tolerance = 1e-12;
};

namespace detail {

/// Bound on sum_{k : |k|_inf > half_width} f(k) from a tail bound centered at 0.
inline double lattice_tail_mass(const TailBound& t, int d, std::int64_t half_width) {
    CompensatedSum s;
    for (std::int64_t m = half_width + 1;; ++m) {
        const double shells = std::pow(2.0 * m + 1.0, d) - std::pow(2.0 * m - 1.0, d);
        const double term = shells * t.amplitude * std::exp(-t.rate * static_cast<double>(m));
        s.add(term);
        if (term <= 1e-18 * s.value() || term == 0.0) {
            // Remaining terms decay at least geometrically once polynomial growth is dominated.
            const double ratio = std::pow((2.0 * m + 3.0) / (2.0 * m + 1.0), d - 1) * std::exp(-t.rate);
            if (ratio < 1.0) {
                s.add(term * ratio / (1.0 - ratio));
                break;
            }
        }
        if (m - half_width > 100000000) {
            throw NumericalError("quantize_density: tail series did not converge");
        }
    }
    return s.value();
}

} // namespace detail

/// p(k) proportional to f(k) on the box center ± ceil(radius_multiplier * scale).
/// The normalizer includes the tail bound, which becomes the deficit.
inline LatticePmf quantize_density(const ContinuousDensity& f, const IndexVector& center,
                                   double radius_multiplier = 12.0, const QuantizeOptions& opt = {}) {
    detail::require(center.dim() == f.dim, "quantize_density: center dimension mismatch");
    detail::require(radius_multiplier > 0.0, "quantize_density: radius_multiplier must be positive");
    if (!f.tail) {
        throw InvalidArgument("quantize_density: density has no declared tail bound");
    }
    const auto half = static_cast<std::int64_t>(std::ceil(radius_multiplier * f.scale));
    std::int64_t shift = 0;
    for (auto c : center) {
        shift = std::max(shift, std::abs(c));
    }
    const std::int64_t covered = half - shift;
    if (static_cast<double>(covered + 1) < f.tail->radius) {
        throw InvalidArgument("quantize_density: box does not reach the tail-bound radius");
    }
    const double tail = detail::lattice_tail_mass(*f.tail, f.dim, covered);

    const BoxDomain box = BoxDomain::centered(center, half);
    std::vector<double> values(box.cell_count());
    CompensatedSum total;
    for_each_cell(box, [&](const IndexVector& k, std::size_t off) {
        const auto x = k.as_real();
        const double v = f(x);
        if (!std::isfinite(v) || v < 0.0) {
            throw NumericalError("quantize_density: non-finite or negative evaluation");
        }
        values[off] = v;
        total.add(v);
    });
    const double norm = total.value() + tail;
    detail::require(norm > 0.0, "quantize_density: density vanishes on the box");
    const double deficit = tail / norm;
    if (deficit > opt.tail_tolerance) {
        throw InvalidArgument("quantize_density: truncation deficit exceeds tail tolerance");
    }
    for (double& v : values) {
        v /= norm;
    }
    Meta meta{{"constructor", "quantize_density"}, {"density", f.name}};
    return {box, std::move(values), deficit, std::move(meta)};
}

} // namespace lce

#endif // LCE_DENSITY_HPP
