#ifndef LCE_MOMENTS_HPP
#define LCE_MOMENTS_HPP

// Shannon entropy, discrete moments, isotropy diagnostics and the discrete bounds.

#include "lce/lattice.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace lce {

struct MomentSummary {
    double mass = 0.0;
    Vec mean;
    Matrix cov;
    double max_value = 0.0;
    IndexVector argmax;
    double det_cov = 0.0;
    double sigma_hat = 0.0;  // det(cov)^(1/2d)
    bool degenerate = false;  // det(cov) <= 0
};

struct IsotropyScore {
    double op_norm_deviation = 0.0;  // ||Cov - sigma_hat^2 I||_op
    double normalized = 0.0;         // op_norm_deviation / sigma_hat
    bool degenerate = false;
};

struct BoundRatios {
    std::optional<double> spread;  // d = 1 only: max p * sqrt(1 + 4 sigma^2)
    double ratio_ub = 0.0;         // max p * det(Cov)^(1/2)
    double gaussmax_slack = 0.0;   // (d/2) log(2 pi e det(Cov + I/12)^(1/d)) - H
    double entropy = 0.0;
    double det_cov = 0.0;
};

/// -sum p log p in nats, with 0 log 0 = 0.
inline double shannon_entropy(const LatticePmf& p) {
    CompensatedSum s;
    for (double v : p.values()) {
        if (v < 0.0) {
            throw InvalidArgument("shannon_entropy: negative mass");
        }
        if (v > 0.0) {
            s.add(-v * std::log(v));
        }
    }
    return s.value();
}

/// Mean and covariance are taken with respect to the retained mass.
inline MomentSummary discrete_moments(const LatticePmf& p) {
    const int d = p.dim();
    const auto ud = static_cast<std::size_t>(d);
    MomentSummary m;
    m.mean.assign(ud, 0.0);
    m.cov = Matrix(d);
    m.argmax = p.box().lo();

    CompensatedSum mass;
    std::vector<CompensatedSum> first(ud);
    for_each_cell(p.box(), [&](const IndexVector& k, std::size_t off) {
        const double v = p.values()[off];
        mass.add(v);
        for (std::size_t i = 0; i < ud; ++i) {
            first[i].add(v * static_cast<double>(k[static_cast<int>(i)]));
        }
        if (v > m.max_value) {  // strict: first (lexicographically smallest) maximiser wins
            m.max_value = v;
            m.argmax = k;
        }
    });
    m.mass = mass.value();
    detail::require(m.mass > 0.0, "discrete_moments: zero mass");
    for (std::size_t i = 0; i < ud; ++i) {
        m.mean[i] = first[i].value() / m.mass;
    }

    std::vector<CompensatedSum> second(ud * ud);
    Vec c(ud);
    for_each_cell(p.box(), [&](const IndexVector& k, std::size_t off) {
        const double v = p.values()[off];
        if (v == 0.0) {
            return;
        }
        for (std::size_t i = 0; i < ud; ++i) {
            c[i] = static_cast<double>(k[static_cast<int>(i)]) - m.mean[i];
        }
        for (std::size_t i = 0; i < ud; ++i) {
            for (std::size_t j = i; j < ud; ++j) {
                second[i * ud + j].add(v * c[i] * c[j]);
            }
        }
    });
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            const double val = second[static_cast<std::size_t>(i) * ud + static_cast<std::size_t>(j)].value() / m.mass;
            m.cov(i, j) = val;
            m.cov(j, i) = val;
        }
    }
    m.det_cov = determinant(m.cov);
    m.degenerate = !(m.det_cov > 0.0);
    m.sigma_hat = m.degenerate ? 0.0 : std::pow(m.det_cov, 1.0 / (2.0 * d));
    return m;
}

inline IsotropyScore isotropy_score(const MomentSummary& m) {
    IsotropyScore s;
    const int d = m.cov.size();
    const double s2 = m.sigma_hat * m.sigma_hat;
    s.op_norm_deviation = operator_norm_symmetric(m.cov - s2 * Matrix::identity(d));
    s.degenerate = m.degenerate;
    s.normalized = m.degenerate ? std::numeric_limits<double>::infinity() : s.op_norm_deviation / m.sigma_hat;
    return s;
}

inline IsotropyScore isotropy_score(const LatticePmf& p) { return isotropy_score(discrete_moments(p)); }

/// max p * sqrt(1 + 4 sigma^2); defined for d = 1 only.
inline double spread_ratio(const LatticePmf& p) {
    detail::require(p.dim() == 1, "spread_ratio: only defined for d = 1");
    const auto m = discrete_moments(p);
    return m.max_value * std::sqrt(1.0 + 4.0 * m.cov(0, 0));
}

inline BoundRatios entropy_covariance_bounds(const LatticePmf& p) {
    const int d = p.dim();
    const auto m = discrete_moments(p);
    BoundRatios r;
    r.entropy = shannon_entropy(p);
    r.det_cov = m.det_cov;
    if (d == 1) {
        r.spread = m.max_value * std::sqrt(1.0 + 4.0 * m.cov(0, 0));
    }
    r.ratio_ub = m.max_value * std::sqrt(std::max(0.0, m.det_cov));
    const Matrix smoothed = m.cov + (1.0 / 12.0) * Matrix::identity(d);
    const double two_pi_e = 2.0 * std::numbers::pi * std::numbers::e;
    r.gaussmax_slack = 0.5 * d * std::log(two_pi_e) + 0.5 * std::log(determinant(smoothed)) - r.entropy;
    return r;
}

/// sum_k |p(k) - p(k - e_axis)| over the box extended by one cell along `axis`.
inline double variation_sum(const LatticePmf& p, int axis) {
    detail::require(axis >= 0 && axis < p.dim(), "variation_sum: axis out of range");
    IndexVector hi = p.box().hi();
    ++hi[axis];
    const BoxDomain ext(p.box().lo(), hi);
    CompensatedSum s;
    for_each_cell(ext, [&](const IndexVector& k, std::size_t) {
        IndexVector km = k;
        --km[axis];
        s.add(std::abs(p.at(k) - p.at(km)));
    });
    return s.value();
}

/// sum over l in Z^(d-j) of |l_1|^i * max over the first j coordinates of p(k, l).
inline double sum_of_maxima(const LatticePmf& p, int i, int j) {
    const int d = p.dim();
    detail::require(i >= 0 && i <= 2, "sum_of_maxima: i must be in {0,1,2}");
    detail::require(j >= 0 && j <= d - 1, "sum_of_maxima: j must be in {0..d-1}");
    const auto& box = p.box();
    std::size_t inner = 1;
    for (int a = j; a < d; ++a) {
        inner *= static_cast<std::size_t>(box.extent(a));
    }
    const std::size_t outer = box.cell_count() / inner;
    std::vector<double> maxima(inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t l = 0; l < inner; ++l) {
            maxima[l] = std::max(maxima[l], p.values()[o * inner + l]);
        }
    }
    std::size_t l1_stride = inner / static_cast<std::size_t>(box.extent(j));
    CompensatedSum s;
    for (std::size_t l = 0; l < inner; ++l) {
        const auto l1 = static_cast<double>(box.lo()[j] + static_cast<std::int64_t>(l / l1_stride));
        s.add(std::pow(std::abs(l1), i) * maxima[l]);
    }
    return s.value();
}

} // namespace lce

#endif // LCE_MOMENTS_HPP
