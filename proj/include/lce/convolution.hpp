#ifndef LCE_CONVOLUTION_HPP
#define LCE_CONVOLUTION_HPP

#include "lce/fft.hpp"
#include "lce/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace lce {

enum class ConvolutionMethod { direct, fft, automatic };

struct ConvolutionOptions {
    ConvolutionMethod method = ConvolutionMethod::automatic;
    std::size_t max_cells = std::size_t{1} << 26U;  // cap on result and padded FFT grids
    int fft_check_samples = 64;
    double fft_check_tol = 1e-10;  // relative to total mass
};

namespace detail {

inline double direct_cell(const LatticePmf& p, const LatticePmf& q, const IndexVector& k) {
    // Sum over j in box(p) with k - j in box(q), row-major over j.
    const int d = p.dim();
    IndexVector lo(static_cast<std::size_t>(d));
    IndexVector hi(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        lo[i] = std::max(p.box().lo()[i], k[i] - q.box().hi()[i]);
        hi[i] = std::min(p.box().hi()[i], k[i] - q.box().lo()[i]);
        if (lo[i] > hi[i]) {
            return 0.0;
        }
    }
    const auto ps = p.box().strides();
    const auto qs = q.box().strides();
    const auto pv = p.values();
    const auto qv = q.values();
    // Odometer over j with running offsets of j in box(p) and k - j in box(q).
    std::int64_t po = 0;
    std::int64_t qo = 0;
    for (int i = 0; i < d; ++i) {
        const auto u = static_cast<std::size_t>(i);
        po += (lo[i] - p.box().lo()[i]) * static_cast<std::int64_t>(ps[u]);
        qo += (k[i] - lo[i] - q.box().lo()[i]) * static_cast<std::int64_t>(qs[u]);
    }
    IndexVector j = lo;
    const int last = d - 1;
    const auto pl = static_cast<std::int64_t>(ps[static_cast<std::size_t>(last)]);
    const auto ql = static_cast<std::int64_t>(qs[static_cast<std::size_t>(last)]);
    const std::int64_t run = hi[last] - lo[last] + 1;
    CompensatedSum s;
    while (true) {
        for (std::int64_t t = 0; t < run; ++t) {
            s.add(pv[static_cast<std::size_t>(po + t * pl)] * qv[static_cast<std::size_t>(qo - t * ql)]);
        }
        int axis = last - 1;
        while (axis >= 0) {
            const auto u = static_cast<std::size_t>(axis);
            if (j[axis] < hi[axis]) {
                ++j[axis];
                po += static_cast<std::int64_t>(ps[u]);
                qo -= static_cast<std::int64_t>(qs[u]);
                break;
            }
            const std::int64_t span = hi[axis] - lo[axis];
            j[axis] = lo[axis];
            po -= span * static_cast<std::int64_t>(ps[u]);
            qo += span * static_cast<std::int64_t>(qs[u]);
            --axis;
        }
        if (axis < 0) {
            break;
        }
    }
    return s.value();
}

inline std::vector<double> convolve_direct(const LatticePmf& p, const LatticePmf& q,
                                           const BoxDomain& out) {
    std::vector<double> values(out.cell_count());
    for_each_cell(out, [&](const IndexVector& k, std::size_t off) {
        values[off] = direct_cell(p, q, k);
    });
    return values;
}

inline std::vector<std::size_t> fft_shape(const LatticePmf& p, const LatticePmf& q) {
    std::vector<std::size_t> shape(static_cast<std::size_t>(p.dim()));
    for (int i = 0; i < p.dim(); ++i) {
        shape[static_cast<std::size_t>(i)] =
            fft::next_pow2(static_cast<std::size_t>(p.box().extent(i) + q.box().extent(i) - 1));
    }
    return shape;
}

inline std::size_t product_of(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (auto s : shape) {
        n *= s;
    }
    return n;
}

inline std::vector<fft::cplx> embed(const LatticePmf& p, const std::vector<std::size_t>& shape) {
    std::vector<fft::cplx> a(product_of(shape));
    for_each_cell(p.box(), [&](const IndexVector& k, std::size_t off) {
        std::size_t idx = 0;
        for (int i = 0; i < p.dim(); ++i) {
            idx = idx * shape[static_cast<std::size_t>(i)] +
                  static_cast<std::size_t>(k[i] - p.box().lo()[i]);
        }
        a[idx] = p.values()[off];
    });
    return a;
}

inline std::vector<double> convolve_fft(const LatticePmf& p, const LatticePmf& q, const BoxDomain& out,
                                        const ConvolutionOptions& opt) {
    const auto shape = fft_shape(p, q);
    auto a = embed(p, shape);
    auto b = embed(q, shape);
    fft::transform(a, shape, false);
    fft::transform(b, shape, false);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] *= b[i];
    }
    b.clear();
    b.shrink_to_fit();
    fft::transform(a, shape, true);

    std::vector<double> values(out.cell_count());
    for_each_cell(out, [&](const IndexVector& k, std::size_t off) {
        std::size_t idx = 0;
        for (int i = 0; i < out.dim(); ++i) {
            idx = idx * shape[static_cast<std::size_t>(i)] + static_cast<std::size_t>(k[i] - out.lo()[i]);
        }
        values[off] = std::max(0.0, a[idx].real());
    });

    // Spot check against the direct sum on a deterministic subsample.
    const double total = p.retained_mass() * q.retained_mass();
    SplitMix64 rng(0xC0FFEEULL ^ out.cell_count());
    for (int s = 0; s < opt.fft_check_samples; ++s) {
        const std::size_t off = (s == 0) ? out.cell_count() / 2 : rng.next() % out.cell_count();
        const double ref = direct_cell(p, q, out.point(off));
        if (std::abs(ref - values[off]) > opt.fft_check_tol * std::max(total, 1e-300)) {
            throw NumericalError("convolve: FFT result disagrees with direct evaluation");
        }
    }
    return values;
}

} // namespace detail

/// (p * q)(k) = sum_j p(j) q(k - j) over the Minkowski sum of the two boxes.
inline LatticePmf convolve(const LatticePmf& p, const LatticePmf& q, const ConvolutionOptions& opt = {}) {
    detail::require(p.dim() == q.dim(), "convolve: dimension mismatch");
    const BoxDomain out = p.box() + q.box();
    if (out.cell_count() > opt.max_cells) {
        throw CapacityExceeded("convolve: result box exceeds memory cap");
    }
    const auto shape = detail::fft_shape(p, q);
    const std::size_t padded = detail::product_of(shape);

    ConvolutionMethod method = opt.method;
    if (method == ConvolutionMethod::automatic) {
        const double direct_cost =
            static_cast<double>(p.box().cell_count()) * static_cast<double>(q.box().cell_count());
        const double fft_cost = 30.0 * static_cast<double>(padded) * std::log2(static_cast<double>(padded) + 1.0);
        method = (direct_cost <= fft_cost || padded > opt.max_cells) ? ConvolutionMethod::direct
                                                                     : ConvolutionMethod::fft;
    }
    std::vector<double> values;
    if (method == ConvolutionMethod::fft) {
        if (padded > opt.max_cells) {
            throw CapacityExceeded("convolve: padded FFT grid exceeds memory cap");
        }
        values = detail::convolve_fft(p, q, out, opt);
    } else {
        values = detail::convolve_direct(p, q, out);
    }
    const double deficit = p.deficit() + q.deficit() - p.deficit() * q.deficit();
    Meta meta;
    meta["constructor"] = "convolve";
    meta["method"] = method == ConvolutionMethod::fft ? "fft" : "direct";
    if (p.meta().contains("renormalized") || q.meta().contains("renormalized")) {
        meta["renormalized"] = "true";
    }
    return {out, std::move(values), deficit, std::move(meta)};
}

/// n-fold convolution power; n = 1 returns p unchanged.
inline LatticePmf self_convolve(const LatticePmf& p, int n, const ConvolutionOptions& opt = {}) {
    detail::require(n >= 1, "self_convolve: n must be >= 1");
    LatticePmf acc = p;
    for (int i = 1; i < n; ++i) {
        acc = convolve(acc, p, opt);
    }
    return acc;
}

} // namespace lce

#endif // LCE_CONVOLUTION_HPP
