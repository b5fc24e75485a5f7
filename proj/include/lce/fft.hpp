#ifndef LCE_FFT_HPP
#define LCE_FFT_HPP

// Iterative radix-2 complex FFT and its multi-dimensional (row-major) extension.

#include "lce/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

namespace lce::fft {

using cplx = std::complex<double>;

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) {
        p <<= 1U;
    }
    return p;
}

/// In-place transform of `n` values spaced `stride` apart. `n` must be a power of two.
/// Twiddles are taken from `roots` (size >= n/2, roots[k] = exp(-2 pi i k / n)).
inline void transform_strided(cplx* a, std::size_t n, std::size_t stride, bool inverse,
                              const std::vector<cplx>& roots) {
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1U;
        for (; (j & bit) != 0; bit >>= 1U) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i * stride], a[j * stride]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1U) {
        const std::size_t step = n / len;
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cplx w = roots[k * step];
                if (inverse) {
                    w = std::conj(w);
                }
                const cplx u = a[(i + k) * stride];
                const cplx v = a[(i + k + half) * stride] * w;
                a[(i + k) * stride] = u + v;
                a[(i + k + half) * stride] = u - v;
            }
        }
    }
    if (inverse) {
        const double s = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i * stride] *= s;
        }
    }
}

inline std::vector<cplx> roots_of_unity(std::size_t n) {
    std::vector<cplx> r(std::max<std::size_t>(n / 2, 1));
    for (std::size_t k = 0; k < r.size(); ++k) {
        const double t = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        r[k] = {std::cos(t), std::sin(t)};
    }
    return r;
}

/// Multi-dimensional transform of a row-major array with power-of-two `shape`.
inline void transform(std::vector<cplx>& data, const std::vector<std::size_t>& shape, bool inverse) {
    std::size_t total = 1;
    for (auto s : shape) {
        detail::require(s > 0 && (s & (s - 1)) == 0, "fft: axis lengths must be powers of two");
        total *= s;
    }
    detail::require(data.size() == total, "fft: data size does not match shape");
    std::size_t stride = total;
    for (std::size_t axis = 0; axis < shape.size(); ++axis) {
        const std::size_t n = shape[axis];
        stride /= n;
        if (n == 1) {
            continue;
        }
        const auto roots = roots_of_unity(n);
        const std::size_t block = n * stride;
        for (std::size_t outer = 0; outer < total; outer += block) {
            for (std::size_t inner = 0; inner < stride; ++inner) {
                transform_strided(data.data() + outer + inner, n, stride, inverse, roots);
            }
        }
    }
}

} // namespace lce::fft

#endif // LCE_FFT_HPP
