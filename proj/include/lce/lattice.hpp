#ifndef LCE_LATTICE_HPP
#define LCE_LATTICE_HPP

// Probability mass functions on Z^d stored densely over an axis-aligned box,
// and finite lattice point sets.

#include "lce/error.hpp"
#include "lce/numeric.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lce {

/// A point of Z^d.
class IndexVector {
public:
    using value_type = std::int64_t;

    IndexVector() = default;
    explicit IndexVector(std::size_t dim, value_type fill = 0) : c_(dim, fill) {}
    IndexVector(std::initializer_list<value_type> coords) : c_(coords) {}
    explicit IndexVector(std::vector<value_type> coords) : c_(std::move(coords)) {}

    [[nodiscard]] int dim() const { return static_cast<int>(c_.size()); }
    value_type& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
    value_type operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const std::vector<value_type>& coords() const { return c_; }
    [[nodiscard]] auto begin() const { return c_.begin(); }
    [[nodiscard]] auto end() const { return c_.end(); }

    IndexVector& operator+=(const IndexVector& o) {
        detail::require(o.dim() == dim(), "IndexVector: dimension mismatch");
        for (std::size_t i = 0; i < c_.size(); ++i) {
            c_[i] += o.c_[i];
        }
        return *this;
    }
    IndexVector& operator-=(const IndexVector& o) {
        detail::require(o.dim() == dim(), "IndexVector: dimension mismatch");
        for (std::size_t i = 0; i < c_.size(); ++i) {
            c_[i] -= o.c_[i];
        }
        return *this;
    }
    friend IndexVector operator+(IndexVector a, const IndexVector& b) { return a += b; }
    friend IndexVector operator-(IndexVector a, const IndexVector& b) { return a -= b; }
    friend IndexVector operator-(IndexVector a) {
        for (auto& x : a.c_) {
            x = -x;
        }
        return a;
    }

    // Lexicographic order; ties in witness lists and argmax use it.
    friend auto operator<=>(const IndexVector&, const IndexVector&) = default;
    friend bool operator==(const IndexVector&, const IndexVector&) = default;

    [[nodiscard]] std::vector<double> as_real() const { return {c_.begin(), c_.end()}; }

private:
    std::vector<value_type> c_;
};

/// Inclusive integer box [lo, hi] in Z^d.
class BoxDomain {
public:
    BoxDomain() = default;
    BoxDomain(IndexVector lo, IndexVector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
        detail::require(lo_.dim() >= 1, "BoxDomain: dimension must be >= 1");
        detail::require(lo_.dim() == hi_.dim(), "BoxDomain: lo/hi dimension mismatch");
        std::size_t cells = 1;
        for (int i = 0; i < lo_.dim(); ++i) {
            detail::require(lo_[i] <= hi_[i], "BoxDomain: lo must not exceed hi");
            const auto ext = static_cast<std::size_t>(hi_[i] - lo_[i] + 1);
            if (cells > std::numeric_limits<std::size_t>::max() / ext / 16) {
                throw CapacityExceeded("BoxDomain: cell count overflows");
            }
            cells *= ext;
        }
        cells_ = cells;
    }

    /// Box of half-width `radius` around `center` on every axis.
    static BoxDomain centered(const IndexVector& center, std::int64_t radius) {
        IndexVector lo = center;
        IndexVector hi = center;
        for (int i = 0; i < center.dim(); ++i) {
            lo[i] -= radius;
            hi[i] += radius;
        }
        return {lo, hi};
    }

    [[nodiscard]] int dim() const { return lo_.dim(); }
    [[nodiscard]] const IndexVector& lo() const { return lo_; }
    [[nodiscard]] const IndexVector& hi() const { return hi_; }
    [[nodiscard]] std::int64_t extent(int axis) const { return hi_[axis] - lo_[axis] + 1; }
    [[nodiscard]] std::size_t cell_count() const { return cells_; }

    [[nodiscard]] bool contains(const IndexVector& k) const {
        for (int i = 0; i < dim(); ++i) {
            if (k[i] < lo_[i] || k[i] > hi_[i]) {
                return false;
            }
        }
        return true;
    }

    /// Row-major offset, last axis fastest. `k` must lie in the box.
    [[nodiscard]] std::size_t offset(const IndexVector& k) const {
        std::size_t off = 0;
        for (int i = 0; i < dim(); ++i) {
            off = off * static_cast<std::size_t>(extent(i)) + static_cast<std::size_t>(k[i] - lo_[i]);
        }
        return off;
    }

    [[nodiscard]] IndexVector point(std::size_t offset) const {
        IndexVector k(static_cast<std::size_t>(dim()));
        for (int i = dim() - 1; i >= 0; --i) {
            const auto ext = static_cast<std::size_t>(extent(i));
            k[i] = lo_[i] + static_cast<std::int64_t>(offset % ext);
            offset /= ext;
        }
        return k;
    }

    /// Row-major strides (in cells) per axis.
    [[nodiscard]] std::vector<std::size_t> strides() const {
        std::vector<std::size_t> s(static_cast<std::size_t>(dim()), 1);
        for (int i = dim() - 2; i >= 0; --i) {
            s[static_cast<std::size_t>(i)] =
                s[static_cast<std::size_t>(i + 1)] * static_cast<std::size_t>(extent(i + 1));
        }
        return s;
    }

    /// Minkowski sum of two boxes.
    friend BoxDomain operator+(const BoxDomain& a, const BoxDomain& b) {
        return {a.lo_ + b.lo_, a.hi_ + b.hi_};
    }

    friend bool operator==(const BoxDomain&, const BoxDomain&) = default;

private:
    IndexVector lo_;
    IndexVector hi_;
    std::size_t cells_ = 0;
};

/// Row-major odometer over the cells of a box.
class CellCursor {
public:
    explicit CellCursor(const BoxDomain& box) : box_(&box), k_(box.lo()) {}

    [[nodiscard]] const IndexVector& point() const { return k_; }
    [[nodiscard]] std::size_t offset() const { return offset_; }
    [[nodiscard]] bool done() const { return offset_ >= box_->cell_count(); }

    void advance() {
        ++offset_;
        for (int i = box_->dim() - 1; i >= 0; --i) {
            if (k_[i] < box_->hi()[i]) {
                ++k_[i];
                return;
            }
            k_[i] = box_->lo()[i];
        }
    }

private:
    const BoxDomain* box_;
    IndexVector k_;
    std::size_t offset_ = 0;
};

template <class F>
void for_each_cell(const BoxDomain& box, F&& fn) {
    for (CellCursor c(box); !c.done(); c.advance()) {
        fn(c.point(), c.offset());
    }
}

/// Finite subset of Z^d, kept sorted lexicographically and free of duplicates.
class LatticeSet {
public:
    LatticeSet() = default;
    explicit LatticeSet(int dim) : dim_(dim) {
        detail::require(dim >= 1, "LatticeSet: dimension must be >= 1");
    }
    LatticeSet(int dim, std::vector<IndexVector> points) : dim_(dim), pts_(std::move(points)) {
        detail::require(dim >= 1, "LatticeSet: dimension must be >= 1");
        for (const auto& p : pts_) {
            detail::require(p.dim() == dim, "LatticeSet: point dimension mismatch");
        }
        std::sort(pts_.begin(), pts_.end());
        pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
    }

    /// All lattice points of a box.
    static LatticeSet from_box(const BoxDomain& box) {
        std::vector<IndexVector> pts;
        pts.reserve(box.cell_count());
        for_each_cell(box, [&](const IndexVector& k, std::size_t) { pts.push_back(k); });
        return {box.dim(), std::move(pts)};
    }

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] std::size_t size() const { return pts_.size(); }
    [[nodiscard]] bool empty() const { return pts_.empty(); }
    [[nodiscard]] const std::vector<IndexVector>& points() const { return pts_; }
    [[nodiscard]] auto begin() const { return pts_.begin(); }
    [[nodiscard]] auto end() const { return pts_.end(); }

    [[nodiscard]] bool contains(const IndexVector& k) const {
        return std::binary_search(pts_.begin(), pts_.end(), k);
    }

    [[nodiscard]] BoxDomain bounding_box() const {
        detail::require(!pts_.empty(), "LatticeSet: bounding box of empty set");
        IndexVector lo = pts_.front();
        IndexVector hi = pts_.front();
        for (const auto& p : pts_) {
            for (int i = 0; i < dim_; ++i) {
                lo[i] = std::min(lo[i], p[i]);
                hi[i] = std::max(hi[i], p[i]);
            }
        }
        return {lo, hi};
    }

    friend bool operator==(const LatticeSet&, const LatticeSet&) = default;

private:
    int dim_ = 0;
    std::vector<IndexVector> pts_;
};

using Meta = std::map<std::string, std::string>;

/// Nonnegative masses over a box plus the mass known to lie outside it.
class LatticePmf {
public:
    LatticePmf() = default;
    LatticePmf(BoxDomain box, std::vector<double> values, double deficit = 0.0, Meta meta = {})
        : box_(std::move(box)), values_(std::move(values)), deficit_(deficit), meta_(std::move(meta)) {
        detail::require(values_.size() == box_.cell_count(),
                        "LatticePmf: value count does not match box");
        detail::require(std::isfinite(deficit_) && deficit_ >= 0.0,
                        "LatticePmf: deficit must be finite and nonnegative");
        for (double v : values_) {
            if (!std::isfinite(v) || v < 0.0) {
                throw InvalidArgument("LatticePmf: masses must be finite and nonnegative");
            }
        }
    }

    static LatticePmf point_mass(const IndexVector& at) {
        return {BoxDomain(at, at), {1.0}};
    }

    [[nodiscard]] int dim() const { return box_.dim(); }
    [[nodiscard]] const BoxDomain& box() const { return box_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] double deficit() const { return deficit_; }
    [[nodiscard]] const Meta& meta() const { return meta_; }

    /// Mass at k; zero outside the box.
    [[nodiscard]] double at(const IndexVector& k) const {
        return box_.contains(k) ? values_[box_.offset(k)] : 0.0;
    }

    [[nodiscard]] double retained_mass() const { return compensated_total(values_); }

    [[nodiscard]] double max_value() const {
        return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
    }

    [[nodiscard]] LatticeSet support() const {
        std::vector<IndexVector> pts;
        for_each_cell(box_, [&](const IndexVector& k, std::size_t off) {
            if (values_[off] > 0.0) {
                pts.push_back(k);
            }
        });
        return {dim(), std::move(pts)};
    }

    [[nodiscard]] LatticePmf shifted(const IndexVector& by) const {
        return {BoxDomain(box_.lo() + by, box_.hi() + by), values_, deficit_, meta_};
    }

    [[nodiscard]] LatticePmf with_meta(const std::string& key, const std::string& value) const {
        LatticePmf copy = *this;
        copy.meta_[key] = value;
        return copy;
    }

    /// |sum + deficit - 1| <= tol.
    [[nodiscard]] bool is_normalized(double tol = 1e-9) const {
        return std::abs(retained_mass() + deficit_ - 1.0) <= tol;
    }

    friend bool operator==(const LatticePmf&, const LatticePmf&) = default;

private:
    BoxDomain box_;
    std::vector<double> values_;
    double deficit_ = 0.0;
    Meta meta_;
};

/// Uniform p.m.f. on a nonempty set.
inline LatticePmf make_uniform_on_set(const LatticeSet& s) {
    detail::require(!s.empty(), "make_uniform_on_set: empty set");
    const BoxDomain box = s.bounding_box();
    std::vector<double> values(box.cell_count(), 0.0);
    const double mass = 1.0 / static_cast<double>(s.size());
    for (const auto& k : s) {
        values[box.offset(k)] = mass;
    }
    return {box, std::move(values), 0.0, {{"constructor", "uniform_on_set"}}};
}

/// Product p.m.f. p(k) = prod_i p_i(k_i) of one-dimensional factors.
inline LatticePmf make_product(std::span<const LatticePmf> factors) {
    detail::require(!factors.empty(), "make_product: dimension 0");
    IndexVector lo(factors.size());
    IndexVector hi(factors.size());
    double retained = 1.0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        detail::require(factors[i].dim() == 1, "make_product: factors must be one-dimensional");
        lo[static_cast<int>(i)] = factors[i].box().lo()[0];
        hi[static_cast<int>(i)] = factors[i].box().hi()[0];
        retained *= (1.0 - factors[i].deficit());
    }
    BoxDomain box(lo, hi);
    std::vector<double> values(box.cell_count());
    for_each_cell(box, [&](const IndexVector& k, std::size_t off) {
        double v = 1.0;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            v *= factors[i].values()[static_cast<std::size_t>(k[static_cast<int>(i)] - lo[static_cast<int>(i)])];
        }
        values[off] = v;
    });
    // Mass lost by the product of truncated factors; at most the sum of the factor deficits.
    const double deficit = std::max(0.0, 1.0 - retained);
    return {box, std::move(values), deficit, {{"constructor", "product"}}};
}

inline LatticePmf make_product(std::initializer_list<LatticePmf> factors) {
    return make_product(std::span<const LatticePmf>(factors.begin(), factors.size()));
}

/// Rescale retained masses to sum to one and zero the deficit. Recorded in meta.
inline LatticePmf renormalized(const LatticePmf& p) {
    const double total = p.retained_mass();
    detail::require(total > 0.0, "renormalized: zero retained mass");
    std::vector<double> values(p.values().begin(), p.values().end());
    for (double& v : values) {
        v /= total;
    }
    Meta meta = p.meta();
    meta["renormalized"] = "true";
    return {p.box(), std::move(values), 0.0, std::move(meta)};
}

/// Shrink the box by peeling boundary slabs while the peeled mass stays within
/// `budget`. Peeled mass is moved into the deficit. Axes are visited in order,
/// low face before high face, repeatedly until no slab fits.
inline LatticePmf trimmed(const LatticePmf& p, double budget) {
    detail::require(budget >= 0.0, "trimmed: negative budget");
    const int d = p.dim();
    IndexVector lo = p.box().lo();
    IndexVector hi = p.box().hi();
    double spent = 0.0;

    auto slab_mass = [&](int axis, std::int64_t coord) {
        IndexVector slo = lo;
        IndexVector shi = hi;
        slo[axis] = coord;
        shi[axis] = coord;
        CompensatedSum s;
        for_each_cell(BoxDomain(slo, shi), [&](const IndexVector& k, std::size_t) {
            s.add(p.values()[p.box().offset(k)]);
        });
        return s.value();
    };

    bool progress = true;
    while (progress) {
        progress = false;
        for (int axis = 0; axis < d; ++axis) {
            if (lo[axis] < hi[axis]) {
                const double m = slab_mass(axis, lo[axis]);
                if (spent + m <= budget) {
                    spent += m;
                    ++lo[axis];
                    progress = true;
                }
            }
            if (lo[axis] < hi[axis]) {
                const double m = slab_mass(axis, hi[axis]);
                if (spent + m <= budget) {
                    spent += m;
                    --hi[axis];
                    progress = true;
                }
            }
        }
    }
    if (spent == 0.0 && lo == p.box().lo() && hi == p.box().hi()) {
        return p;
    }
    BoxDomain box(lo, hi);
    std::vector<double> values(box.cell_count());
    for_each_cell(box, [&](const IndexVector& k, std::size_t off) { values[off] = p.at(k); });
    return {box, std::move(values), p.deficit() + spent, p.meta()};
}

} // namespace lce

#endif // LCE_LATTICE_HPP
