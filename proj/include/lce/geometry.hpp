#ifndef LCE_GEOMETRY_HPP
#define LCE_GEOMETRY_HPP

// Convex bodies (polytopes in d <= 3, ellipsoids), Ball bodies of log-concave
// densities, the inclusion constants between them, second-moment and
// inradius/circumradius diagnostics.

#include "lce/density.hpp"
#include "lce/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace lce {

struct Halfspace {
    Vec normal;     // a
    double offset;  // b, for a . x <= b
};

enum class BodyKind { h_polytope, v_polytope, ellipsoid };

inline double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

namespace detail {

inline constexpr double geom_tol = 1e-9;

inline Vec sub(const Vec& a, const Vec& b) {
    Vec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        c[i] = a[i] - b[i];
    }
    return c;
}

inline Vec cross3(const Vec& a, const Vec& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline bool same_point(const Vec& a, const Vec& b, double tol) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > tol) {
            return false;
        }
    }
    return true;
}

inline double point_scale(const std::vector<Vec>& pts) {
    double s = 1.0;
    for (const auto& p : pts) {
        for (double x : p) {
            s = std::max(s, std::abs(x));
        }
    }
    return s;
}

/// Facets of conv(pts) for d in {1,2,3} by enumerating d-subsets.
inline std::vector<Halfspace> facets_of(const std::vector<Vec>& pts, int d) {
    const double tol = geom_tol * point_scale(pts);
    std::vector<Halfspace> out;
    auto add = [&](Vec n) {
        const double len = norm2(n);
        if (len <= tol) {
            return;
        }
        for (double& x : n) {
            x /= len;
        }
        const double b0 = dot(n, pts.front());
        double lo = b0;
        double hi = b0;
        for (const auto& p : pts) {
            const double v = dot(n, p);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        // n is a facet normal candidate; the plane must support the set.
        for (int sign : {1, -1}) {
            Vec nn = n;
            for (double& x : nn) {
                x *= sign;
            }
            const double b = sign > 0 ? hi : -lo;
            int on = 0;
            for (const auto& p : pts) {
                if (std::abs(dot(nn, p) - b) <= tol) {
                    ++on;
                }
            }
            if (on < d) {
                continue;
            }
            bool dup = false;
            for (const auto& h : out) {
                if (same_point(h.normal, nn, 1e-9) && std::abs(h.offset - b) <= tol) {
                    dup = true;
                    break;
                }
            }
            if (!dup) {
                out.push_back({nn, b});
            }
        }
    };
    const std::size_t m = pts.size();
    if (d == 1) {
        add({1.0});
    } else if (d == 2) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                const Vec e = sub(pts[j], pts[i]);
                add({-e[1], e[0]});
            }
        }
    } else if (d == 3) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                for (std::size_t k = j + 1; k < m; ++k) {
                    add(cross3(sub(pts[j], pts[i]), sub(pts[k], pts[i])));
                }
            }
        }
    } else {
        throw InvalidArgument("polytope: only d <= 3 is supported");
    }
    // Keep only halfspaces that actually bound the set (both sides of a
    // degenerate plane can be added when all points are coplanar).
    std::vector<Halfspace> kept;
    for (const auto& h : out) {
        bool ok = true;
        for (const auto& p : pts) {
            ok = ok && dot(h.normal, p) <= h.offset + tol;
        }
        if (ok) {
            kept.push_back(h);
        }
    }
    return kept;
}

/// Vertices of {x : a_i . x <= b_i} by enumerating d-subsets of constraints.
inline std::vector<Vec> vertices_of(const std::vector<Halfspace>& hs, int d) {
    detail::require(d >= 1 && d <= 3, "polytope: only d <= 3 is supported");
    double scale = 1.0;
    for (const auto& h : hs) {
        scale = std::max(scale, std::abs(h.offset));
    }
    const double tol = geom_tol * scale;
    std::vector<Vec> out;
    std::vector<std::size_t> idx(static_cast<std::size_t>(d));
    const std::size_t m = hs.size();
    std::function<void(std::size_t, int)> rec = [&](std::size_t start, int depth) {
        if (depth == d) {
            Matrix a(d);
            std::vector<double> b(static_cast<std::size_t>(d));
            for (int r = 0; r < d; ++r) {
                const auto& h = hs[idx[static_cast<std::size_t>(r)]];
                double len = norm2(h.normal);
                for (int c = 0; c < d; ++c) {
                    a(r, c) = h.normal[static_cast<std::size_t>(c)] / len;
                }
                b[static_cast<std::size_t>(r)] = h.offset / len;
            }
            if (!solve_linear(a, b, 1e-10)) {
                return;
            }
            for (const auto& h : hs) {
                if (dot(h.normal, b) > h.offset + tol * std::max(1.0, norm2(h.normal))) {
                    return;
                }
            }
            for (const auto& v : out) {
                if (same_point(v, b, tol)) {
                    return;
                }
            }
            out.push_back(b);
            return;
        }
        for (std::size_t i = start; i < m; ++i) {
            idx[static_cast<std::size_t>(depth)] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

/// Simplex integrals: volume, integral of x and of x x^T.
struct SimplexMoments {
    double volume = 0.0;
    Vec first;
    Matrix second;
};

inline SimplexMoments simplex_moments(const std::vector<Vec>& v) {
    const int d = static_cast<int>(v.size()) - 1;
    Matrix e(d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            e(i, j) = v[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(i)] - v[0][static_cast<std::size_t>(i)];
        }
    }
    SimplexMoments s;
    s.volume = std::abs(determinant(e)) / std::tgamma(d + 1.0);
    Vec sum(static_cast<std::size_t>(d), 0.0);
    Matrix outer(d);
    for (const auto& p : v) {
        for (int i = 0; i < d; ++i) {
            sum[static_cast<std::size_t>(i)] += p[static_cast<std::size_t>(i)];
            for (int j = 0; j < d; ++j) {
                outer(i, j) += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(j)];
            }
        }
    }
    s.first.assign(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) {
        s.first[static_cast<std::size_t>(i)] = s.volume * sum[static_cast<std::size_t>(i)] / (d + 1.0);
    }
    s.second = Matrix(d);
    const double c = s.volume / ((d + 1.0) * (d + 2.0));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            s.second(i, j) = c * (outer(i, j) + sum[static_cast<std::size_t>(i)] * sum[static_cast<std::size_t>(j)]);
        }
    }
    return s;
}

/// A convex body: polytope (kept in both H and V form) or ellipsoid
/// {x : (x - c)^T S^{-1} (x - c) <= 1}.
class ConvexBody {
public:
    static ConvexBody v_polytope(std::vector<Vec> points) {
        detail::require(!points.empty(), "v_polytope: no points");
        const int d = static_cast<int>(points.front().size());
        for (const auto& p : points) {
            detail::require(static_cast<int>(p.size()) == d, "v_polytope: dimension mismatch");
        }
        ConvexBody k;
        k.kind_ = BodyKind::v_polytope;
        k.dim_ = d;
        k.halfspaces_ = detail::facets_of(points, d);
        k.vertices_ = detail::vertices_of(k.halfspaces_, d);
        detail::require(static_cast<int>(k.vertices_.size()) >= d + 1, "v_polytope: empty interior");
        k.finish_polytope();
        return k;
    }

    static ConvexBody h_polytope(std::vector<Halfspace> hs) {
        detail::require(!hs.empty(), "h_polytope: no halfspaces");
        const int d = static_cast<int>(hs.front().normal.size());
        ConvexBody k;
        k.kind_ = BodyKind::h_polytope;
        k.dim_ = d;
        if (!bounded(hs, d)) {
            throw InvalidArgument("h_polytope: unbounded body");
        }
        k.halfspaces_ = std::move(hs);
        k.vertices_ = detail::vertices_of(k.halfspaces_, d);
        detail::require(static_cast<int>(k.vertices_.size()) >= d + 1, "h_polytope: empty interior");
        k.finish_polytope();
        return k;
    }

    static ConvexBody ellipsoid(Vec center, Matrix shape) {
        const int d = static_cast<int>(center.size());
        detail::require(d >= 1 && shape.size() == d, "ellipsoid: dimension mismatch");
        const auto eig = symmetric_eigen(shape);
        detail::require(eig.values.front() > 0.0, "ellipsoid: shape matrix must be positive definite");
        ConvexBody k;
        k.kind_ = BodyKind::ellipsoid;
        k.dim_ = d;
        k.center_ = std::move(center);
        k.shape_ = shape;
        k.shape_inv_ = Matrix(d);
        for (int j = 0; j < d; ++j) {
            std::vector<double> col(static_cast<std::size_t>(d), 0.0);
            col[static_cast<std::size_t>(j)] = 1.0;
            solve_linear(shape, col, 0.0);
            for (int i = 0; i < d; ++i) {
                k.shape_inv_(i, j) = col[static_cast<std::size_t>(i)];
            }
        }
        k.volume_ = unit_ball_volume(d) * std::sqrt(determinant(shape));
        Matrix m = (1.0 / (d + 2.0)) * shape;
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                m(i, j) += k.center_[static_cast<std::size_t>(i)] * k.center_[static_cast<std::size_t>(j)];
            }
        }
        k.centroid_ = k.center_;
        k.second_ = m;
        return k;
    }

    static ConvexBody ball(int d, double radius = 1.0) {
        return ellipsoid(Vec(static_cast<std::size_t>(d), 0.0), (radius * radius) * Matrix::identity(d));
    }

    /// [-1/2, 1/2]^d.
    static ConvexBody cube(int d) {
        std::vector<Halfspace> hs;
        for (int i = 0; i < d; ++i) {
            Vec n(static_cast<std::size_t>(d), 0.0);
            n[static_cast<std::size_t>(i)] = 1.0;
            hs.push_back({n, 0.5});
            n[static_cast<std::size_t>(i)] = -1.0;
            hs.push_back({n, 0.5});
        }
        return h_polytope(std::move(hs));
    }

    /// conv(0, e_1, ..., e_d) translated so that its barycenter is the origin.
    static ConvexBody simplex(int d) {
        std::vector<Vec> pts;
        const double c = 1.0 / (d + 1.0);
        pts.emplace_back(static_cast<std::size_t>(d), -c);
        for (int i = 0; i < d; ++i) {
            Vec v(static_cast<std::size_t>(d), -c);
            v[static_cast<std::size_t>(i)] += 1.0;
            pts.push_back(v);
        }
        return v_polytope(std::move(pts));
    }

    [[nodiscard]] BodyKind kind() const { return kind_; }
    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] bool is_polytope() const { return kind_ != BodyKind::ellipsoid; }
    [[nodiscard]] const std::vector<Vec>& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
    [[nodiscard]] const Matrix& shape() const { return shape_; }
    [[nodiscard]] const Vec& center() const { return center_; }

    [[nodiscard]] bool contains(std::span<const double> x, double tol = 1e-12) const {
        if (is_polytope()) {
            for (const auto& h : halfspaces_) {
                if (dot(h.normal, x) > h.offset + tol) {
                    return false;
                }
            }
            return true;
        }
        double q = 0.0;
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j < dim_; ++j) {
                q += (x[static_cast<std::size_t>(i)] - center_[static_cast<std::size_t>(i)]) * shape_inv_(i, j) *
                     (x[static_cast<std::size_t>(j)] - center_[static_cast<std::size_t>(j)]);
            }
        }
        return q <= 1.0 + tol;
    }

    [[nodiscard]] double volume() const { return volume_; }
    [[nodiscard]] const Vec& centroid() const { return centroid_; }

    /// (1/|K|) int_K x x^T dx (not centered).
    [[nodiscard]] const Matrix& second_moments() const { return second_; }

    /// h_K(u) = max over K of <x, u>.
    [[nodiscard]] double support(std::span<const double> u) const {
        if (is_polytope()) {
            double m = -std::numeric_limits<double>::infinity();
            for (const auto& v : vertices_) {
                m = std::max(m, dot(v, u));
            }
            return m;
        }
        double q = 0.0;
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j < dim_; ++j) {
                q += u[static_cast<std::size_t>(i)] * shape_(i, j) * u[static_cast<std::size_t>(j)];
            }
        }
        return dot(center_, u) + std::sqrt(q);
    }

    /// Axis-aligned bounding box as (lo, hi).
    [[nodiscard]] std::pair<Vec, Vec> bounding_box() const {
        Vec lo(static_cast<std::size_t>(dim_));
        Vec hi(static_cast<std::size_t>(dim_));
        for (int i = 0; i < dim_; ++i) {
            Vec e(static_cast<std::size_t>(dim_), 0.0);
            e[static_cast<std::size_t>(i)] = 1.0;
            hi[static_cast<std::size_t>(i)] = support(e);
            e[static_cast<std::size_t>(i)] = -1.0;
            lo[static_cast<std::size_t>(i)] = -support(e);
        }
        return {lo, hi};
    }

    /// Image under x -> A x (A invertible).
    [[nodiscard]] ConvexBody transformed(const Matrix& a) const {
        detail::require(a.size() == dim_, "transformed: dimension mismatch");
        if (is_polytope()) {
            std::vector<Vec> pts;
            for (const auto& v : vertices_) {
                Vec w(static_cast<std::size_t>(dim_), 0.0);
                for (int i = 0; i < dim_; ++i) {
                    for (int j = 0; j < dim_; ++j) {
                        w[static_cast<std::size_t>(i)] += a(i, j) * v[static_cast<std::size_t>(j)];
                    }
                }
                pts.push_back(w);
            }
            return v_polytope(std::move(pts));
        }
        Vec c(static_cast<std::size_t>(dim_), 0.0);
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j < dim_; ++j) {
                c[static_cast<std::size_t>(i)] += a(i, j) * center_[static_cast<std::size_t>(j)];
            }
        }
        return ellipsoid(c, multiply(multiply(a, shape_), transpose(a)));
    }

    [[nodiscard]] ConvexBody scaled(double t) const { return transformed(t * Matrix::identity(dim_)); }

    [[nodiscard]] ConvexBody translated(const Vec& by) const {
        if (is_polytope()) {
            std::vector<Vec> pts;
            for (const auto& v : vertices_) {
                Vec w = v;
                for (std::size_t i = 0; i < w.size(); ++i) {
                    w[i] += by[i];
                }
                pts.push_back(w);
            }
            return v_polytope(std::move(pts));
        }
        Vec c = center_;
        for (std::size_t i = 0; i < c.size(); ++i) {
            c[i] += by[i];
        }
        return ellipsoid(c, shape_);
    }

    /// Rescaled copy with volume one.
    [[nodiscard]] ConvexBody volume_normalized() const { return scaled(std::pow(volume_, -1.0 / dim_)); }

    /// Largest r with r B contained in K (0 must be interior).
    [[nodiscard]] double inradius() const {
        if (is_polytope()) {
            double r = std::numeric_limits<double>::infinity();
            for (const auto& h : halfspaces_) {
                r = std::min(r, h.offset / norm2(h.normal));
            }
            return r;
        }
        detail::require(norm2(center_) <= 1e-12, "inradius: ellipsoid must be centered");
        return std::sqrt(symmetric_eigen(shape_).values.front());
    }

    /// Smallest R with K contained in R B.
    [[nodiscard]] double circumradius() const {
        if (is_polytope()) {
            double r = 0.0;
            for (const auto& v : vertices_) {
                r = std::max(r, norm2(v));
            }
            return r;
        }
        detail::require(norm2(center_) <= 1e-12, "circumradius: ellipsoid must be centered");
        return std::sqrt(symmetric_eigen(shape_).values.back());
    }

    [[nodiscard]] bool origin_interior() const {
        if (is_polytope()) {
            for (const auto& h : halfspaces_) {
                if (!(h.offset > 1e-12 * norm2(h.normal))) {
                    return false;
                }
            }
            return true;
        }
        const Vec zero(static_cast<std::size_t>(dim_), 0.0);
        return contains(zero, -1e-12);
    }

private:
    static bool bounded(const std::vector<Halfspace>& hs, int d) {
        // max +-x_i over the polyhedron, with x = x+ - x- and slacks.
        const std::size_t m = hs.size();
        const std::size_t n = 2 * static_cast<std::size_t>(d) + m;
        std::vector<std::vector<double>> a(m, std::vector<double>(n, 0.0));
        std::vector<double> b(m);
        for (std::size_t r = 0; r < m; ++r) {
            detail::require(static_cast<int>(hs[r].normal.size()) == d, "h_polytope: dimension mismatch");
            for (int i = 0; i < d; ++i) {
                a[r][static_cast<std::size_t>(i)] = hs[r].normal[static_cast<std::size_t>(i)];
                a[r][static_cast<std::size_t>(d + i)] = -hs[r].normal[static_cast<std::size_t>(i)];
            }
            a[r][2 * static_cast<std::size_t>(d) + r] = 1.0;
            b[r] = hs[r].offset;
        }
        for (int i = 0; i < d; ++i) {
            for (double sign : {1.0, -1.0}) {
                std::vector<double> c(n, 0.0);
                c[static_cast<std::size_t>(i)] = -sign;
                c[static_cast<std::size_t>(d + i)] = sign;
                const auto res = solve_lp<double>(a, b, c);
                if (res.status == LpStatus::infeasible) {
                    throw InvalidArgument("h_polytope: empty body");
                }
                if (res.status == LpStatus::unbounded) {
                    return false;
                }
            }
        }
        return true;
    }

    void finish_polytope() {
        const int d = dim_;
        const double tol = detail::geom_tol * detail::point_scale(vertices_);
        Vec c(static_cast<std::size_t>(d), 0.0);
        for (const auto& v : vertices_) {
            for (int i = 0; i < d; ++i) {
                c[static_cast<std::size_t>(i)] += v[static_cast<std::size_t>(i)] / static_cast<double>(vertices_.size());
            }
        }
        CompensatedSum vol;
        std::vector<CompensatedSum> first(static_cast<std::size_t>(d));
        std::vector<CompensatedSum> second(static_cast<std::size_t>(d * d));
        auto accumulate = [&](const std::vector<Vec>& simplex) {
            const auto s = simplex_moments(simplex);
            vol.add(s.volume);
            for (int i = 0; i < d; ++i) {
                first[static_cast<std::size_t>(i)].add(s.first[static_cast<std::size_t>(i)]);
                for (int j = 0; j < d; ++j) {
                    second[static_cast<std::size_t>(i * d + j)].add(s.second(i, j));
                }
            }
        };
        for (const auto& h : halfspaces_) {
            std::vector<Vec> face;
            for (const auto& v : vertices_) {
                if (std::abs(dot(h.normal, v) - h.offset) <= tol * std::max(1.0, norm2(h.normal))) {
                    face.push_back(v);
                }
            }
            if (static_cast<int>(face.size()) < d) {
                continue;
            }
            if (d == 1 || d == 2) {
                std::vector<Vec> s{c};
                s.insert(s.end(), face.begin(), face.end());
                accumulate(s);
            } else {
                // Order the facet polygon by angle in its plane, then fan.
                Vec fc(3, 0.0);
                for (const auto& v : face) {
                    for (int i = 0; i < 3; ++i) {
                        fc[static_cast<std::size_t>(i)] += v[static_cast<std::size_t>(i)] / static_cast<double>(face.size());
                    }
                }
                Vec n = h.normal;
                const double nl = norm2(n);
                for (double& x : n) {
                    x /= nl;
                }
                Vec e1 = detail::sub(face.front(), fc);
                const double l1 = norm2(e1);
                for (double& x : e1) {
                    x /= l1;
                }
                const Vec e2 = detail::cross3(n, e1);
                std::sort(face.begin(), face.end(), [&](const Vec& a, const Vec& b) {
                    const Vec da = detail::sub(a, fc);
                    const Vec db = detail::sub(b, fc);
                    return std::atan2(dot(da, e2), dot(da, e1)) < std::atan2(dot(db, e2), dot(db, e1));
                });
                for (std::size_t i = 1; i + 1 < face.size(); ++i) {
                    accumulate({c, face[0], face[i], face[i + 1]});
                }
            }
        }
        volume_ = vol.value();
        detail::require(volume_ > 0.0, "polytope: zero volume");
        centroid_.assign(static_cast<std::size_t>(d), 0.0);
        second_ = Matrix(d);
        for (int i = 0; i < d; ++i) {
            centroid_[static_cast<std::size_t>(i)] = first[static_cast<std::size_t>(i)].value() / volume_;
            for (int j = 0; j < d; ++j) {
                second_(i, j) = second[static_cast<std::size_t>(i * d + j)].value() / volume_;
            }
        }
    }

    BodyKind kind_ = BodyKind::h_polytope;
    int dim_ = 0;
    std::vector<Vec> vertices_;
    std::vector<Halfspace> halfspaces_;
    Vec center_;
    Matrix shape_;
    Matrix shape_inv_;
    double volume_ = 0.0;
    Vec centroid_;
    Matrix second_;
};

/// Registry: cube{d}, ball{d, radius}, simplex{d}.
inline ConvexBody make_body(const std::string& name, const Params& p) {
    const int d = static_cast<int>(detail::param(p, "d", 2.0));
    if (name == "cube") {
        return ConvexBody::cube(d);
    }
    if (name == "ball") {
        return ConvexBody::ball(d, detail::param(p, "radius", 1.0));
    }
    if (name == "simplex") {
        return ConvexBody::simplex(d);
    }
    throw InvalidArgument("make_body: unknown body '" + name + "'");
}

/// Random polytope: hull of `n` Gaussian points in R^d, translated to put its barycenter at 0.
inline ConvexBody random_centered_polytope(int d, int n, SplitMix64& rng) {
    std::vector<Vec> pts;
    for (int i = 0; i < n; ++i) {
        Vec v(static_cast<std::size_t>(d));
        for (double& x : v) {
            x = rng.normal();
        }
        pts.push_back(v);
    }
    const auto k = ConvexBody::v_polytope(pts);
    Vec shift = k.centroid();
    for (double& x : shift) {
        x = -x;
    }
    return k.translated(shift);
}

// ---------------------------------------------------------------------------
// Second moments and radius bounds

struct KlsReport {
    double lhs = 0.0;     // h_K(u)^2 / (d (d+2))
    double mid = 0.0;     // (1/|K|) int_K <x,u>^2
    double rhs = 0.0;     // d/(d+2) h_K(u)^2
    double mid_stderr = 0.0;  // 0 for exact moments
    bool holds = false;   // lhs <= mid <= rhs, with 3 standard errors of slack for Monte Carlo
};

enum class MomentMethod { exact, monte_carlo };

/// Monte Carlo estimate of (1/|K|) int_K <x,u>^2 by rejection in the bounding box.
inline std::pair<double, double> monte_carlo_directional_moment(const ConvexBody& k, std::span<const double> u,
                                                                std::size_t samples, std::uint64_t seed) {
    const auto [lo, hi] = k.bounding_box();
    SplitMix64 rng(seed);
    Vec x(static_cast<std::size_t>(k.dim()));
    CompensatedSum s1;
    CompensatedSum s2;
    std::size_t accepted = 0;
    for (std::size_t t = 0; t < samples; ++t) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = rng.uniform(lo[i], hi[i]);
        }
        if (!k.contains(x)) {
            continue;
        }
        ++accepted;
        const double v = dot(x, u) * dot(x, u);
        s1.add(v);
        s2.add(v * v);
    }
    detail::require(accepted > 1, "monte_carlo_directional_moment: no accepted samples");
    const double n = static_cast<double>(accepted);
    const double mean = s1.value() / n;
    const double var = std::max(0.0, s2.value() / n - mean * mean);
    return {mean, std::sqrt(var / (n - 1.0))};
}

inline KlsReport kls_second_moment_check(const ConvexBody& k, std::span<const double> direction,
                                         MomentMethod method = MomentMethod::exact,
                                         std::size_t mc_samples = 200000, std::uint64_t seed = 12345) {
    const int d = k.dim();
    detail::require(static_cast<int>(direction.size()) == d, "kls_second_moment_check: dimension mismatch");
    double scale = std::sqrt(std::max(1e-300, k.second_moments()(0, 0)));
    if (norm2(k.centroid()) > 1e-9 * std::max(1.0, scale)) {
        throw InvalidArgument("kls_second_moment_check: body is not centered");
    }
    Vec u(direction.begin(), direction.end());
    const double len = norm2(u);
    detail::require(len > 0.0, "kls_second_moment_check: zero direction");
    for (double& x : u) {
        x /= len;
    }
    KlsReport r;
    const double h = k.support(u);
    r.lhs = h * h / (d * (d + 2.0));
    r.rhs = d / (d + 2.0) * h * h;
    if (method == MomentMethod::exact) {
        const Matrix& m = k.second_moments();
        double q = 0.0;
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                q += u[static_cast<std::size_t>(i)] * m(i, j) * u[static_cast<std::size_t>(j)];
            }
        }
        r.mid = q;
    } else {
        std::tie(r.mid, r.mid_stderr) = monte_carlo_directional_moment(k, u, mc_samples, seed);
    }
    const double slack = 3.0 * r.mid_stderr + 1e-12 * std::max(1.0, r.rhs);
    r.holds = r.lhs <= r.mid + slack && r.mid <= r.rhs + slack;
    return r;
}

struct RadiusReport {
    double r = 0.0;
    double big_r = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double upper_bound = 0.0;  // (d+1) sqrt(lambda_max), bounds R
    double lower_bound = 0.0;  // sqrt((d+2)/d) sqrt(lambda_min), bounded by r
    bool holds = false;
};

/// Inradius and circumradius against the eigenvalues of int_K y y^T for |K| = 1.
inline RadiusReport radius_bounds_check(const ConvexBody& k, double volume_tol = 1e-9) {
    if (std::abs(k.volume() - 1.0) > volume_tol) {
        throw InvalidArgument("radius_bounds_check: body must have volume one");
    }
    if (!k.origin_interior()) {
        throw InvalidArgument("radius_bounds_check: origin must be interior");
    }
    const int d = k.dim();
    RadiusReport rep;
    rep.r = k.inradius();
    rep.big_r = k.circumradius();
    const Matrix cov = k.volume() * k.second_moments();
    const auto eig = symmetric_eigen(cov);
    rep.lambda_min = eig.values.front();
    rep.lambda_max = eig.values.back();
    rep.upper_bound = (d + 1.0) * std::sqrt(rep.lambda_max);
    rep.lower_bound = std::sqrt((d + 2.0) / d) * std::sqrt(rep.lambda_min);
    rep.holds = rep.big_r <= rep.upper_bound * (1.0 + 1e-12) && rep.r >= rep.lower_bound * (1.0 - 1e-12);
    return rep;
}

// ---------------------------------------------------------------------------
// Ball bodies

struct RadialProfile {
    std::vector<Vec> directions;
    std::vector<double> radii;
};

struct InclusionConstants {
    double p = 0.0;
    double q = 0.0;
    double lower = 0.0;  // Gamma(p+1)^(1/p) / Gamma(q+1)^(1/q)
    double upper = 0.0;  // e^(d/p - d/q)
};

inline InclusionConstants inclusion_constants(int d, double p, double q) {
    detail::require(d >= 1, "inclusion_constants: d must be >= 1");
    detail::require(p > 0.0 && p < q, "inclusion_constants: need 0 < p < q");
    InclusionConstants c;
    c.p = p;
    c.q = q;
    c.lower = std::exp(std::lgamma(p + 1.0) / p - std::lgamma(q + 1.0) / q);
    c.upper = std::exp(d / p - d / q);
    return c;
}

struct RadialConstants {
    double c1 = 0.0;       // min of the lower inclusion constants at (d, d+1), (d+1, d+2)
    double c2 = 0.0;       // max of the upper ones
    double c_prime = 0.0;  // c1^(d+2) / (sqrt(2 pi) e^(3/2))
    double c_upper = 0.0;  // (d+1) c2^(d+2) L_d
    double c_d = 0.0;      // 3^(1/d) c_upper, the concentration radius constant
};

inline RadialConstants radial_constants(int d, double l_d = 1.0) {
    const auto a = inclusion_constants(d, d, d + 1.0);
    const auto b = inclusion_constants(d, d + 1.0, d + 2.0);
    RadialConstants r;
    r.c1 = std::min(a.lower, b.lower);
    r.c2 = std::max(a.upper, b.upper);
    r.c_prime = std::pow(r.c1, d + 2.0) / (std::sqrt(2.0 * std::numbers::pi) * std::exp(1.5));
    r.c_upper = (d + 1.0) * std::pow(r.c2, d + 2.0) * l_d;
    r.c_d = std::pow(3.0, 1.0 / d) * r.c_upper;
    return r;
}

namespace detail {

inline double radial_moment(const ContinuousDensity& f, std::span<const double> theta, double power) {
    const double scale = f.scale > 0.0 ? f.scale : 1.0;
    Vec x(theta.size());
    auto g = [&](double r) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = r * theta[i];
        }
        return (power == 0.0 ? 1.0 : std::pow(r, power)) * f(x);
    };
    return integrate_to_infinity(g, 0.0, scale);
}

inline Vec unit(std::span<const double> v) {
    Vec u(v.begin(), v.end());
    const double n = norm2(u);
    detail::require(n > 0.0, "direction must be nonzero");
    for (double& x : u) {
        x /= n;
    }
    return u;
}

} // namespace detail

/// rho(theta) = ((1/f(0)) int_0^inf p r^(p-1) f(r theta) dr)^(1/p).
inline RadialProfile ball_body_radial(const ContinuousDensity& f, double p, const std::vector<Vec>& dirs) {
    detail::require(p > 0.0, "ball_body_radial: p must be positive");
    const Vec zero(static_cast<std::size_t>(f.dim), 0.0);
    const double f0 = f(zero);
    if (!(f0 > 0.0)) {
        throw InvalidArgument("ball_body_radial: f(0) must be positive");
    }
    RadialProfile prof;
    for (const auto& d : dirs) {
        detail::require(static_cast<int>(d.size()) == f.dim, "ball_body_radial: direction dimension mismatch");
        const Vec u = detail::unit(d);
        const double integral = p * detail::radial_moment(f, u, p - 1.0);
        const double rho = std::pow(integral / f0, 1.0 / p);
        if (!(rho > 0.0) || !std::isfinite(rho)) {
            throw NumericalError("ball_body_radial: non-finite radius");
        }
        prof.directions.push_back(u);
        prof.radii.push_back(rho);
    }
    return prof;
}

struct InclusionCheck {
    InclusionConstants constants;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    bool holds = false;
};

/// lower <= rho_{K_p}(theta) / rho_{K_q}(theta) <= upper on every direction.
inline InclusionCheck check_inclusions(const ContinuousDensity& f, double p, double q, const std::vector<Vec>& dirs) {
    InclusionCheck c;
    c.constants = inclusion_constants(f.dim, p, q);
    const auto rp = ball_body_radial(f, p, dirs);
    const auto rq = ball_body_radial(f, q, dirs);
    c.min_ratio = std::numeric_limits<double>::infinity();
    c.max_ratio = 0.0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        const double r = rp.radii[i] / rq.radii[i];
        c.min_ratio = std::min(c.min_ratio, r);
        c.max_ratio = std::max(c.max_ratio, r);
    }
    c.holds = c.constants.lower <= c.min_ratio * (1.0 + 1e-12) && c.max_ratio <= c.constants.upper * (1.0 + 1e-12);
    return c;
}

struct RadialIntegralReport {
    std::vector<double> integrals;  // I(theta) = int_0^inf d r^(d-1) f(r theta) dr
    double f0 = 0.0;
    RadialConstants constants;
    // Isotropic form: C' <= I^(1/d) <= C.
    double min_root = 0.0;
    double max_root = 0.0;
    bool isotropic_holds = false;
    // Anisotropic form: I / (f(0) lambda_min^(d/2)) and I / (f(0) lambda_max^(d/2)).
    std::optional<double> min_ratio_lambda_min;
    std::optional<double> max_ratio_lambda_min;
    std::optional<double> min_ratio_lambda_max;
    std::optional<double> max_ratio_lambda_max;
};

/// Radial integrals along `dirs`, compared with the dimensional constants (isotropic
/// form) and, when covariance eigenvalues are given, with f(0) lambda^(d/2).
inline RadialIntegralReport radial_integral_bounds(const ContinuousDensity& f, const std::vector<Vec>& dirs,
                                                   double l_d = 1.0,
                                                   std::optional<std::pair<double, double>> eigen_range = std::nullopt) {
    const int d = f.dim;
    RadialIntegralReport rep;
    rep.constants = radial_constants(d, l_d);
    const Vec zero(static_cast<std::size_t>(d), 0.0);
    rep.f0 = f(zero);
    if (!(rep.f0 > 0.0)) {
        throw InvalidArgument("radial_integral_bounds: f(0) must be positive");
    }
    rep.min_root = std::numeric_limits<double>::infinity();
    for (const auto& dir : dirs) {
        const Vec u = detail::unit(dir);
        const double i = d * detail::radial_moment(f, u, d - 1.0);
        rep.integrals.push_back(i);
        const double root = std::pow(i, 1.0 / d);
        rep.min_root = std::min(rep.min_root, root);
        rep.max_root = std::max(rep.max_root, root);
    }
    rep.isotropic_holds = rep.constants.c_prime <= rep.min_root && rep.max_root <= rep.constants.c_upper;
    if (eigen_range) {
        const auto [lmin, lmax] = *eigen_range;
        detail::require(lmin > 0.0 && lmin <= lmax, "radial_integral_bounds: invalid eigenvalue range");
        const double lo = rep.f0 * std::pow(lmin, 0.5 * d);
        const double hi = rep.f0 * std::pow(lmax, 0.5 * d);
        const auto [mn, mx] = std::minmax_element(rep.integrals.begin(), rep.integrals.end());
        rep.min_ratio_lambda_min = *mn / lo;
        rep.max_ratio_lambda_min = *mx / lo;
        rep.min_ratio_lambda_max = *mn / hi;
        rep.max_ratio_lambda_max = *mx / hi;
    }
    return rep;
}

} // namespace lce

#endif // LCE_GEOMETRY_HPP
