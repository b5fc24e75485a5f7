// Acceptance suite: one PASS/FAIL line per criterion. `--only N` runs a single
// criterion; the exit status is nonzero when any executed criterion fails.

#include "lce/lce.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace lce;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

LatticePmf gaussian_1d(double sigma) { return quantize_density(make_gaussian(sigma, 1), IndexVector{0}); }

LatticePmf from_values(IndexVector lo, IndexVector hi, std::vector<double> v) {
    const double s = compensated_total(v);
    for (auto& x : v) {
        x /= s;
    }
    return {BoxDomain(std::move(lo), std::move(hi)), std::move(v)};
}

LatticePmf random_box_pmf(int d, std::int64_t side, SplitMix64& rng) {
    const BoxDomain box(IndexVector(static_cast<std::size_t>(d), 0), IndexVector(static_cast<std::size_t>(d), side - 1));
    std::vector<double> v(box.cell_count());
    for (auto& x : v) {
        x = rng.uniform(0.0, 1.0);
    }
    return from_values(box.lo(), box.hi(), std::move(v));
}

// ---- 1 ------------------------------------------------------------------

Outcome smoothing_identity() {
    SplitMix64 rng(101);
    std::vector<LatticePmf> ps;
    ps.push_back(LatticePmf::point_mass(IndexVector{0}));
    ps.push_back(LatticePmf::point_mass(IndexVector{3, -2}));
    ps.push_back(make_uniform_on_set(LatticeSet(1, {IndexVector{0}, IndexVector{1}, IndexVector{2}})));
    ps.push_back(make_uniform_on_set(LatticeSet(2, {IndexVector{0, 0}, IndexVector{1, 1}})));
    ps.push_back(make_uniform_on_set(LatticeSet::from_box(BoxDomain(IndexVector{0, 0}, IndexVector{3, 2}))));
    for (double s : {0.7, 2.0, 5.0, 11.0}) {
        ps.push_back(gaussian_1d(s));
    }
    for (double s : {1.0, 3.0}) {
        ps.push_back(quantize_density(make_gaussian(s, 2), IndexVector{0, 0}));
    }
    ps.push_back(quantize_density(make_laplace_product(0.8, 1), IndexVector{0}, 40.0));
    ps.push_back(family_factor("binomial", {}, 2.0));
    for (int d = 1; d <= 3; ++d) {
        ps.push_back(random_box_pmf(d, 4, rng));
        ps.push_back(random_box_pmf(d, 3, rng));
    }
    ps.push_back(random_box_pmf(1, 40, rng));
    ps.push_back(random_box_pmf(2, 9, rng));
    ps.push_back(make_product({gaussian_1d(1.5), family_factor("uniform", {}, 2.0)}));
    double worst = 0.0;
    for (const auto& p : ps) {
        worst = std::max(worst, std::abs(differential_entropy(p, 1) - shannon_entropy(p)));
    }
    return {worst < 1e-9 && ps.size() >= 20, fmt("max |h(S+U) - H(S)| = %.3e over %zu p.m.f.s", worst, ps.size())};
}

// ---- 2 ------------------------------------------------------------------

Outcome exact_entropy_values() {
    const double h1 = differential_entropy(LatticePmf::point_mass(IndexVector{0}), 2);
    const double h2 = differential_entropy(LatticePmf::point_mass(IndexVector{0, 0}), 2);
    const bool ok = std::abs(h1 - 0.5) <= 1e-6 && std::abs(h2 - 1.0) <= 1e-6;
    return {ok, fmt("d=1: %.10f (target 0.5), d=2: %.10f (target 1.0)", h1, h2)};
}

// ---- 3 ------------------------------------------------------------------

Outcome discrete_ub_scale() {
    bool ok = true;
    std::string rows;
    double worst = 0.0;
    for (int d : {1, 2}) {
        for (double s : {2.0, 4.0, 8.0, 16.0, 32.0}) {
            const auto p = quantize_density(make_gaussian(s, d), IndexVector(static_cast<std::size_t>(d), 0));
            const auto m = discrete_moments(p);
            const double ratio = m.max_value * std::sqrt(m.det_cov);
            worst = std::max(worst, ratio);
            ok = ok && ratio <= 1.0;
            if (s == 32.0) {
                const double target = std::pow(2.0 * std::numbers::pi, -0.5 * d);
                const double rel = std::abs(ratio - target) / target;
                ok = ok && rel <= 0.02;
                rows += fmt("d=%d sigma=32 ratio %.6f vs %.6f (rel %.1e); ", d, ratio, target, rel);
            }
        }
    }
    return {ok, rows + fmt("max ratio over sweep %.6f", worst)};
}

// ---- 4 ------------------------------------------------------------------

LatticePmf truncated_geometric(double q) {
    // Truncated where the remaining tail q^K drops below 1e-17.
    const auto count = static_cast<std::size_t>(std::ceil(std::log(1e-17) / std::log(q)));
    std::vector<double> v(count);
    for (std::size_t k = 0; k < count; ++k) {
        v[k] = (1.0 - q) * std::pow(q, static_cast<double>(k));
    }
    const auto hi = static_cast<std::int64_t>(count) - 1;
    return {BoxDomain(IndexVector{0}, IndexVector{hi}), std::move(v), std::pow(q, static_cast<double>(count))};
}

LatticePmf two_sided_geometric(double q) {
    const auto g = truncated_geometric(q);
    std::vector<double> v(g.values().begin(), g.values().end());
    const auto k = static_cast<std::int64_t>(v.size()) - 1;
    std::vector<double> w(2 * v.size() - 1);
    for (std::int64_t i = -k; i <= k; ++i) {
        w[static_cast<std::size_t>(i + k)] = v[static_cast<std::size_t>(std::abs(i))];
    }
    return from_values(IndexVector{-k}, IndexVector{k}, std::move(w));
}

LatticePmf binomial(int n, double p) {
    std::vector<double> v(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        v[static_cast<std::size_t>(k)] = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                                                  k * std::log(p) + (n - k) * std::log1p(-p));
    }
    return {BoxDomain(IndexVector{0}, IndexVector{n}), std::move(v)};
}

LatticePmf poisson(double lambda) {
    std::vector<double> v;
    for (int k = 0; k <= lambda || v.back() > 1e-20; ++k) {
        v.push_back(std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0)));
    }
    const auto hi = static_cast<std::int64_t>(v.size()) - 1;
    const double tail = std::max(0.0, 1.0 - compensated_total(v));
    return {BoxDomain(IndexVector{0}, IndexVector{hi}), std::move(v), tail};
}

Outcome spread_d1() {
    std::vector<std::pair<std::string, LatticePmf>> cases;
    for (double q : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        cases.emplace_back(fmt("geometric(%.2f)", q), truncated_geometric(q));
    }
    for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        cases.emplace_back(fmt("two-sided geometric(%.1f)", q), two_sided_geometric(q));
    }
    for (int n : {1, 2, 5, 10, 20, 50}) {
        for (double p : {0.1, 0.3, 0.5}) {
            cases.emplace_back(fmt("binomial(%d,%.1f)", n, p), binomial(n, p));
        }
    }
    for (int m = 1; m <= 10; ++m) {
        cases.emplace_back(fmt("uniform(%d)", m), family_factor("uniform", {}, std::sqrt((m * m - 1.0) / 12.0)));
    }
    for (double l : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        cases.emplace_back(fmt("poisson(%.1f)", l), poisson(l));
    }
    for (double s : {0.3, 0.5, 1.0, 2.0, 5.0}) {
        cases.emplace_back(fmt("gaussian(%.1f)", s), gaussian_1d(s));
    }
    int violations = 0;
    int not_extensible = 0;
    double worst = 0.0;
    std::string worst_name;
    double alt_worst = 0.0;
    for (const auto& [name, p] : cases) {
        if (!is_log_concave_extensible(p).is_extensible) {
            ++not_extensible;
            continue;
        }
        const double r = spread_ratio(p);
        const auto m = discrete_moments(p);
        alt_worst = std::max(alt_worst, m.max_value * std::sqrt(1.0 + m.cov(0, 0)));
        if (r > worst) {
            worst = r;
            worst_name = name;
        }
        if (r > 1.0 + 1e-9) {
            ++violations;
        }
    }
    const bool ok = violations == 0 && not_extensible == 0 && cases.size() >= 50;
    return {ok, fmt("%zu instances, %d non-extensible, %d exceed 1 + 1e-9; worst %.6f at %s "
                    "(informational: max p sqrt(1 + sigma^2) peaks at %.6f)",
                    cases.size(), not_extensible, violations, worst, worst_name.c_str(), alt_worst)};
}

// ---- 5, 6 ----------------------------------------------------------------

ReportDocument sweep_report() {
    ExperimentConfig c;
    c.checks = {"epi", "diff_approx"};
    return run_config(c);
}

Outcome epi_gap(const ReportDocument& doc) {
    bool ok = true;
    double worst_deficit_large = 0.0;
    int points = 0;
    std::map<std::pair<int, int>, double> prev;
    for (const auto& r : doc.results) {
        if (r.check_id != "epi") {
            continue;
        }
        ++points;
        const double delta = r.measured.at("delta");
        const double deficit = std::max(0.0, -delta);
        if (r.sigma >= 8.0) {
            worst_deficit_large = std::max(worst_deficit_large, deficit);
            ok = ok && delta >= -1e-3;
        }
        const auto key = std::make_pair(r.d, r.n);
        if (prev.contains(key)) {
            ok = ok && deficit <= prev[key] + 1e-9;
        }
        prev[key] = deficit;
        ok = ok && r.status == CheckStatus::pass;
    }
    return {ok && points == 16, fmt("%d sweep points; max deficit at sigma >= 8: %.3e", points, worst_deficit_large)};
}

Outcome diff_rate(const ReportDocument& doc) {
    bool ok = true;
    std::string rows;
    for (int d : {1, 2}) {
        std::map<double, double> rate;
        for (const auto& r : doc.results) {
            if (r.check_id == "diff_approx" && r.d == d && r.n == 2) {
                rate[r.sigma] = r.measured.at("rate");
            }
        }
        ok = ok && rate.size() == 4 && rate[16.0] <= rate[4.0] && rate[32.0] <= rate[4.0];
        rows += fmt("d=%d rate: %.4g (4) %.4g (16) %.4g (32); ", d, rate[4.0], rate[16.0], rate[32.0]);
    }
    for (const auto& r : doc.results) {
        if (r.check_id == "diff_approx") {
            ok = ok && r.status == CheckStatus::pass;
        }
    }
    return {ok, rows};
}

// ---- 7 ------------------------------------------------------------------

BoxDomain lattice_window(const ContinuousDensity& f, double mult) {
    const auto half = static_cast<std::int64_t>(std::ceil(mult * f.scale)) + 2;
    return BoxDomain::centered(IndexVector(static_cast<std::size_t>(f.dim), 0), half);
}

Outcome lattice_integral_gaps() {
    bool ok = true;
    double worst_qc = 0.0;
    double worst_cov = 0.0;
    std::string det_rows;
    for (int d : {1, 2}) {
        std::vector<double> scaled;
        for (double s : {2.0, 4.0, 8.0}) {
            const auto f = make_gaussian(s, d);
            const auto g = lattice_vs_integral_gaps(f, lattice_window(f, 12.0));
            scaled.push_back(std::abs(g.det_gap) / std::pow(s, 2.0 * d - 1.0));
            if (d == 1) {
                const auto qc = quasi_concave_check_1d(f, lattice_window(f, 12.0));
                worst_qc = std::max(worst_qc, qc.gap / qc.max_f);
                ok = ok && qc.holds;
            }
        }
        // Envelope fitted at the smallest scale.
        ok = ok && scaled[1] <= scaled[0] + 1e-9 && scaled[2] <= scaled[0] + 1e-9;
        det_rows += fmt("d=%d |det gap|/sigma^(2d-1): %.2e %.2e %.2e; ", d, scaled[0], scaled[1], scaled[2]);
    }
    std::vector<ContinuousDensity> family;
    for (double s : {0.3, 0.7, 1.0, 2.5, 6.0}) {
        family.push_back(make_gaussian(s, 1));
        family.push_back(make_laplace_product(1.0 / s, 1));
        family.push_back(make_centered_exponential(1.0 / s));
        family.push_back(make_centered_uniform(s));
        family.push_back(make_logistic(s));
    }
    for (const auto& f : family) {
        const auto box = lattice_window(f, 60.0);
        const auto fm = first_moment_check_1d(f, box);
        worst_cov = std::max(worst_cov, fm.lhs / fm.rhs);
        ok = ok && fm.holds;
        const auto qc = quasi_concave_check_1d(f, box);
        ok = ok && qc.holds;
    }
    return {ok, det_rows + fmt("worst |sum-int|/max f %.2e; worst first-moment lhs/rhs %.3f over %zu densities", worst_qc,
                               worst_cov, family.size())};
}

// ---- 8 ------------------------------------------------------------------

using P2 = std::array<std::int64_t, 2>;

std::int64_t orient(const P2& a, const P2& b, const P2& c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

bool on_segment(const P2& a, const P2& b, const P2& z) {
    return orient(a, b, z) == 0 && std::min(a[0], b[0]) <= z[0] && z[0] <= std::max(a[0], b[0]) &&
           std::min(a[1], b[1]) <= z[1] && z[1] <= std::max(a[1], b[1]);
}

bool in_triangle(const P2& a, const P2& b, const P2& c, const P2& z) {
    const auto o1 = orient(a, b, z);
    const auto o2 = orient(b, c, z);
    const auto o3 = orient(c, a, z);
    return (o1 >= 0 && o2 >= 0 && o3 >= 0) || (o1 <= 0 && o2 <= 0 && o3 <= 0);
}

/// Definitional check: no lattice point of the bounding box outside A lies in conv(A).
bool brute_convex(const std::vector<P2>& a) {
    std::int64_t lo0 = a[0][0], hi0 = a[0][0], lo1 = a[0][1], hi1 = a[0][1];
    for (const auto& p : a) {
        lo0 = std::min(lo0, p[0]);
        hi0 = std::max(hi0, p[0]);
        lo1 = std::min(lo1, p[1]);
        hi1 = std::max(hi1, p[1]);
    }
    for (auto x = lo0; x <= hi0; ++x) {
        for (auto y = lo1; y <= hi1; ++y) {
            const P2 z{x, y};
            if (std::find(a.begin(), a.end(), z) != a.end()) {
                continue;
            }
            for (std::size_t i = 0; i < a.size(); ++i) {
                for (std::size_t j = i; j < a.size(); ++j) {
                    if (on_segment(a[i], a[j], z)) {
                        return false;
                    }
                    for (std::size_t k = j + 1; k < a.size(); ++k) {
                        if (orient(a[i], a[j], a[k]) != 0 && in_triangle(a[i], a[j], a[k], z)) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    return true;
}

/// Lower-envelope gap at every point by enumerating segments and triangles of the
/// other points that contain it.
std::vector<double> brute_gaps(const std::vector<P2>& pts, const std::vector<double>& v) {
    std::vector<double> gaps(pts.size(), 0.0);
    for (std::size_t t = 0; t < pts.size(); ++t) {
        const P2& z = pts[t];
        double best = INFINITY;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == t) continue;
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                if (j == t) continue;
                if (on_segment(pts[i], pts[j], z)) {
                    const double len = std::hypot(double(pts[j][0] - pts[i][0]), double(pts[j][1] - pts[i][1]));
                    const double lam = std::hypot(double(z[0] - pts[i][0]), double(z[1] - pts[i][1])) / len;
                    best = std::min(best, (1.0 - lam) * v[i] + lam * v[j]);
                }
                for (std::size_t k = j + 1; k < pts.size(); ++k) {
                    if (k == t) continue;
                    const auto area = orient(pts[i], pts[j], pts[k]);
                    if (area == 0 || !in_triangle(pts[i], pts[j], pts[k], z)) continue;
                    const double li = double(orient(pts[j], pts[k], z)) / double(area);
                    const double lj = double(orient(pts[k], pts[i], z)) / double(area);
                    const double lk = 1.0 - li - lj;
                    best = std::min(best, li * v[i] + lj * v[j] + lk * v[k]);
                }
            }
        }
        if (std::isfinite(best)) {
            gaps[t] = std::max(0.0, v[t] - best);
        }
    }
    return gaps;
}

LatticeSet to_set(const std::vector<P2>& a) {
    std::vector<IndexVector> pts;
    for (const auto& p : a) {
        pts.push_back(IndexVector{p[0], p[1]});
    }
    return {2, std::move(pts)};
}

std::vector<P2> random_subset(SplitMix64& rng, std::int64_t side, std::size_t max_size, bool halfplanes) {
    std::vector<P2> out;
    if (halfplanes) {
        const double a0 = rng.uniform(-1, 1), a1 = rng.uniform(-1, 1), b = rng.uniform(-1, 3);
        const double c0 = rng.uniform(-1, 1), c1 = rng.uniform(-1, 1), e = rng.uniform(-1, 3);
        for (std::int64_t x = 0; x <= side; ++x) {
            for (std::int64_t y = 0; y <= side; ++y) {
                if (a0 * x + a1 * y <= b && c0 * x + c1 * y <= e) {
                    out.push_back({x, y});
                }
            }
        }
    } else {
        const auto target = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(max_size)));
        while (out.size() < target) {
            const P2 p{rng.integer(0, side), rng.integer(0, side)};
            if (std::find(out.begin(), out.end(), p) == out.end()) {
                out.push_back(p);
            }
        }
    }
    if (out.size() > max_size) {
        out.resize(max_size);
    }
    if (out.empty()) {
        out.push_back({rng.integer(0, side), rng.integer(0, side)});
    }
    return out;
}

Outcome convexity_oracles() {
    SplitMix64 rng(808);
    int agree_sets = 0;
    int convex_count = 0;
    for (int t = 0; t < 200; ++t) {
        const auto a = random_subset(rng, 5, 36, t % 2 == 0);
        const bool oracle = brute_convex(a);
        const bool lib = is_zd_convex(to_set(a)).is_convex;
        agree_sets += oracle == lib ? 1 : 0;
        convex_count += oracle ? 1 : 0;
    }
    int agree_pmfs = 0;
    int extensible_count = 0;
    double worst_gap_diff = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto a = random_subset(rng, 3, 12, t % 2 == 0);
        std::vector<double> v(a.size());
        if (t % 3 == 0) {
            for (auto& x : v) {
                x = rng.uniform(0.0, 3.0);
            }
        } else {
            const double g0 = rng.uniform(-1, 1), g1 = rng.uniform(-1, 1), c = rng.uniform(0, 0.6);
            const double m0 = rng.uniform(0, 3), m1 = rng.uniform(0, 3);
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double x = double(a[i][0]), y = double(a[i][1]);
                v[i] = std::max(g0 * x + g1 * y, -g1 * x + g0 * y) + c * ((x - m0) * (x - m0) + (y - m1) * (y - m1)) +
                       rng.uniform(0.0, 0.05) * (t % 5 == 1 ? 1.0 : 0.0);
            }
        }
        // p proportional to exp(-v) on a.
        std::vector<double> mass(16, 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            total += std::exp(-v[i]);
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            mass[static_cast<std::size_t>(a[i][0] * 4 + a[i][1])] = std::exp(-v[i]) / total;
        }
        const LatticePmf p(BoxDomain(IndexVector{0, 0}, IndexVector{3, 3}), mass);
        std::vector<double> pot(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            pot[i] = -std::log(p.at(IndexVector{a[i][0], a[i][1]}));
        }
        const auto gaps = brute_gaps(a, pot);
        const bool oracle = brute_convex(a) && std::all_of(gaps.begin(), gaps.end(), [](double g) { return g <= 1e-9; });
        const auto lib = is_log_concave_extensible(p);
        const auto lp = envelope_gaps_lp(p);
        for (std::size_t i = 0; i < a.size(); ++i) {
            worst_gap_diff = std::max(worst_gap_diff, std::abs(lp.at(IndexVector{a[i][0], a[i][1]}) - gaps[i]));
        }
        agree_pmfs += oracle == lib.is_extensible ? 1 : 0;
        extensible_count += oracle ? 1 : 0;
    }
    const LatticeSet s1(2, {IndexVector{0, 0}, IndexVector{1, 1}});
    const LatticeSet s2(2, {IndexVector{0, 1}, IndexVector{1, 0}});
    const auto cross = is_zd_convex(minkowski_sum(s1, s2));
    const bool cross_ok = is_zd_convex(s1).is_convex && is_zd_convex(s2).is_convex && !cross.is_convex &&
                           cross.witnesses == std::vector<IndexVector>{IndexVector{1, 1}};
    const bool ok = agree_sets == 200 && agree_pmfs == 100 && worst_gap_diff <= 1e-9 && cross_ok;
    return {ok, fmt("sets %d/200 agree (%d convex); p.m.f.s %d/100 agree (%d extensible), max gap diff %.1e; "
                    "sum of the two-point sets convex: %s, witnesses %zu",
                    agree_sets, convex_count, agree_pmfs, extensible_count, worst_gap_diff,
                    cross.is_convex ? "yes" : "no", cross.witnesses.size())};
}

// ---- 9 ------------------------------------------------------------------

LatticeSet random_convex_set(int d, std::int64_t side, SplitMix64& rng) {
    const BoxDomain box(IndexVector(static_cast<std::size_t>(d), 0), IndexVector(static_cast<std::size_t>(d), side));
    std::vector<IndexVector> seeds;
    const auto count = rng.integer(1, 6);
    for (int i = 0; i < count; ++i) {
        IndexVector k(static_cast<std::size_t>(d));
        for (int a = 0; a < d; ++a) {
            k[a] = rng.integer(0, side);
        }
        seeds.push_back(k);
    }
    return convex_closure(LatticeSet(d, seeds));
}

Outcome self_sums() {
    SplitMix64 rng(909);
    int ok2 = 0;
    int ok3 = 0;
    std::string first_bad;
    for (int t = 0; t < 100; ++t) {
        const auto a = random_convex_set(2, 5, rng);
        const auto reps = check_self_sum_convexity(a, 4);
        ok2 += std::all_of(reps.begin(), reps.end(), [](const auto& r) { return r.is_convex; }) ? 1 : 0;
    }
    for (int t = 0; t < 20; ++t) {
        const auto a = random_convex_set(3, 3, rng);
        const auto reps = check_self_sum_convexity(a, 4);
        const bool all = std::all_of(reps.begin(), reps.end(), [](const auto& r) { return r.is_convex; });
        ok3 += all ? 1 : 0;
        if (!all && first_bad.empty()) {
            first_bad = "; first non-convex sum from A = " + to_json(a).at("points").dump();
        }
    }
    return {ok2 == 100 && ok3 == 20,
            fmt("d=2: %d/100, d=3: %d/20 sets with all self-sums n=2..4 convex", ok2, ok3) + first_bad};
}

// ---- 10 -----------------------------------------------------------------

double simplex_oracle_moment(int d, const Vec& u) {
    const double c = 1.0 / (d + 1.0);
    double acc = 0.0;
    for (int i = 0; i <= d; ++i) {
        Vec v(static_cast<std::size_t>(d), -c);
        if (i > 0) {
            v[static_cast<std::size_t>(i - 1)] += 1.0;
        }
        acc += dot(v, u) * dot(v, u);
    }
    return acc / ((d + 1.0) * (d + 2.0));
}

Outcome ball_geometry() {
    bool ok = true;
    const auto f = make_gaussian(1.0, 2);
    const auto dirs = unit_directions(2, 64);
    const auto prof = ball_body_radial(f, 2.0, dirs);
    double rho_err = 0.0;
    for (double r : prof.radii) {
        rho_err = std::max(rho_err, std::abs(r - std::numbers::sqrt2));
    }
    ok = ok && rho_err <= 1e-6;

    int inclusion_cases = 0;
    for (const auto& g : {make_gaussian(1.0, 2), make_laplace_product(1.0, 2), make_sheared_gaussian(1.0, 0.5)}) {
        for (auto [p, q] : {std::pair{1.0, 2.0}, {2.0, 3.0}, {3.0, 4.0}}) {
            ok = ok && check_inclusions(g, p, q, dirs).holds;
            ++inclusion_cases;
        }
    }

    double exact_err = 0.0;
    int kls_cases = 0;
    for (int d : {2, 3}) {
        for (const std::string name : {"ball", "cube", "simplex"}) {
            const auto body = make_body(name, {{"d", d}});
            for (const auto& u : unit_directions(d, 16)) {
                const auto ex = kls_second_moment_check(body, u, MomentMethod::exact);
                const auto mc = kls_second_moment_check(body, u, MomentMethod::monte_carlo, 200000, 77);
                const double oracle = name == "ball" ? 1.0 / (d + 2.0) : name == "cube" ? 1.0 / 12.0 : simplex_oracle_moment(d, u);
                exact_err = std::max(exact_err, std::abs(ex.mid - oracle));
                ok = ok && ex.holds && mc.holds;
                kls_cases += 2;
            }
        }
    }
    ok = ok && exact_err <= 1e-6;

    int radius_cases = 0;
    for (int d : {2, 3}) {
        for (const std::string name : {"cube", "ball"}) {
            ok = ok && radius_bounds_check(make_body(name, {{"d", d}}).volume_normalized()).holds;
            ++radius_cases;
        }
    }
    return {ok, fmt("max |rho - sqrt 2| %.1e; %d inclusion chains; %d KLS checks (exact moment err %.1e); %d radius checks",
                    rho_err, inclusion_cases, kls_cases, exact_err, radius_cases)};
}

// ---- 11 -----------------------------------------------------------------

Outcome elementary() {
    SplitMix64 rng(1111);
    int violations = 0;
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double big_d = std::exp(rng.uniform(0.0, 6.0));
        const double big_m = std::exp(rng.uniform(0.0, 6.0));
        const double top = big_d / big_m;
        const double a = top * std::pow(rng.uniform(), i % 3 == 0 ? 12.0 : 1.0);
        const double b = i % 7 == 0 ? a : top * rng.uniform();
        double mu = rng.uniform(0.0, 1.0 / std::numbers::e) * std::pow(rng.uniform(), 4.0);
        mu = std::max(mu, 1e-300);
        const double bound = elementary_estimate(a, b, mu, big_d, big_m);
        const double lhs = std::abs(elementary_g(b, big_m) - elementary_g(a, big_m));
        worst = std::max(worst, lhs / bound);
        violations += lhs <= bound ? 0 : 1;
    }
    return {violations == 0, fmt("100000 samples, %d violations, max lhs/bound %.4f", violations, worst)};
}

// ---- 12 -----------------------------------------------------------------

Outcome determinism() {
    const ExperimentConfig c;
    const auto first = run_config(c);
    const auto second = run_config(c);
    const bool same = canonical_report_text(first) == canonical_report_text(second);
    const bool round_trip = report_from_json(json::parse(report_text(first))) == first;
    return {same && round_trip, fmt("%zu results; identical modulo runtime: %s; round trip: %s", first.results.size(),
                                    same ? "yes" : "no", round_trip ? "yes" : "no")};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    int only = 0;
    app.add_option("--only", only, "Run a single criterion")->check(CLI::Range(1, 12));
    CLI11_PARSE(app, argc, argv);

    std::optional<ReportDocument> sweep;
    auto shared_sweep = [&]() -> const ReportDocument& {
        if (!sweep) {
            sweep = sweep_report();
        }
        return *sweep;
    };
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"smoothing identity", smoothing_identity},
        {"exact smoothed entropies", exact_entropy_values},
        {"max-mass bound at scale", discrete_ub_scale},
        {"one-dimensional max-mass bound", spread_d1},
        {"entropy increment gap", [&] { return epi_gap(shared_sweep()); }},
        {"smoothing rate", [&] { return diff_rate(shared_sweep()); }},
        {"lattice vs integral gaps", lattice_integral_gaps},
        {"convexity oracles", convexity_oracles},
        {"self-sum convexity", self_sums},
        {"ball geometry", ball_geometry},
        {"elementary estimate", elementary},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (only != 0 && only != id) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %2d: %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
