// lce command-line tool: p.m.f. construction and analysis, geometry and bridge
// checks, and the verification sweeps.

#include "lce/lce.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

using lce::json;

lce::Params parse_params(const std::vector<std::string>& kv) {
    lce::Params p;
    for (const auto& item : kv) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw lce::InvalidArgument("expected key=value, got '" + item + "'");
        }
        p[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
    return p;
}

void emit(const json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        lce::write_json_file(out, j);
    }
}

lce::ConvolutionMethod parse_method(const std::string& m) {
    if (m == "direct") return lce::ConvolutionMethod::direct;
    if (m == "fft") return lce::ConvolutionMethod::fft;
    return lce::ConvolutionMethod::automatic;
}

json direction_list(const std::vector<lce::Vec>& dirs) {
    json a = json::array();
    for (const auto& d : dirs) {
        a.push_back(d);
    }
    return a;
}

struct GenArgs {
    std::string density;
    std::vector<std::string> params;
    std::string family;
    double sigma = 1.0;
    int dim = 1;
    std::string set_file;
    std::vector<std::int64_t> point;
    double radius_multiplier = 12.0;
    bool renormalize = false;
    std::string out;
};

int run_gen(const GenArgs& a) {
    lce::LatticePmf p;
    if (!a.density.empty()) {
        const auto f = lce::make_density(a.density, parse_params(a.params));
        p = lce::quantize_density(f, lce::IndexVector(static_cast<std::size_t>(f.dim), 0), a.radius_multiplier);
    } else if (!a.family.empty()) {
        const auto factor = lce::family_factor(a.family, parse_params(a.params), a.sigma);
        p = lce::make_product(std::vector<lce::LatticePmf>(static_cast<std::size_t>(a.dim), factor));
    } else if (!a.set_file.empty()) {
        p = lce::make_uniform_on_set(lce::read_set(a.set_file));
    } else if (!a.point.empty()) {
        p = lce::LatticePmf::point_mass(lce::IndexVector(a.point));
    } else {
        throw lce::InvalidArgument("gen: give one of --density, --family, --set, --point");
    }
    if (a.renormalize) {
        p = lce::renormalized(p);
    }
    emit(lce::to_json(p), a.out);
    return 0;
}

struct CheckArgs {
    std::string pmf;
    std::string set;
    std::string mode = "extensible";
    int n_max = 4;
    bool exact = false;
    double tol = 1e-9;
};

int run_check(const CheckArgs& a) {
    const auto arith = a.exact ? lce::Arithmetic::exact : lce::Arithmetic::floating;
    lce::LatticeSet s;
    std::optional<lce::LatticePmf> p;
    if (!a.pmf.empty()) {
        p = lce::read_pmf(a.pmf);
        s = p->support();
    } else if (!a.set.empty()) {
        s = lce::read_set(a.set);
    } else {
        throw lce::InvalidArgument("check: give --pmf or --set");
    }
    if (a.mode == "zconvex") {
        const auto r = lce::is_zd_convex(s, {.arithmetic = arith});
        std::cout << lce::to_json(r).dump(2) << "\n";
        return r.is_convex ? 0 : 1;
    }
    if (a.mode == "selfsum") {
        json arr = json::array();
        bool all = true;
        int n = 2;
        for (const auto& r : lce::check_self_sum_convexity(s, a.n_max, {.arithmetic = arith})) {
            json j = lce::to_json(r);
            j["n"] = n++;
            all = all && r.is_convex;
            arr.push_back(j);
        }
        std::cout << arr.dump(2) << "\n";
        return all ? 0 : 1;
    }
    if (a.mode == "extensible") {
        if (!p) {
            throw lce::InvalidArgument("check: --mode extensible needs --pmf");
        }
        const auto r = lce::is_log_concave_extensible(*p, {.tol = a.tol, .mode = arith});
        std::cout << lce::to_json(r).dump(2) << "\n";
        return r.is_extensible ? 0 : 1;
    }
    throw lce::InvalidArgument("check: unknown mode '" + a.mode + "'");
}

struct GeomArgs {
    std::string body = "cube";
    int d = 2;
    double radius = 1.0;
    std::string check = "kls";
    std::string density = "gaussian";
    std::vector<std::string> params;
    double p = 2.0;
    double q = 3.0;
    int directions = 64;
    bool monte_carlo = false;
    std::uint64_t seed = 12345;
};

int run_geom(const GeomArgs& a) {
    json out;
    bool ok = true;
    if (a.check == "kls" || a.check == "radius") {
        auto body = lce::make_body(a.body, {{"d", a.d}, {"radius", a.radius}});
        if (a.check == "kls") {
            json rows = json::array();
            for (const auto& u : lce::unit_directions(a.d, a.directions)) {
                const auto r = lce::kls_second_moment_check(
                    body, u, a.monte_carlo ? lce::MomentMethod::monte_carlo : lce::MomentMethod::exact, 200000, a.seed);
                rows.push_back({{"direction", u}, {"lhs", r.lhs}, {"mid", r.mid}, {"rhs", r.rhs},
                                {"mid_stderr", r.mid_stderr}, {"holds", r.holds}});
                ok = ok && r.holds;
            }
            out = {{"body", a.body}, {"d", a.d}, {"kls", rows}, {"holds", ok}};
        } else {
            const auto r = lce::radius_bounds_check(body.volume_normalized());
            ok = r.holds;
            out = {{"body", a.body},          {"d", a.d},
                   {"inradius", r.r},         {"circumradius", r.big_r},
                   {"lambda_min", r.lambda_min}, {"lambda_max", r.lambda_max},
                   {"upper_bound", r.upper_bound}, {"lower_bound", r.lower_bound},
                   {"holds", r.holds}};
        }
    } else {
        auto params = parse_params(a.params);
        if (a.density == "gaussian") {
            params.try_emplace("dim", a.d);
            params.try_emplace("sigma", 1.0);
        }
        const auto f = lce::make_density(a.density, params);
        const auto dirs = lce::unit_directions(f.dim, a.directions);
        if (a.check == "ballbody") {
            const auto prof = lce::ball_body_radial(f, a.p, dirs);
            out = {{"density", a.density}, {"p", a.p}, {"directions", direction_list(dirs)}, {"radii", prof.radii}};
        } else if (a.check == "inclusions") {
            const auto c = lce::check_inclusions(f, a.p, a.q, dirs);
            ok = c.holds;
            out = {{"density", a.density}, {"p", a.p},
                   {"q", a.q},             {"lower", c.constants.lower},
                   {"upper", c.constants.upper}, {"min_ratio", c.min_ratio},
                   {"max_ratio", c.max_ratio}, {"holds", c.holds}};
        } else {
            throw lce::InvalidArgument("geom: unknown check '" + a.check + "'");
        }
    }
    std::cout << out.dump(2) << "\n";
    return ok ? 0 : 1;
}

struct BridgeArgs {
    std::string density = "gaussian";
    std::vector<std::string> params;
    std::vector<double> sweep{2.0, 4.0, 8.0};
    double radius_multiplier = 12.0;
};

int run_bridge(const BridgeArgs& a) {
    auto params = parse_params(a.params);
    if (a.density == "gaussian") {
        params.try_emplace("dim", 1.0);
        params.try_emplace("sigma", 1.0);
    }
    json rows = json::array();
    bool ok = true;
    for (double sigma : a.sweep) {
        const auto f = lce::rescaled(lce::make_density(a.density, params), sigma);
        const auto half = static_cast<std::int64_t>(std::ceil(a.radius_multiplier * f.scale));
        const auto box = lce::BoxDomain::centered(lce::IndexVector(static_cast<std::size_t>(f.dim), 0), half);
        const auto g = lce::lattice_vs_integral_gaps(f, box);
        json row = {{"sigma", sigma},
                    {"lattice_mass", g.lattice_mass},
                    {"mass_gap", g.mass_gap},
                    {"mean_gap", g.mean_gap},
                    {"second_moment_gap", g.second_moment_gap},
                    {"cross_moment", g.cross_moment},
                    {"det_gap", g.det_gap},
                    {"det_gap_scaled", g.det_gap / std::pow(sigma, 2.0 * f.dim - 1.0)}};
        if (f.dim == 1) {
            const auto qc = lce::quasi_concave_check_1d(f, box);
            const auto fm = lce::first_moment_check_1d(f, box);
            row["quasi_concave"] = {{"gap", qc.gap}, {"max_f", qc.max_f}, {"holds", qc.holds}};
            row["first_moment"] = {{"lhs", fm.lhs}, {"rhs", fm.rhs}, {"holds", fm.holds}};
            ok = ok && qc.holds && fm.holds;
        }
        rows.push_back(row);
    }
    std::cout << json{{"density", a.density}, {"sweep", rows}}.dump(2) << "\n";
    return ok ? 0 : 1;
}

int finish_report(const lce::ReportDocument& doc, const std::string& out, const std::string& csv) {
    lce::ReportDocument d = doc;
    if (!out.empty()) d.config.output = out;
    if (!csv.empty()) d.config.csv = csv;
    lce::emit_report(d);
    if (d.config.output.empty()) {
        std::cout << lce::report_text(d);
    }
    std::cerr << "pass " << d.summary.pass << ", fail " << d.summary.fail << ", flagged " << d.summary.flagged << "\n";
    return d.summary.fail == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete log-concavity toolkit"};
    app.set_version_flag("--version", std::string(lce::tool_version));
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Construct a p.m.f.");
    g->add_option("--density", gen.density, "Quantize a registered density");
    g->add_option("--family", gen.family, "Sweep family member (product of 1-d factors)");
    g->add_option("--param", gen.params, "Density or family parameter key=value")->take_all();
    g->add_option("--sigma", gen.sigma, "Family scale");
    g->add_option("--dim", gen.dim, "Family dimension");
    g->add_option("--set", gen.set_file, "Uniform on a point-set file");
    g->add_option("--point", gen.point, "Point mass at these coordinates")->delimiter(',');
    g->add_option("--radius-multiplier", gen.radius_multiplier, "Quantization half-width in scale units");
    g->add_flag("--renormalize", gen.renormalize, "Rescale retained mass to 1 (recorded in meta)");
    g->add_option("-o,--out", gen.out, "Output file (default stdout)");

    std::string conv_a;
    std::string conv_b;
    std::string conv_method = "auto";
    std::string conv_out;
    int conv_power = 0;
    auto* cv = app.add_subcommand("convolve", "Convolve two p.m.f.s or take a convolution power");
    cv->add_option("--a", conv_a, "First p.m.f.")->required();
    cv->add_option("--b", conv_b, "Second p.m.f.");
    cv->add_option("--power", conv_power, "Self-convolution power of --a");
    cv->add_option("--method", conv_method, "direct|fft|auto")->check(CLI::IsMember({"direct", "fft", "auto"}));
    cv->add_option("-o,--out", conv_out, "Output file (default stdout)");

    std::string entropy_pmf;
    auto* en = app.add_subcommand("entropy", "Shannon entropy in nats");
    en->add_option("--pmf", entropy_pmf, "P.m.f. file")->required();

    std::string moments_pmf;
    auto* mo = app.add_subcommand("moments", "Moments, isotropy and discrete bound ratios");
    mo->add_option("--pmf", moments_pmf, "P.m.f. file")->required();

    CheckArgs chk;
    auto* ck = app.add_subcommand("check", "Convexity and extensibility decisions");
    ck->add_option("--pmf", chk.pmf, "P.m.f. file");
    ck->add_option("--set", chk.set, "Point-set file");
    ck->add_option("--mode", chk.mode, "zconvex|extensible|selfsum")
        ->check(CLI::IsMember({"zconvex", "extensible", "selfsum"}));
    ck->add_option("--n-max", chk.n_max, "Largest self-sum for selfsum mode");
    ck->add_option("--tol", chk.tol, "Envelope gap tolerance");
    ck->add_flag("--exact", chk.exact, "Exact rational arithmetic");

    std::string se_pmf;
    int se_n = 1;
    double se_tol = 1e-8;
    auto* se = app.add_subcommand("smooth-entropy", "Differential entropy of the B-spline smoothed p.m.f.");
    se->add_option("--pmf", se_pmf, "P.m.f. file")->required();
    se->add_option("--n", se_n, "Number of uniforms")->check(CLI::PositiveNumber);
    se->add_option("--tol", se_tol, "Quadrature tolerance");

    GeomArgs geo;
    auto* ge = app.add_subcommand("geom", "Convex body and ball-body checks");
    ge->add_option("--body", geo.body, "cube|ball|simplex");
    ge->add_option("--d", geo.d, "Dimension");
    ge->add_option("--radius", geo.radius, "Ball radius");
    ge->add_option("--check", geo.check, "kls|radius|ballbody|inclusions")
        ->check(CLI::IsMember({"kls", "radius", "ballbody", "inclusions"}));
    ge->add_option("--density", geo.density, "Density for ballbody/inclusions");
    ge->add_option("--param", geo.params, "Density parameter key=value")->take_all();
    ge->add_option("--p", geo.p, "Ball body exponent");
    ge->add_option("--q", geo.q, "Second exponent for inclusions");
    ge->add_option("--directions", geo.directions, "Number of directions");
    ge->add_flag("--monte-carlo", geo.monte_carlo, "Monte Carlo moments for kls");
    ge->add_option("--seed", geo.seed, "Monte Carlo seed");

    BridgeArgs br;
    auto* bg = app.add_subcommand("bridge", "Lattice sums against integrals over a scale sweep");
    bg->add_option("--density", br.density, "Registered density");
    bg->add_option("--param", br.params, "Density parameter key=value")->take_all();
    bg->add_option("--sweep", br.sweep, "Scales")->delimiter(',');
    bg->add_option("--radius-multiplier", br.radius_multiplier, "Lattice half-width in scale units");

    std::string vcfg;
    std::string vout;
    std::string vcsv;
    auto* ve = app.add_subcommand("verify", "Run a verification config");
    ve->add_option("--config", vcfg, "Config file")->required();
    ve->add_option("-o,--out", vout, "Report file (overrides config)");
    ve->add_option("--csv", vcsv, "CSV file (overrides config)");

    lce::ExperimentConfig sw;
    std::string sout;
    std::string scsv;
    auto* sp = app.add_subcommand("sweep", "Run a sweep configured from flags");
    sp->add_option("--family", sw.family, "Family name");
    sp->add_option("--dims", sw.dims, "Dimensions")->delimiter(',');
    sp->add_option("--sigmas", sw.sigmas, "Scales")->delimiter(',');
    sp->add_option("--n", sw.n_values, "Summand counts")->delimiter(',');
    sp->add_option("--checks", sw.checks, "Check ids")->delimiter(',');
    sp->add_option("--seed", sw.seed, "Seed");
    sp->add_option("--samples", sw.samples, "Random samples for self_convolution");
    sp->add_flag("--allow-d3", sw.allow_d3, "Permit d = 3");
    sp->add_flag("--renormalize", sw.renormalize, "Renormalize sweep members");
    sp->add_option("-o,--out", sout, "Report file");
    sp->add_option("--csv", scsv, "CSV file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*g) {
            return run_gen(gen);
        }
        if (*cv) {
            const auto a = lce::read_pmf(conv_a);
            const lce::ConvolutionOptions opt{.method = parse_method(conv_method)};
            lce::LatticePmf r;
            if (conv_power > 0) {
                r = lce::self_convolve(a, conv_power, opt);
            } else {
                if (conv_b.empty()) {
                    throw lce::InvalidArgument("convolve: give --b or --power");
                }
                r = lce::convolve(a, lce::read_pmf(conv_b), opt);
            }
            emit(lce::to_json(r), conv_out);
            return 0;
        }
        if (*en) {
            const auto p = lce::read_pmf(entropy_pmf);
            std::cout << json{{"shannon_entropy", lce::shannon_entropy(p)}}.dump(2) << "\n";
            return 0;
        }
        if (*mo) {
            const auto p = lce::read_pmf(moments_pmf);
            const auto m = lce::discrete_moments(p);
            json j = lce::to_json(m);
            const auto iso = lce::isotropy_score(m);
            if (!iso.degenerate) {
                j["isotropy"] = {{"op_norm_deviation", iso.op_norm_deviation}, {"normalized", iso.normalized}};
            }
            const auto b = lce::entropy_covariance_bounds(p);
            j["entropy"] = b.entropy;
            j["ratio_ub"] = b.ratio_ub;
            j["gaussmax_slack"] = b.gaussmax_slack;
            if (b.spread) {
                j["spread_ratio"] = *b.spread;
            }
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (*ck) {
            return run_check(chk);
        }
        if (*se) {
            const auto p = lce::read_pmf(se_pmf);
            lce::EntropyOptions opt;
            opt.tol = se_tol;
            const auto r = lce::differential_entropy_report(p, se_n, opt);
            std::cout << json{{"differential_entropy", r.value}, {"tail_bound", r.tail_bound},
                              {"shannon_entropy", lce::shannon_entropy(p)}, {"max_order", r.max_order_used},
                              {"cells", r.cells}}
                             .dump(2)
                      << "\n";
            return 0;
        }
        if (*ge) {
            return run_geom(geo);
        }
        if (*bg) {
            return run_bridge(br);
        }
        if (*ve) {
            const auto cfg = lce::config_from_json(lce::read_json_file(vcfg));
            return finish_report(lce::run_config(cfg), vout, vcsv);
        }
        if (*sp) {
            return finish_report(lce::run_config(sw), sout, scsv);
        }
    } catch (const lce::Error& e) {
        std::cerr << "lce: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "lce: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
