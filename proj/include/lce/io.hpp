#ifndef LCE_IO_HPP
#define LCE_IO_HPP

// JSON documents for p.m.f.s, point sets and the module reports.

#include "lce/convexity.hpp"
#include "lce/lattice.hpp"
#include "lce/moments.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace lce {

using json = nlohmann::json;

class IoError : public Error {
public:
    using Error::Error;
};

inline json to_json(const IndexVector& k) { return json(k.coords()); }

inline IndexVector index_vector_from_json(const json& j) {
    if (!j.is_array()) {
        throw InvalidArgument("expected an integer array");
    }
    return IndexVector(j.get<std::vector<std::int64_t>>());
}

/// {"dim", "lo", "hi", "values", "deficit", "meta"}; values row-major, last axis fastest.
inline json to_json(const LatticePmf& p) {
    json j;
    j["dim"] = p.dim();
    j["lo"] = to_json(p.box().lo());
    j["hi"] = to_json(p.box().hi());
    j["values"] = std::vector<double>(p.values().begin(), p.values().end());
    j["deficit"] = p.deficit();
    j["meta"] = p.meta();
    return j;
}

inline LatticePmf pmf_from_json(const json& j) {
    try {
        const int dim = j.at("dim").get<int>();
        IndexVector lo = index_vector_from_json(j.at("lo"));
        IndexVector hi = index_vector_from_json(j.at("hi"));
        detail::require(lo.dim() == dim && hi.dim() == dim, "pmf document: lo/hi length must equal dim");
        auto values = j.at("values").get<std::vector<double>>();
        const double deficit = j.value("deficit", 0.0);
        Meta meta;
        if (j.contains("meta")) {
            for (const auto& [key, val] : j.at("meta").items()) {
                meta[key] = val.is_string() ? val.get<std::string>() : val.dump();
            }
        }
        return {BoxDomain(std::move(lo), std::move(hi)), std::move(values), deficit, std::move(meta)};
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("pmf document: ") + e.what());
    }
}

/// {"dim", "points"}
inline json to_json(const LatticeSet& s) {
    json pts = json::array();
    for (const auto& k : s) {
        pts.push_back(to_json(k));
    }
    return {{"dim", s.dim()}, {"points", pts}};
}

inline LatticeSet set_from_json(const json& j) {
    try {
        const int dim = j.at("dim").get<int>();
        std::vector<IndexVector> pts;
        for (const auto& e : j.at("points")) {
            pts.push_back(index_vector_from_json(e));
        }
        return {dim, std::move(pts)};
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("set document: ") + e.what());
    }
}

inline json to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.size(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(row);
    }
    return rows;
}

inline json to_json(const MomentSummary& m) {
    return {{"mass", m.mass},         {"mean", m.mean},           {"cov", to_json(m.cov)},
            {"max_value", m.max_value}, {"argmax", to_json(m.argmax)}, {"det_cov", m.det_cov},
            {"sigma_hat", m.sigma_hat}, {"degenerate", m.degenerate}};
}

inline json to_json(const ConvexityReport& r) {
    json w = json::array();
    for (const auto& k : r.witnesses) {
        w.push_back(to_json(k));
    }
    return {{"is_convex", r.is_convex}, {"witnesses", w}};
}

inline json to_json(const ExtensibilityReport& r) {
    json gaps = json::array();
    for (const auto& [k, g] : r.envelope_gaps) {
        gaps.push_back({{"point", to_json(k)}, {"gap", g}});
    }
    return {{"is_extensible", r.is_extensible},
            {"support_convex", r.support_convex},
            {"tolerance_used", r.tolerance_used},
            {"envelope_gaps", gaps}};
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    out << text;
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

inline void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

inline LatticePmf read_pmf(const std::string& path) { return pmf_from_json(read_json_file(path)); }
inline void write_pmf(const std::string& path, const LatticePmf& p) { write_json_file(path, to_json(p)); }
inline LatticeSet read_set(const std::string& path) { return set_from_json(read_json_file(path)); }
inline void write_set(const std::string& path, const LatticeSet& s) { write_json_file(path, to_json(s)); }

} // namespace lce

#endif // LCE_IO_HPP
