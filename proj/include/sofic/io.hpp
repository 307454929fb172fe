#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sofic/errors.hpp"
#include "sofic/gibbs.hpp"
#include "sofic/measure.hpp"
#include "sofic/potential.hpp"
#include "sofic/presentation.hpp"

namespace sofic {

using Json = nlohmann::json;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

inline Json parse_json(const std::string& text, const std::string& what) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed JSON in " + what);
    return j;
}

// Subshift file: {"alphabet", "vertices", "edges"} as a labeled graph,
// {"alphabet", "forbidden"} as a forbidden-word list, or
// {"beta_expansion_prefix", "period"} for a beta-shift.
inline SoficPresentation presentation_from_json(const Json& j) {
    if (j.contains("beta_expansion_prefix")) {
        if (!j.contains("period")) throw ParseError("beta-shift input needs 'period'");
        std::vector<int> prefix = j.at("beta_expansion_prefix").get<std::vector<int>>();
        return SoficPresentation::beta_shift(prefix, j.at("period").get<int>());
    }
    if (!j.contains("alphabet")) throw ParseError("subshift input needs 'alphabet'");
    Alphabet alphabet(j.at("alphabet").get<std::vector<std::string>>());
    if (j.contains("forbidden")) {
        std::vector<Word> forbidden;
        for (const auto& f : j.at("forbidden"))
            forbidden.push_back(alphabet.parse(f.get<std::string>()));
        return SoficPresentation::from_forbidden(alphabet, forbidden);
    }
    if (!j.contains("vertices") || !j.contains("edges"))
        throw ParseError("graph input needs 'vertices' and 'edges'");
    std::vector<std::string> vertices = j.at("vertices").get<std::vector<std::string>>();
    auto vertex_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < vertices.size(); ++i)
            if (vertices[i] == name) return static_cast<int>(i);
        throw ParseError("unknown vertex '" + name + "'");
    };
    std::vector<SoficPresentation::Edge> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3)
            throw ParseError("edge entries must be [src, label, dst]");
        const auto label = alphabet.index(e.at(1).get<std::string>());
        if (!label) throw ParseError("edge label '" + e.at(1).get<std::string>() +
                                     "' not in alphabet");
        edges.push_back({vertex_index(e.at(0).get<std::string>()), *label,
                         vertex_index(e.at(2).get<std::string>())});
    }
    return SoficPresentation::from_graph(std::move(alphabet), std::move(vertices), edges);
}

inline SoficPresentation load_presentation(const std::string& path) {
    return presentation_from_json(parse_json(read_file(path), path));
}

// Potential file: {"range", "table": {"word": value}, "variation":
// {"type": "exp"|"poly", "C", "theta"|"alpha"}}.
inline Potential potential_from_json(const Json& j, const Alphabet& alphabet) {
    if (!j.contains("range") || !j.contains("table") || !j.contains("variation"))
        throw ParseError("potential input needs 'range', 'table', 'variation'");
    const int range = j.at("range").get<int>();
    if (range < 1 || range > 12) throw ParseError("potential range must be in 1..12");
    std::size_t size = 1;
    for (int i = 0; i < range; ++i) size *= alphabet.size();
    std::vector<double> table(size, 0.0);
    std::vector<bool> seen(size, false);
    for (const auto& [key, value] : j.at("table").items()) {
        Word w = alphabet.parse(key);
        if (static_cast<int>(w.size()) != range)
            throw ParseError("table key '" + key + "' must have length " +
                             std::to_string(range));
        std::size_t idx = 0;
        for (Sym a : w.syms()) idx = idx * alphabet.size() + a;
        table[idx] = value.get<double>();
        seen[idx] = true;
    }
    for (std::size_t i = 0; i < size; ++i)
        if (!seen[i]) throw ParseError("core table is missing entries (need all " +
                                       std::to_string(size) + " words)");
    const Json& v = j.at("variation");
    const std::string type = v.at("type").get<std::string>();
    Variation var = type == "exp"
                        ? Variation::exponential(v.at("C").get<double>(),
                                                 v.at("theta").get<double>())
                        : type == "poly"
                              ? Variation::polynomial(v.at("C").get<double>(),
                                                      v.at("alpha").get<double>())
                              : throw ParseError("variation type must be 'exp' or 'poly'");
    return Potential(alphabet, range, std::move(table), var);
}

inline Potential load_potential(const std::string& path, const Alphabet& alphabet) {
    return potential_from_json(parse_json(read_file(path), path), alphabet);
}

// --- output helpers ------------------------------------------------------

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct OutputProvenance {
    std::string subshift_hash;
    std::string potential_hash;
    double tolerance = 0.0;
    std::size_t word_budget = 0;
    std::string timestamp;  // excluded from any hashing / comparison
};

inline Json provenance_json(const OutputProvenance& p) {
    return Json{{"subshift_hash", p.subshift_hash},
                {"potential_hash", p.potential_hash},
                {"tolerance", p.tolerance},
                {"word_budget", p.word_budget},
                {"timestamp", p.timestamp}};
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << text;
}

inline std::string measures_csv(const CylinderMeasure& mu, const Alphabet& alphabet) {
    std::string s = "word,value,radius\n";
    for (int len = 1; len <= mu.max_len(); ++len)
        for (const auto& [w, e] : mu.level(len))
            s += alphabet.format(w) + "," + format_double(e.value) + "," +
                 format_double(e.log_radius) + "\n";
    return s;
}

inline Json measures_json(const CylinderMeasure& mu, const Alphabet& alphabet,
                          const OutputProvenance& prov) {
    Json rows = Json::array();
    for (int len = 1; len <= mu.max_len(); ++len)
        for (const auto& [w, e] : mu.level(len))
            rows.push_back(Json{{"word", alphabet.format(w)},
                                {"value", e.value},
                                {"radius", e.log_radius}});
    return Json{{"provenance", provenance_json(prov)},
                {"method", mu.provenance().method},
                {"rows", rows}};
}

inline std::string convergence_csv(const ConvergenceStudy& st) {
    std::string s =
        "m,D_lo,D_hi,pressure_gap,pressure_gap_radius,entropy_gap,entropy_gap_radius,"
        "fitted_rate\n";
    for (const auto& r : st.rows)
        s += std::to_string(r.m) + "," + format_double(r.distance.lo) + "," +
             format_double(r.distance.hi) + "," + format_double(r.pressure_gap.mid()) + "," +
             format_double(r.pressure_gap.width() / 2) + "," + format_double(r.entropy_gap) +
             "," + format_double(r.entropy_gap_radius) + "," +
             format_double(st.pressure_fit.rate) + "\n";
    return s;
}

inline Json convergence_json(const ConvergenceStudy& st, const OutputProvenance& prov) {
    Json rows = Json::array();
    for (const auto& r : st.rows)
        rows.push_back(Json{{"m", r.m},
                            {"n", r.n},
                            {"D_lo", r.distance.lo},
                            {"D_hi", r.distance.hi},
                            {"pressure_gap", r.pressure_gap.mid()},
                            {"pressure_gap_radius", r.pressure_gap.width() / 2},
                            {"entropy_gap", r.entropy_gap},
                            {"entropy_gap_radius", r.entropy_gap_radius},
                            {"pressure", r.pressure_value},
                            {"pressure_radius", r.pressure_radius}});
    return Json{{"provenance", provenance_json(prov)},
                {"rows", rows},
                {"fitted_rate", st.pressure_fit.rate},
                {"fit_r2", st.pressure_fit.r2},
                {"theta_ft", st.theta_ft},
                {"pressure_limit_lo", st.pressure_limit.lo},
                {"pressure_limit_hi", st.pressure_limit.hi}};
}

struct MixingRow {
    std::string a, b;
    long s = 0;
    MixingResult result;
};

inline std::string mixing_csv(const std::vector<MixingRow>& rows) {
    std::string s = "a,b,s,ratio_minus_1,radius,bound\n";
    for (const auto& r : rows)
        s += r.a + "," + r.b + "," + std::to_string(r.s) + "," +
             format_double(r.result.ratio_minus_1) + "," + format_double(r.result.radius) +
             "," + format_double(r.result.bound) + "\n";
    return s;
}

inline Json mixing_json(const std::vector<MixingRow>& rows, const OutputProvenance& prov) {
    Json out = Json::array();
    for (const auto& r : rows)
        out.push_back(Json{{"a", r.a},
                           {"b", r.b},
                           {"s", r.s},
                           {"ratio_minus_1", r.result.ratio_minus_1},
                           {"radius", r.result.radius},
                           {"bound", r.result.bound},
                           {"s_star", r.result.s_star},
                           {"provenance", r.result.direct ? "direct" : "matrix"}});
    return Json{{"provenance", provenance_json(prov)}, {"rows", out}};
}

}  // namespace sofic
