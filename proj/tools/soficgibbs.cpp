// Batch front end: loads a subshift presentation and a potential, runs the
// requested study and emits CSV or JSON artifacts plus a one-line summary.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <optional>
#include <string>
#include <vector>

#include "sofic/sofic.hpp"

namespace {

using namespace sofic;

struct RunConfig {
    std::string subshift_path;
    std::string potential_path;  // empty = zero potential
    std::string m_range = "1";
    int depth = 8;               // weak-distance cutoff / measure depth
    int matrix_depth = -1;       // -1 = default coupling
    double tol = 1e-12;
    std::size_t budget = 1'000'000;
    int jobs = 0;
    std::string out_dir = ".";
    std::string format = "csv";
    std::string word_a, word_b;
    std::string gaps = "2";
};

std::pair<int, int> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const int m = std::stoi(text);
        return {m, m};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
}

std::vector<long> parse_gaps(const std::string& text) {
    std::vector<long> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        out.push_back(std::stol(text.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    if (out.empty()) throw ParseError("no gaps given");
    return out;
}

std::string timestamp_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct Loaded {
    SoficPresentation pres;
    Potential phi;
    ProofConstants constants;
    OutputProvenance prov;
    GibbsOptions opts;
};

Loaded load(const RunConfig& cfg) {
    const std::string sub_bytes = read_file(cfg.subshift_path);
    SoficPresentation pres = presentation_from_json(parse_json(sub_bytes, cfg.subshift_path));

    std::string pot_hash = "zero";
    Potential phi = Potential::zero(pres.alphabet());
    if (!cfg.potential_path.empty()) {
        const std::string pot_bytes = read_file(cfg.potential_path);
        phi = potential_from_json(parse_json(pot_bytes, cfg.potential_path), pres.alphabet());
        pot_hash = hex64(fnv1a64(pot_bytes));
    }

    GibbsOptions opts;
    opts.perron.tol = cfg.tol;
    opts.budgets.max_words = cfg.budget;
    opts.jobs = cfg.jobs;

    ProofConstants constants = assemble_constants(pres, phi, opts.budgets);
    OutputProvenance prov{hex64(fnv1a64(sub_bytes)), pot_hash, cfg.tol, cfg.budget,
                          timestamp_now()};
    return {std::move(pres), std::move(phi), std::move(constants), std::move(prov), opts};
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return cfg.out_dir + "/" + name;
}

std::optional<int> depth_override(const RunConfig& cfg) {
    if (cfg.matrix_depth >= 0) return cfg.matrix_depth;
    return std::nullopt;
}

int cmd_info(const RunConfig& cfg) {
    Loaded l = load(cfg);
    const auto& c = l.constants;
    const Word magic = l.pres.magic_word();
    std::printf("subshift:             %s (hash %s)\n", cfg.subshift_path.c_str(),
                l.prov.subshift_hash.c_str());
    std::printf("alphabet size:        %zu\n", l.pres.alphabet().size());
    std::printf("vertices / edges:     %d / %zu\n", l.pres.vertex_count(),
                l.pres.edge_count());
    std::printf("magic word:           %s\n",
                magic.empty() ? "(empty)" : l.pres.alphabet().format(magic).c_str());
    std::printf("specification length: %d\n", c.ell);
    std::printf("sup |phi|:            %.12g\n", c.sup_phi);
    std::printf("Lambda:               %.12g\n", c.lambda);
    const auto& v = l.phi.variation();
    if (v.kind == Variation::Kind::exponential)
        std::printf("variation:            exp C=%.12g theta=%.12g\n", v.C, v.theta);
    else
        std::printf("variation:            poly C=%.12g alpha=%.12g\n", v.C, v.alpha);
    std::printf("K0=%.6g K1=%.6g C_elem=%.6g theta_elem=%.6g\n", c.k0, c.k1, c.c_elem,
                c.theta_elem);
    std::printf("C_X=%.6g theta_X=%.6g m_X=%.6g (magic word padded to %s)\n", c.magic.c_x,
                c.magic.theta_x, c.magic.m_x,
                l.pres.alphabet().format(c.magic.word).c_str());
    std::printf("C_P=%.6g theta_P=%.6g theta_FT=%.6g\n", c.c_p, c.theta_p, c.theta_ft);
    return 0;
}

int cmd_pressure(const RunConfig& cfg) {
    Loaded l = load(cfg);
    const int m = parse_range(cfg.m_range).first;
    Approximation a = approximate(l.pres, l.phi, m, l.constants, l.opts, depth_override(cfg));
    PressureEstimate pr = pressure(a.sft, a.n, l.phi, a.perron_data);

    if (cfg.format == "csv") {
        std::string csv = "m,n,value,radius\n" + std::to_string(pr.m) + "," +
                          std::to_string(pr.n) + "," + format_double(pr.value) + "," +
                          format_double(pr.radius) + "\n";
        write_text(out_path(cfg, "pressure.csv"), csv);
    } else {
        Json j{{"provenance", provenance_json(l.prov)},
               {"rows", Json::array({Json{{"m", pr.m},
                                          {"n", pr.n},
                                          {"value", pr.value},
                                          {"radius", pr.radius}}})}};
        write_text(out_path(cfg, "pressure.json"), j.dump(2) + "\n");
    }
    std::printf("pressure m=%d n=%d: %.12g +- %.3g\n", pr.m, pr.n, pr.value, pr.radius);
    return pr.bracket().well_formed() ? 0 : 2;
}

int cmd_measure(const RunConfig& cfg) {
    Loaded l = load(cfg);
    const int m = parse_range(cfg.m_range).first;
    Approximation a = approximate(l.pres, l.phi, m, l.constants, l.opts, depth_override(cfg));
    const int N = std::max(cfg.depth, a.n);
    CylinderMeasure mu = markov_extend(a.sft, a.n, l.phi, a.transfer, a.perron_data,
                                       l.constants, N, l.opts.budgets);
    if (cfg.format == "csv")
        write_text(out_path(cfg, "measures.csv"), measures_csv(mu, l.pres.alphabet()));
    else
        write_text(out_path(cfg, "measures.json"),
                   measures_json(mu, l.pres.alphabet(), l.prov).dump(2) + "\n");
    std::string heads;
    for (const auto& [w, e] : mu.level(1))
        heads += " mu[" + l.pres.alphabet().format(w) + "]=" + format_double(e.value);
    std::printf("measure m=%d n=%d depth=%d:%s\n", m, a.n, N, heads.c_str());
    bool ok = true;
    for (int len = 1; len <= mu.max_len(); ++len)
        for (const auto& [w, e] : mu.level(len))
            ok = ok && e.value >= 0.0 && std::isfinite(e.value);
    return ok ? 0 : 2;
}

int cmd_entropy(const RunConfig& cfg) {
    Loaded l = load(cfg);
    const int m = parse_range(cfg.m_range).first;
    Approximation a = approximate(l.pres, l.phi, m, l.constants, l.opts, depth_override(cfg));
    const int N = std::max(cfg.depth, a.n + 1);
    CylinderMeasure mu = markov_extend(a.sft, a.n, l.phi, a.transfer, a.perron_data,
                                       l.constants, N, l.opts.budgets);
    ValueRadius h = entropy_variational(a.sft, a.n, l.phi, a.perron_data, mu);
    const double block = block_entropy_rate(mu, N - 1);

    if (cfg.format == "csv") {
        std::string csv = "m,n,value,radius,block_rate,block_depth\n" + std::to_string(m) +
                          "," + std::to_string(a.n) + "," + format_double(h.value) + "," +
                          format_double(h.radius) + "," + format_double(block) + "," +
                          std::to_string(N) + "\n";
        write_text(out_path(cfg, "entropy.csv"), csv);
    } else {
        Json j{{"provenance", provenance_json(l.prov)},
               {"rows", Json::array({Json{{"m", m},
                                          {"n", a.n},
                                          {"value", h.value},
                                          {"radius", h.radius},
                                          {"block_rate", block},
                                          {"block_depth", N}}})}};
        write_text(out_path(cfg, "entropy.json"), j.dump(2) + "\n");
    }
    std::printf("entropy m=%d n=%d: %.12g +- %.3g (block rate %.12g at depth %d)\n", m, a.n,
                h.value, h.radius, block, N);
    return 0;
}

int cmd_mixing(const RunConfig& cfg) {
    Loaded l = load(cfg);
    if (cfg.word_a.empty() || cfg.word_b.empty())
        throw ParseError("mixing needs --word-a and --word-b");
    const int m = parse_range(cfg.m_range).first;
    Approximation a = approximate(l.pres, l.phi, m, l.constants, l.opts, depth_override(cfg));
    const Word wa = l.pres.alphabet().parse(cfg.word_a);
    const Word wb = l.pres.alphabet().parse(cfg.word_b);

    std::vector<MixingRow> rows;
    for (long s : parse_gaps(cfg.gaps)) {
        MixingRow row{cfg.word_a, cfg.word_b, s, {}};
        row.result = mixing_ratio(a.sft, a.n, l.phi, a.transfer, a.perron_data, l.constants,
                                  wa, wb, s);
        rows.push_back(row);
    }
    if (cfg.format == "csv")
        write_text(out_path(cfg, "mixing.csv"), mixing_csv(rows));
    else
        write_text(out_path(cfg, "mixing.json"), mixing_json(rows, l.prov).dump(2) + "\n");
    std::printf("mixing m=%d a=%s b=%s: |ratio-1|=%.12g at s=%ld%s\n", m, cfg.word_a.c_str(),
                cfg.word_b.c_str(), rows.front().result.ratio_minus_1, rows.front().s,
                rows.front().result.direct ? " (direct)" : "");
    return 0;
}

int cmd_converge(const RunConfig& cfg) {
    Loaded l = load(cfg);
    auto [m_lo, m_hi] = parse_range(cfg.m_range);
    ConvergenceStudy st = convergence_study(l.pres, l.phi, m_lo, m_hi, cfg.depth, l.opts);
    if (cfg.format == "csv")
        write_text(out_path(cfg, "convergence.csv"), convergence_csv(st));
    else
        write_text(out_path(cfg, "convergence.json"),
                   convergence_json(st, l.prov).dump(2) + "\n");
    std::printf("converge m=%d..%d depth=%d: fitted rate %.6g (R2=%.3g), last pressure "
                "%.12g +- %.3g, limit bracket [%.12g, %.12g]\n",
                m_lo, m_hi, cfg.depth, st.pressure_fit.rate, st.pressure_fit.r2,
                st.rows.back().pressure_value, st.rows.back().pressure_radius,
                st.pressure_limit.lo, st.pressure_limit.hi);
    bool ok = true;
    for (const auto& row : st.rows)
        ok = ok && row.distance.well_formed() && row.pressure_gap.well_formed();
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gibbs measures on sofic subshifts via finite-type approximations"};
    app.set_config("--config");
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--subshift", cfg.subshift_path, "subshift JSON file")->required();
        sub->add_option("--potential", cfg.potential_path,
                        "potential JSON file (default: zero potential)");
        sub->add_option("--m", cfg.m_range, "approximation order or range, e.g. 2 or 1..8");
        sub->add_option("--depth", cfg.depth, "cylinder depth cutoff K");
        sub->add_option("--n", cfg.matrix_depth, "transfer-matrix depth override");
        sub->add_option("--tol", cfg.tol, "eigen solve tolerance");
        sub->add_option("--budget", cfg.budget, "word enumeration budget");
        sub->add_option("--jobs", cfg.jobs, "worker pool size (0 = hardware)");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--format", cfg.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    auto* info = app.add_subcommand("info", "presentation and constant summary");
    add_common(info);
    auto* pressure_cmd = app.add_subcommand("pressure", "topological pressure of X_m");
    add_common(pressure_cmd);
    auto* measure_cmd = app.add_subcommand("measure", "Gibbs cylinder masses");
    add_common(measure_cmd);
    auto* entropy_cmd = app.add_subcommand("entropy", "measure-theoretic entropy");
    add_common(entropy_cmd);
    auto* mixing_cmd = app.add_subcommand("mixing", "correlation defects");
    add_common(mixing_cmd);
    mixing_cmd->add_option("--word-a", cfg.word_a, "first cylinder word");
    mixing_cmd->add_option("--word-b", cfg.word_b, "second cylinder word");
    mixing_cmd->add_option("--gaps", cfg.gaps, "comma-separated shift gaps");
    auto* converge_cmd = app.add_subcommand("converge", "convergence study over m");
    add_common(converge_cmd);

    CLI11_PARSE(app, argc, argv);

    auto fail = [](const std::string& code, const std::string& message, int exit_code) {
        sofic::Json err{{"code", code}, {"message", message}, {"context", "soficgibbs"}};
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return exit_code;
    };

    try {
        if (info->parsed()) return cmd_info(cfg);
        if (pressure_cmd->parsed()) return cmd_pressure(cfg);
        if (measure_cmd->parsed()) return cmd_measure(cfg);
        if (entropy_cmd->parsed()) return cmd_entropy(cfg);
        if (mixing_cmd->parsed()) return cmd_mixing(cfg);
        if (converge_cmd->parsed()) return cmd_converge(cfg);
    } catch (const sofic::Error& e) {
        return fail(e.code(), e.what(), e.exit_code());
    } catch (const std::exception& e) {
        return fail("InternalError", e.what(), 1);
    }
    return 0;
}
