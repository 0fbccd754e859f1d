// Batch driver for the star-algebra pipelines.  Every subcommand reads an
// optional JSON config, runs one pipeline, and writes a JSON report with
// residuals, timings, and a config echo.  Exit 0 on success, 1 when an
// asserted residual fails (report still written), 2 on config errors.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>

#include "heavenly/heavenly.hpp"

using namespace heavenly;

using X = GaussianRational;

namespace {

constexpr int kSchemaVersion = 1;

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        auto d = std::chrono::steady_clock::now() - start_;
        return std::chrono::duration<double, std::milli>(d).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

struct RunConfig {
    Json raw = Json::object();
    std::string out_path;
    double tolerance = 1e-8;
    int nodes = 256;
    int t_max = 3;
    int k_max = 6;
    int depth = 3;
    bool use_float = false;

    bool has(const char* key) const { return raw.contains(key); }
    template <class T>
    T get(const char* key, T fallback) const {
        return raw.contains(key) ? raw.at(key).get<T>() : fallback;
    }
};

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("bad JSON in '" + path + "': " + e.what());
    }
    return j;
}

/// Evaluate a lambda-free twistor spec to a graded series.
template <class S>
GradedSeries<S> series_from_spec(const std::string& text, int t_max, int k_max) {
    auto s = evaluate_spec<S>(text, t_max, k_max);
    for (auto& [j, c] : s.terms())
        if (j != 0 && !c.is_zero())
            throw ParseError("series spec '" + text + "' is not lambda-free");
    return s.at(0);
}

template <class S>
ThetaField<S> load_theta(const RunConfig& cfg) {
    auto bg = background_from_json<S>(cfg.get<Json>("background", Json{{"ref", "flat"}}));
    if (cfg.has("theta_spec"))
        return {series_from_spec<S>(cfg.raw.at("theta_spec").get<std::string>(), cfg.t_max,
                                    cfg.k_max),
                bg};
    if (cfg.has("theta")) {
        const Json& j = cfg.raw.at("theta");
        const Json& body = j.contains("theta") ? j.at("theta") : j;
        if (j.contains("background")) bg = background_from_json<S>(j.at("background"));
        return {series_from_json<S>(body).rehomed(cfg.t_max, cfg.k_max), bg};
    }
    return {GradedSeries<S>(cfg.t_max, cfg.k_max), bg};
}

/// Boundary datum on the contour nodes from the config: an exponent spec
/// (H = exp of it), explicit per-node series, or the unit element.
ContourSeries load_datum(const RunConfig& cfg, const Contour& contour) {
    ContourSeries H;
    H.side = Side::Off;
    if (cfg.has("datum_exponent")) {
        auto f = to_float(evaluate_spec<X>(cfg.raw.at("datum_exponent").get<std::string>(),
                                           cfg.t_max, cfg.k_max));
        H.values.reserve(static_cast<size_t>(contour.N));
        for (int j = 0; j < contour.N; ++j)
            H.values.push_back(series_exp(evaluate_at(f, contour.node(j))));
        return H;
    }
    if (cfg.has("datum_nodes")) {
        const Json& arr = cfg.raw.at("datum_nodes");
        if (!arr.is_array() || static_cast<int>(arr.size()) != contour.N)
            throw ParseError("datum_nodes must list one series per contour node");
        for (auto& entry : arr) H.values.push_back(series_from_json<Complex>(entry));
        return H;
    }
    if (cfg.get<bool>("datum_unit", false)) {
        H.values.assign(static_cast<size_t>(contour.N),
                        GradedSeries<Complex>::unit(cfg.t_max, cfg.k_max));
        return H;
    }
    throw ParseError("no boundary datum: set datum_exponent, datum_nodes, or datum_unit");
}

// ---------------------------------------------------------------------------
// randomized inputs for the property suite
// ---------------------------------------------------------------------------

template <class S>
RingElement<S> rand_coeff(std::mt19937& gen, int max_deg) {
    std::uniform_int_distribution<int> ed(0, max_deg);
    std::uniform_int_distribution<int> cd(-4, 4);
    std::uniform_int_distribution<int> nt(1, 3);
    Polynomial<S> p;
    for (int t = 0, n = nt(gen); t < n; ++t) {
        Mono m = mono_one();
        m[VQ] = ed(gen);
        m[VP] = ed(gen);
        m[VW] = ed(gen) % 2;
        m[VZT] = ed(gen) % 2;
        int c = cd(gen);
        if (c != 0) p.add_term(m, scalar_traits<S>::from_ratio(c, 1));
    }
    return RingElement<S>(p);
}

template <class S>
GradedSeries<S> rand_series(std::mt19937& gen, int t_max, int k_max, bool algebra,
                            int k_min = 0) {
    GradedSeries<S> s(t_max, k_max);
    std::uniform_int_distribution<int> kd(k_min, k_min + 2);
    for (int m = algebra ? 1 : 0; m <= t_max; ++m) {
        auto c = rand_coeff<S>(gen, 3);
        if (!c.is_zero()) s.add({m, kd(gen)}, c);
    }
    return s;
}

template <class S>
double residual_norm(const GradedSeries<S>& s) {
    if constexpr (scalar_traits<S>::exact)
        return s.is_zero() ? 0.0 : 1.0;
    else
        return s.max_abs();
}

// ---------------------------------------------------------------------------
// subcommand bodies; each fills report["residuals"] and returns ok
// ---------------------------------------------------------------------------

template <class S>
bool run_algebra_check(const RunConfig& cfg, Json& report) {
    const int trials = cfg.get<int>("trials", 100);
    std::mt19937 gen(static_cast<unsigned>(cfg.get<int>("seed", 20260824)));
    const int t_max = cfg.t_max, k_max = cfg.k_max;
    int failures = 0;
    double worst = 0.0;
    auto tally = [&](const GradedSeries<S>& diff) {
        double r = residual_norm(diff);
        worst = std::max(worst, r);
        if (r > (scalar_traits<S>::exact ? 0.0 : cfg.tolerance)) ++failures;
    };
    for (int it = 0; it < trials; ++it) {
        auto a = rand_series<S>(gen, t_max, k_max, false);
        auto b = rand_series<S>(gen, t_max, k_max, false);
        auto c = rand_series<S>(gen, t_max, k_max, false);
        auto u = GradedSeries<S>::unit(t_max, k_max);
        tally(star_multiply(star_multiply(a, b), c) - star_multiply(a, star_multiply(b, c)));
        tally(star_multiply(u, a) - a);
        tally(star_multiply(a, u) - a);
        // Jacobi
        tally(star_bracket(a, star_bracket(b, c)) + star_bracket(b, star_bracket(c, a)) +
              star_bracket(c, star_bracket(a, b)));
        // first Moyal term antisymmetrizes to i * Poisson
        auto f = rand_coeff<S>(gen, 3);
        auto g = rand_coeff<S>(gen, 3);
        auto anti = MoyalProduct::delta(1, f, g) - MoyalProduct::delta(1, g, f);
        auto pois = (f.derivative(VQ) * g.derivative(VP) - f.derivative(VP) * g.derivative(VQ))
                        .scaled(scalar_traits<S>::i());
        GradedSeries<S> bridge(t_max, k_max);
        auto d = anti - pois;
        if (!d.is_zero()) bridge.add({0, 0}, d);
        tally(bridge);
        // exp/log and inverse roundtrips on the group slice
        auto q = rand_series<S>(gen, t_max, k_max, true);
        auto e = series_exp(q);
        tally(series_log(e) - q);
        tally(star_multiply(e, series_inverse(e)) - u);
    }
    report["residuals"]["trials"] = trials;
    report["residuals"]["failures"] = failures;
    report["residuals"]["worst"] = worst;
    return failures == 0;
}

template <class S>
bool run_background(const RunConfig& cfg, Json& report) {
    auto bg = background_from_json<S>(cfg.get<Json>("background", Json{{"ref", "flat"}}));
    auto rep = verify_asd_basis(bg);
    report["residuals"]["heavenly"] = bg.heavenly;
    report["residuals"]["basis_closed"] = rep.closed;
    report["residuals"]["basis_degenerate"] = rep.degenerate;
    report["residuals"]["witnesses"] = rep.witnesses;
    report["background"] = background_to_json(bg);
    return bg.heavenly && rep.ok();
}

template <class S>
bool run_hierarchy(const RunConfig& cfg, Json& report) {
    auto th = load_theta<S>(cfg);
    auto kind_name = cfg.get<std::string>("kind", "D");
    if (kind_name != "L" && kind_name != "D") throw ParseError("kind must be L or D");
    TowerKind kind = kind_name == "L" ? TowerKind::L : TowerKind::D;
    auto seed = cfg.has("seed_spec")
                    ? series_from_spec<S>(cfg.raw.at("seed_spec").get<std::string>(), cfg.t_max,
                                          cfg.k_max)
                    : GradedSeries<S>::unit(cfg.t_max, cfg.k_max);
    auto tower = hierarchy_generate(th, kind, seed, cfg.depth);
    bool ok = true;
    report["residuals"]["divergence"] = Json::array();
    for (auto& member : tower.members) {
        double r = residual_norm(current_divergence(th, kind, member));
        report["residuals"]["divergence"].push_back(r);
        ok = ok && r <= (scalar_traits<S>::exact ? 0.0 : cfg.tolerance);
    }
    report["tower"] = tower_to_json(tower, th, cfg.get<Json>("background", Json{{"ref", "flat"}}));
    return ok;
}

template <class S>
bool run_lax(const RunConfig& cfg, Json& report) {
    auto th = load_theta<S>(cfg);
    auto tower = hierarchy_generate(th, TowerKind::D, GradedSeries<S>::unit(cfg.t_max, cfg.k_max),
                                    cfg.depth);
    auto psi = assemble_wavefunction(tower.members, Chart::Origin);
    bool ok = true;
    report["residuals"]["defect"] = Json::object();
    for (int alpha = 0; alpha < 2; ++alpha) {
        auto defect = lax_apply(th, alpha, psi);
        Json per_power = Json::object();
        for (auto& [j, c] : defect.terms()) {
            per_power[std::to_string(j)] = residual_norm(c);
            if (j <= cfg.depth && residual_norm(c) > (scalar_traits<S>::exact ? 0.0 : cfg.tolerance))
                ok = false;
        }
        report["residuals"]["defect"][alpha == 0 ? "w" : "z"] = per_power;
    }
    std::mt19937 gen(static_cast<unsigned>(cfg.get<int>("seed", 7)));
    SpectralSeries<S> probe(cfg.t_max, cfg.k_max, Chart::Origin);
    probe.add(0, rand_series<S>(gen, cfg.t_max, cfg.k_max, false, 1));
    auto rep = lax_defect(th, psi, probe);
    report["residuals"]["contraction_ok"] = rep.contraction_ok;
    return ok && rep.contraction_ok;
}

template <class S>
bool run_symmetry(const RunConfig& cfg, Json& report) {
    auto th = load_theta<S>(cfg);
    auto parse_pair = [&](const char* fk, const char* fuk) {
        SpectralSeries<S> F(cfg.t_max, cfg.k_max, Chart::Annulus);
        SpectralSeries<S> Fu(cfg.t_max, cfg.k_max, Chart::Annulus);
        if (cfg.has(fk)) F = evaluate_spec<S>(cfg.raw.at(fk).get<std::string>(), cfg.t_max,
                                              cfg.k_max);
        if (cfg.has(fuk)) Fu = evaluate_spec<S>(cfg.raw.at(fuk).get<std::string>(), cfg.t_max,
                                                cfg.k_max);
        return std::pair(F, Fu);
    };
    auto [F, Fu] = parse_pair("f", "f_under");
    auto delta = symmetry_delta(th, F, Fu);
    report["residuals"]["lme"] = residual_norm(lme_residual(th, delta));
    report["delta"] = series_to_json(delta);
    bool ok = report["residuals"]["lme"].get<double>() <=
              (scalar_traits<S>::exact ? 0.0 : cfg.tolerance);
    if (cfg.has("f2") || cfg.has("f2_under")) {
        auto [F2, F2u] = parse_pair("f2", "f2_under");
        auto rep = symmetry_bracket_check(th, F, Fu, F2, F2u, cfg.get<int>("order", 2));
        report["residuals"]["bracket_diff"] = residual_norm(rep.diff);
        report["residuals"]["bracket_ok"] = rep.ok;
        ok = ok && rep.ok;
    }
    return ok;
}

bool run_factorize(const RunConfig& cfg, Json& report) {
    Contour contour(cfg.nodes);
    auto H = load_datum(cfg, contour);
    auto res = birkhoff_factorize(H, contour, cfg.tolerance);
    report["residuals"]["factor"] = res.factor_residual;
    report["residuals"]["leakage"] = res.hilbert.leakage;
    report["residuals"]["accompanying"] = res.hilbert.accompanying_max;
    report["residuals"]["boundary"] = res.hilbert.boundary_residual;
    if (cfg.get<bool>("emit_factors", false)) {
        report["psi"] = spectral_to_json(res.psi);
        report["psi_under"] = spectral_to_json(res.psi_under);
    }
    return res.factor_residual <= cfg.tolerance && res.hilbert.leakage <= cfg.tolerance &&
           res.hilbert.accompanying_max <= cfg.tolerance;
}

bool run_inverse_pw(const RunConfig& cfg, Json& report) {
    Contour contour(cfg.nodes);
    auto H = load_datum(cfg, contour);
    auto bg = background_from_json<X>(cfg.get<Json>("background", Json{{"ref", "flat"}}));
    auto res = birkhoff_factorize(H, contour, cfg.tolerance);
    report["residuals"]["factor"] = res.factor_residual;
    report["residuals"]["leakage"] = res.hilbert.leakage;
    auto conn = extract_connection(res.psi, bg, cfg.tolerance);
    report["residuals"]["liouville"] = conn.liouville_defect;
    report["residuals"]["sdym"] = conn.sdym_norms;
    auto ext = extract_theta(res.psi, bg, cfg.tolerance);
    report["residuals"]["master_equation"] = ext.me_norm;
    report["residuals"]["gauge_defect"] = ext.gauge_defect;
    report["theta"] = series_to_json(ext.theta);
    bool ok = res.factor_residual <= cfg.tolerance && res.hilbert.leakage <= cfg.tolerance &&
              conn.liouville_defect <= cfg.tolerance && ext.me_norm <= cfg.tolerance &&
              ext.gauge_defect <= cfg.tolerance;
    for (double r : conn.sdym_norms) ok = ok && r <= cfg.tolerance;
    return ok;
}

template <class F>
int dispatch(const RunConfig& cfg, const std::string& name, F body) {
    Json report;
    report["schema_version"] = kSchemaVersion;
    report["subcommand"] = name;
    report["config"] = cfg.raw;
    report["config"]["tolerance"] = cfg.tolerance;
    report["config"]["nodes"] = cfg.nodes;
    report["config"]["t_max"] = cfg.t_max;
    report["config"]["k_max"] = cfg.k_max;
    report["config"]["depth"] = cfg.depth;
    report["config"]["mode"] = cfg.use_float ? "float" : "exact";
    bool ok = false;
    std::string failure;
    Stopwatch clock;
    try {
        ok = body(report);
    } catch (const ResidualExceeded& e) {
        failure = e.what();
    } catch (const LiouvilleViolation& e) {
        failure = e.what();
    }
    report["timings_ms"]["run"] = clock.ms();
    if (!failure.empty()) report["error"] = failure;
    report["ok"] = ok;
    if (cfg.out_path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream out(cfg.out_path);
        if (!out) throw ParseError("cannot write '" + cfg.out_path + "'");
        out << report.dump(2) << "\n";
        std::cout << name << ": " << (ok ? "ok" : "FAIL") << " (report " << cfg.out_path << ")\n";
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"star-bracket self-dual Yang-Mills pipelines"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path, theta_path, kind, f_spec, fu_spec, theta_spec;
    bool exact_flag = false, float_flag = false;
    std::map<std::string, std::vector<CLI::Option*>> given;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", cfg.out_path, "report output path");
        given["tolerance"].push_back(
            sub->add_option("--tolerance", cfg.tolerance, "residual tolerance"));
        given["nodes"].push_back(sub->add_option("--nodes", cfg.nodes, "contour node count"));
        given["t_max"].push_back(sub->add_option("--tmax", cfg.t_max, "t-grading cutoff"));
        given["k_max"].push_back(sub->add_option("--kmax", cfg.k_max, "hbar-grading cutoff"));
        given["depth"].push_back(
            sub->add_option("--depth", cfg.depth, "tower / wavefunction depth"));
        sub->add_flag("--exact", exact_flag, "exact rational scalars");
        sub->add_flag("--float", float_flag, "floating-point scalars");
        return sub;
    };
    auto add_theta = [&](CLI::App* sub) {
        sub->add_option("--theta", theta_path, "theta JSON file");
        sub->add_option("--theta-spec", theta_spec, "theta as a lambda-free spec string");
        return sub;
    };

    auto* sc_algebra = add_common(app.add_subcommand("algebra-check", "randomized property suite"));
    auto* sc_background = add_common(app.add_subcommand("background", "build and verify"));
    auto* sc_hierarchy = add_theta(add_common(app.add_subcommand("hierarchy", "charge towers")));
    sc_hierarchy->add_option("--kind", kind, "tower kind, L or D");
    auto* sc_lax = add_theta(add_common(app.add_subcommand("lax", "wavefunction and defects")));
    auto* sc_symmetry = add_theta(add_common(app.add_subcommand("symmetry", "hidden-symmetry shift")));
    sc_symmetry->add_option("--f", f_spec, "origin-chart generator spec");
    sc_symmetry->add_option("--fu", fu_spec, "infinity-chart generator spec");
    auto* sc_factorize = add_common(app.add_subcommand("factorize", "Birkhoff splitting"));
    auto* sc_inverse = add_common(app.add_subcommand("inverse-pw", "datum to potential"));

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) cfg.raw = load_json_file(config_path);
        // flags override the file
        if (!theta_path.empty()) cfg.raw["theta"] = load_json_file(theta_path);
        if (!theta_spec.empty()) cfg.raw["theta_spec"] = theta_spec;
        if (!kind.empty()) cfg.raw["kind"] = kind;
        if (!f_spec.empty()) cfg.raw["f"] = f_spec;
        if (!fu_spec.empty()) cfg.raw["f_under"] = fu_spec;
        // the config file fills anything the command line left at its default
        auto from_file = [&](const char* key) {
            if (!cfg.raw.contains(key)) return false;
            for (auto* opt : given[key])
                if (opt->count() > 0) return false;
            return true;
        };
        if (from_file("tolerance")) cfg.tolerance = cfg.raw["tolerance"].get<double>();
        if (from_file("nodes")) cfg.nodes = cfg.raw["nodes"].get<int>();
        if (from_file("t_max")) cfg.t_max = cfg.raw["t_max"].get<int>();
        if (from_file("k_max")) cfg.k_max = cfg.raw["k_max"].get<int>();
        if (from_file("depth")) cfg.depth = cfg.raw["depth"].get<int>();
        if (exact_flag && float_flag) throw ParseError("--exact and --float are exclusive");
        cfg.use_float = float_flag;
        if (cfg.tolerance <= 0.0) throw ParseError("tolerance must be positive");

        auto sym = [&](const std::string& name, auto exact_body, auto float_body) {
            return cfg.use_float ? dispatch(cfg, name, float_body)
                                 : dispatch(cfg, name, exact_body);
        };
        if (*sc_algebra)
            return sym("algebra-check",
                       [&](Json& r) { return run_algebra_check<X>(cfg, r); },
                       [&](Json& r) { return run_algebra_check<Complex>(cfg, r); });
        if (*sc_background)
            return sym("background", [&](Json& r) { return run_background<X>(cfg, r); },
                       [&](Json& r) { return run_background<Complex>(cfg, r); });
        if (*sc_hierarchy)
            return sym("hierarchy", [&](Json& r) { return run_hierarchy<X>(cfg, r); },
                       [&](Json& r) { return run_hierarchy<Complex>(cfg, r); });
        if (*sc_lax)
            return sym("lax", [&](Json& r) { return run_lax<X>(cfg, r); },
                       [&](Json& r) { return run_lax<Complex>(cfg, r); });
        if (*sc_symmetry)
            return sym("symmetry", [&](Json& r) { return run_symmetry<X>(cfg, r); },
                       [&](Json& r) { return run_symmetry<Complex>(cfg, r); });
        if (*sc_factorize) {
            if (exact_flag) throw ParseError("factorize runs in float mode only");
            return dispatch(cfg, "factorize", [&](Json& r) { return run_factorize(cfg, r); });
        }
        if (*sc_inverse) {
            if (exact_flag) throw ParseError("inverse-pw runs in float mode only");
            return dispatch(cfg, "inverse-pw", [&](Json& r) { return run_inverse_pw(cfg, r); });
        }
    } catch (const ResidualExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const LiouvilleViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
