// Command-line front end: region scans, M values, certificates, tables,
// special-function profiles, sampling runs and dilation searches.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gabor/certify.hpp"
#include "gabor/frameset.hpp"
#include "gabor/io.hpp"
#include "gabor/lattice.hpp"
#include "gabor/sampling.hpp"
#include "gabor/special.hpp"
#include "gabor/window.hpp"

using nlohmann::json;
using namespace gabor;

namespace {

// Inline spec, JSON object literal, or path to a .json file.
Window load_window(const std::string& spec) {
    if (!spec.empty() && spec.front() == '{') {
        try {
            return window_from_json(json::parse(spec));
        } catch (const json::parse_error& e) {
            throw Error(Errc::Validation, std::string("window JSON: ") + e.what());
        }
    }
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
        std::ifstream in(spec);
        if (!in) throw Error(Errc::Validation, "cannot read window file '" + spec + "'");
        try {
            return window_from_json(json::parse(in));
        } catch (const json::parse_error& e) {
            throw Error(Errc::Validation, std::string("window JSON: ") + e.what());
        }
    }
    return parse_window_spec(spec);
}

Side parse_side(const std::string& s) {
    if (s == "primal") return Side::Primal;
    if (s == "dual") return Side::Dual;
    throw Error(Errc::Validation, "side must be 'primal' or 'dual'");
}

void emit(const json& summary) { std::cout << summary.dump() << std::endl; }

struct Lattice {
    int grid = 4096;
    double tol = 1e-13;

    LatticeOptions options(Side side = Side::Primal) const {
        LatticeOptions o;
        o.grid_size = grid;
        o.tol = tol;
        o.side = side;
        return o;
    }
};

void add_lattice_flags(CLI::App* app, Lattice& l) {
    app->add_option("--grid", l.grid, "grid points on [0, 1/h]")->capture_default_str();
    app->add_option("--tol", l.tol, "relative tail tolerance")->capture_default_str();
}

// ---------------------------------------------------------------- region

struct RegionArgs {
    std::string window;
    std::vector<double> alpha_range{0.0, 2.0}, beta_range{0.0, 2.0};
    int res = 200;
    int alpha_res = 0, beta_res = 0;
    std::vector<std::string> overlays;
    int threads = 0;
    std::string out = "region.csv";
    Lattice lattice;
};

int run_region(const RegionArgs& a) {
    ScanOptions o;
    o.alpha_lo = a.alpha_range[0];
    o.alpha_hi = a.alpha_range[1];
    o.beta_lo = a.beta_range[0];
    o.beta_hi = a.beta_range[1];
    o.alpha_res = a.alpha_res > 0 ? a.alpha_res : a.res;
    o.beta_res = a.beta_res > 0 ? a.beta_res : a.res;
    o.lattice = a.lattice.options();
    o.threads = a.threads;
    for (const auto& s : a.overlays) o.overlays.push_back(parse_overlay(s));
    const auto g = scan(load_window(a.window), o);
    const std::string meta_path = a.out + ".meta.json";
    const json meta = region_meta(g);
    write_atomic(a.out, region_csv(g));
    write_atomic(meta_path, meta.dump(2) + "\n");
    emit({{"command", "region"}, {"csv", a.out}, {"meta", meta_path}, {"cells", g.cells.size()},
          {"verdicts", meta["verdicts"]}});
    return 0;
}

// ---------------------------------------------------------------- mvalue

struct MValueArgs {
    std::string window;
    double h = 0.0, beta = 0.0, alpha = 0.0;
    std::string side = "primal";
    std::string profile;
    Lattice lattice;
};

int run_mvalue(const MValueArgs& a) {
    if ((a.h > 0.0) == (a.beta > 0.0)) throw Error(Errc::Validation, "give exactly one of --h and --beta");
    const double h = a.h > 0.0 ? a.h : 1.0 / a.beta;
    const Window w = load_window(a.window);
    const auto opt = a.lattice.options(parse_side(a.side));
    const auto st = stability_check(w, h, opt.grid_size, opt.stability_threshold, opt.side);
    const auto m = m_value_detail(w, h, opt);
    json out = {{"command", "mvalue"},     {"window", to_json(w)},     {"h", h},
                {"side", a.side},          {"m", m.value},             {"argmax_w", m.argmax_w},
                {"stable", st.stable},     {"essinf", st.essinf_est},  {"esssup", st.esssup_est}};
    if (a.alpha > 0.0) {
        if (opt.side != Side::Primal) throw Error(Errc::Validation, "--alpha needs the primal side");
        out["alpha"] = a.alpha;
        out["frame_bounds"] = frame_bounds_json(frame_bounds(w, a.alpha, 1.0 / h, opt));
    }
    if (!a.profile.empty()) {
        write_atomic(a.profile, profile_csv(periodize(w, h, opt)));
        out["profile"] = a.profile;
    }
    emit(out);
    return 0;
}

// ---------------------------------------------------------------- certify

struct CertifyArgs {
    int case_id = 0;
    std::string beta;
    std::string poly;
    std::vector<std::string> interval{"-1", "1"};
    std::string method = "both";
    std::string out = "certificate.json";
    std::string text;
};

int run_certify(const CertifyArgs& a) {
    RationalPoly p;
    json source;
    if (!a.poly.empty()) {
        std::vector<Rational> c;
        for (const auto& s : detail::split(a.poly, ',')) c.push_back(parse_rational(s));
        p = RationalPoly(std::move(c));
        source = {{"poly", p.to_string()}};
    } else {
        if (a.case_id != 2 && a.case_id != 3) throw Error(Errc::Validation, "--case must be 2 or 3 (or give --poly)");
        if (a.beta.empty()) throw Error(Errc::Validation, "--case needs --beta");
        const Rational beta = parse_rational(a.beta);
        p = case_polys(a.case_id == 2 ? CaseId::Case2 : CaseId::Case3, beta);
        source = {{"case", a.case_id}, {"beta", rational_json(beta)}, {"poly", p.to_string("u")}};
    }
    const Rational lo = parse_rational(a.interval.at(0)), hi = parse_rational(a.interval.at(1));
    json doc = {{"source", source}, {"coefficients", poly_json(p)}};
    std::string text;
    json summary = {{"command", "certify"}, {"out", a.out}};
    if (a.method == "bf" || a.method == "both") {
        const auto c = budan_fourier(p, lo, hi);
        doc["budan_fourier"] = certificate_json(c);
        text += certificate_text(c);
        summary["budan_fourier_bound"] = c.zero_count_bound;
    }
    if (a.method == "sturm" || a.method == "both") {
        const auto c = sturm(p, lo, hi);
        doc["sturm"] = certificate_json(c);
        text += certificate_text(c);
        summary["sturm_count"] = c.zero_count_bound;
    }
    if (a.method != "bf" && a.method != "sturm" && a.method != "both")
        throw Error(Errc::Validation, "--method must be bf, sturm or both");
    write_atomic(a.out, doc.dump(2) + "\n");
    if (!a.text.empty()) {
        write_atomic(a.text, text);
        summary["text"] = a.text;
    }
    emit(summary);
    return 0;
}

// ---------------------------------------------------------------- tables

int run_tables(const std::string& text_path, const std::string& json_path) {
    const auto rows = reproduce_tables();
    write_atomic(text_path, tables_text(rows));
    write_atomic(json_path, tables_json(rows).dump(2) + "\n");
    int undetermined = 0, resolved = 0;
    for (const auto& r : rows) {
        if (!r.determined) ++undetermined;
        if (r.resolution && r.resolution->zero_count_bound == 0) ++resolved;
    }
    emit({{"command", "tables"}, {"rows", rows.size()}, {"budan_fourier_inconclusive", undetermined},
          {"resolved_by_sturm", resolved}, {"text", text_path}, {"json", json_path}});
    return 0;
}

// ---------------------------------------------------------------- special

struct SpecialArgs {
    double rho = 1.0, a = 1.0, b = 2.0;
    int points = 4097;
    double w = 0.25, t = 1.0;
    std::string base = "gaussian";
    std::vector<double> factors;
    double h = 1.0;
    std::string window = "gaussian";
    std::string kind = "type1";
    double param = 1.0;
    std::vector<double> gammas;
    std::string out;
};

int write_profile(const std::string& what, const RatioProfile& p, const std::string& out, json extra) {
    json s = profile_json(p);
    s["command"] = "special";
    s["what"] = what;
    for (auto& [k, v] : extra.items()) s[k] = v;
    if (!out.empty()) {
        write_atomic(out, profile_csv(p));
        write_atomic(out + ".meta.json", s.dump(2) + "\n");
        s["csv"] = out;
    }
    emit(s);
    return 0;
}

int run_special(const std::string& what, const SpecialArgs& a) {
    if (what == "theta") {
        const auto e = theta_eval(a.w, a.t);
        emit({{"command", "special"}, {"what", "theta"}, {"w", e.w}, {"t", e.t}, {"theta", e.theta},
              {"dtheta_dw", e.dtheta_dw}, {"q_ratio", e.q_ratio}, {"lower", e.lower}, {"upper", e.upper},
              {"within_bounds", e.lower <= e.q_ratio && e.q_ratio <= e.upper}});
        return 0;
    }
    if (what == "gauss") return write_profile(what, gauss_profile(a.rho, a.points), a.out, json::object());
    if (what == "exp") {
        const auto p = exp_profile(a.rho, a.points);
        return write_profile(what, p, a.out, {{"I_cross_check", p.I_cross_check}});
    }
    if (what == "twopole") {
        const double c = a.rho / a.a, d = a.rho / a.b;
        return write_profile(what, twopole_profile(a.a, a.b, a.rho, a.points), a.out,
                             {{"c", c}, {"d", d}, {"identity_residual", twopole_identity_residual(std::abs(c), std::abs(d))}});
    }
    if (what == "chain") {
        const auto r = tp_monotonicity_check(load_window(a.base), a.factors, a.h, a.points);
        emit({{"command", "special"}, {"what", "chain"}, {"chain_length", r.chain_length},
              {"violations", r.violations}, {"max_violation", r.max_violation}, {"monotone", r.monotone},
              {"proven", r.proven}});
        return 0;
    }
    if (what == "limit") {
        LimitKind k;
        if (a.kind == "type1") k = LimitKind::TypeIGammaToZero;
        else if (a.kind == "type2") k = LimitKind::TypeIIGammaToInf;
        else throw Error(Errc::Validation, "--kind must be type1 or type2");
        const auto r = dilation_limit_check(k, load_window(a.window), a.param, a.gammas, a.points);
        emit({{"command", "special"}, {"what", "limit"}, {"limit", r.limit}, {"gammas", r.gammas},
              {"m_values", r.m_values}, {"distances", r.distances}, {"monotone_approach", r.monotone_approach},
              {"lower_bound_holds", r.lower_bound_holds}, {"evaluation", r.evaluation}});
        return 0;
    }
    throw Error(Errc::Validation, "unknown special check '" + what + "'");
}

// ---------------------------------------------------------------- sampling-check

struct SamplingArgs {
    std::string window = "bspline:3";
    double h = 1.0;
    int seeds = 10;
    std::uint64_t seed0 = 1;
    int coeffs = 32;
    double spacing = 0.2;
    double jitter = 0.05;
    std::string out;
};

int run_sampling(const SamplingArgs& a) {
    const Window w = load_window(a.window);
    const double m = m_value(w, a.h);
    int lower_fail = 0, upper_fail = 0, bern_fail = 0;
    std::string records;
    for (int s = 0; s < a.seeds; ++s) {
        const std::uint64_t seed = a.seed0 + static_cast<std::uint64_t>(s);
        const auto f = synth(w, a.h, a.coeffs, seed);
        const auto [lo, hi] = sampling_window(f, a.spacing);
        const auto set = jittered_grid(lo, hi, a.spacing, a.jitter, seed ^ 0x9e3779b97f4a7c15ULL);
        const auto r = sampling_bounds_check(f, set, m);
        const double ratio = bernstein_ratio(f);
        const bool bern_ok = ratio <= std::sqrt(m) * (1.0 + 1e-8);
        lower_fail += !r.lower_ok;
        upper_fail += !r.upper_ok;
        bern_fail += !bern_ok;
        json rec = sampling_json(r);
        rec["seed"] = seed;
        rec["bernstein_ratio"] = ratio;
        rec["bernstein_ok"] = bern_ok;
        records += rec.dump() + "\n";
    }
    if (!a.out.empty()) write_atomic(a.out, records);
    json s = {{"command", "sampling-check"}, {"window", to_json(w)}, {"h", a.h},          {"m_value", m},
              {"runs", a.seeds},            {"lower_failures", lower_fail}, {"upper_failures", upper_fail},
              {"bernstein_failures", bern_fail}};
    if (!a.out.empty()) s["records"] = a.out;
    emit(s);
    return 0;
}

// ---------------------------------------------------------------- gamma-search

struct GammaArgs {
    std::string window;
    double alpha = 0.0, beta = 0.0;
    std::string direction = "zero";
    int budget = 60;
    Lattice lattice;
};

int run_gamma(const GammaArgs& a) {
    Direction d;
    if (a.direction == "zero") d = Direction::ToZero;
    else if (a.direction == "inf") d = Direction::ToInfinity;
    else throw Error(Errc::Validation, "--direction must be zero or inf");
    const auto r = gamma_search(load_window(a.window), a.alpha, a.beta, d, a.budget, a.lattice.options());
    json s = gamma_search_json(r);
    s["command"] = "gamma-search";
    emit(s);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sufficient Gabor frame regions and their certificates"};
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);

    RegionArgs region;
    auto* c_region = app.add_subcommand("region", "scan the (alpha, beta) plane");
    c_region->add_option("--window", region.window, "window spec")->required();
    c_region->add_option("--alpha-range", region.alpha_range, "alpha range (lo, hi]")->expected(2);
    c_region->add_option("--beta-range", region.beta_range, "beta range (lo, hi]")->expected(2);
    c_region->add_option("--res", region.res, "cells per axis")->capture_default_str();
    c_region->add_option("--alpha-res", region.alpha_res, "cells along alpha");
    c_region->add_option("--beta-res", region.beta_res, "cells along beta");
    c_region->add_option("--overlay", region.overlays, "ofsb_q2 or sign_region_qM");
    c_region->add_option("--threads", region.threads, "worker threads (default: GABOR_THREADS or 1)");
    c_region->add_option("--out", region.out, "CSV path; metadata goes to <out>.meta.json")->capture_default_str();
    add_lattice_flags(c_region, region.lattice);

    MValueArgs mv;
    auto* c_mv = app.add_subcommand("mvalue", "evaluate M_{phi,h}");
    c_mv->add_option("--window", mv.window, "window spec")->required();
    c_mv->add_option("--h", mv.h, "lattice step h");
    c_mv->add_option("--beta", mv.beta, "shorthand for h = 1/beta");
    c_mv->add_option("--side", mv.side, "primal or dual")->capture_default_str();
    c_mv->add_option("--profile", mv.profile, "write the periodization profile CSV here");
    c_mv->add_option("--alpha", mv.alpha, "also report frame bounds at this time step");
    add_lattice_flags(c_mv, mv.lattice);

    CertifyArgs cert;
    auto* c_cert = app.add_subcommand("certify", "exact root-count certificate");
    c_cert->add_option("--case", cert.case_id, "2 (P_beta) or 3 (K_beta)");
    c_cert->add_option("--beta", cert.beta, "rational beta, e.g. 7/4");
    c_cert->add_option("--poly", cert.poly, "comma separated rational coefficients, constant first");
    c_cert->add_option("--interval", cert.interval, "endpoints a b")->expected(2);
    c_cert->add_option("--method", cert.method, "bf, sturm or both")->capture_default_str();
    c_cert->add_option("--out", cert.out, "certificate JSON")->capture_default_str();
    c_cert->add_option("--text", cert.text, "also write the sign-sequence listing here");

    std::string tables_text_path = "tables.txt", tables_json_path = "tables.json";
    auto* c_tab = app.add_subcommand("tables", "reproduce the endpoint sign tables");
    c_tab->add_option("--text", tables_text_path, "text output")->capture_default_str();
    c_tab->add_option("--json", tables_json_path, "JSON output")->capture_default_str();

    SpecialArgs sp;
    std::string special_what;
    auto* c_sp = app.add_subcommand("special", "theta, ratio profiles, factor chains, dilation limits");
    c_sp->add_option("what", special_what, "theta | gauss | exp | twopole | chain | limit")->required();
    c_sp->add_option("--rho", sp.rho, "profile parameter rho");
    c_sp->add_option("--a", sp.a, "two-pole a");
    c_sp->add_option("--b", sp.b, "two-pole b");
    c_sp->add_option("--points", sp.points, "grid points")->capture_default_str();
    c_sp->add_option("--w", sp.w, "theta: w");
    c_sp->add_option("--t", sp.t, "theta: t");
    c_sp->add_option("--base", sp.base, "chain: base window (gaussian, exp, twopole:A,B)");
    c_sp->add_option("--factors", sp.factors, "chain: factor list")->delimiter(',');
    c_sp->add_option("--h", sp.h, "chain: lattice step");
    c_sp->add_option("--window", sp.window, "limit: window spec");
    c_sp->add_option("--kind", sp.kind, "limit: type1 or type2");
    c_sp->add_option("--param", sp.param, "limit: beta (type1) or alpha (type2)");
    c_sp->add_option("--gammas", sp.gammas, "limit: dilations sorted toward the limit")->delimiter(',');
    c_sp->add_option("--out", sp.out, "profile CSV (with <out>.meta.json)");

    SamplingArgs sm;
    auto* c_sm = app.add_subcommand("sampling-check", "Bernstein and sampling inequalities on random splines");
    c_sm->add_option("--window", sm.window, "window spec")->capture_default_str();
    c_sm->add_option("--h", sm.h, "lattice step")->capture_default_str();
    c_sm->add_option("--seeds", sm.seeds, "number of random instances")->capture_default_str();
    c_sm->add_option("--seed", sm.seed0, "first seed")->capture_default_str();
    c_sm->add_option("--coeffs", sm.coeffs, "coefficients per spline")->capture_default_str();
    c_sm->add_option("--spacing", sm.spacing, "nominal sampling gap")->capture_default_str();
    c_sm->add_option("--jitter", sm.jitter, "jitter magnitude")->capture_default_str();
    c_sm->add_option("--out", sm.out, "JSON lines, one record per instance");

    GammaArgs gs;
    auto* c_gs = app.add_subcommand("gamma-search", "find a dilation meeting the sufficient condition");
    c_gs->add_option("--window", gs.window, "window spec")->required();
    c_gs->add_option("--alpha", gs.alpha, "alpha")->required();
    c_gs->add_option("--beta", gs.beta, "beta")->required();
    c_gs->add_option("--direction", gs.direction, "zero or inf")->capture_default_str();
    c_gs->add_option("--budget", gs.budget, "doublings")->capture_default_str();
    add_lattice_flags(c_gs, gs.lattice);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*c_region) return run_region(region);
        if (*c_mv) return run_mvalue(mv);
        if (*c_cert) return run_certify(cert);
        if (*c_tab) return run_tables(tables_text_path, tables_json_path);
        if (*c_sp) return run_special(special_what, sp);
        if (*c_sm) return run_sampling(sm);
        if (*c_gs) return run_gamma(gs);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        emit({{"error", errc_name(e.code())}, {"message", e.what()}});
        return is_certification_failure(e.code()) ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        emit({{"error", "Validation"}, {"message", e.what()}});
        return 2;
    }
    return 2;
}
