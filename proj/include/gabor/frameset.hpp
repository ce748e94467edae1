#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "gabor/error.hpp"
#include "gabor/lattice.hpp"
#include "gabor/window.hpp"

namespace gabor {

inline constexpr const char* version_string = "0.1.0";

enum class Verdict { FramePrimal, FrameDual, PainlessRegion, CitedRegion, Unknown, Excluded };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::FramePrimal: return "frame_primal";
        case Verdict::FrameDual: return "frame_dual";
        case Verdict::PainlessRegion: return "painless";
        case Verdict::CitedRegion: return "cited";
        case Verdict::Unknown: return "unknown";
        case Verdict::Excluded: return "excluded";
    }
    return "unknown";
}

// ---------------------------------------------------------------- simple predicates

/// alpha < 2 sigma and beta < 1/(2 sigma), both strict.
inline bool painless_region(double sigma, double alpha, double beta) {
    if (!(sigma > 0.0)) throw Error(Errc::Validation, "sigma must be positive");
    return alpha > 0.0 && beta > 0.0 && alpha < 2.0 * sigma && beta < 1.0 / (2.0 * sigma);
}

enum class OverlayTag { SignRegionQm, OfsbQ2 };

struct Overlay {
    OverlayTag tag = OverlayTag::OfsbQ2;
    int m = 2;  // B-spline order for SignRegionQm

    std::string name() const {
        return tag == OverlayTag::OfsbQ2 ? std::string("ofsb_q2") : "sign_region_q" + std::to_string(m);
    }
};

inline Overlay parse_overlay(const std::string& s) {
    if (s == "ofsb_q2") return {OverlayTag::OfsbQ2, 2};
    const std::string prefix = "sign_region_q";
    if (s.rfind(prefix, 0) == 0) {
        const int m = detail::parse_int(s.substr(prefix.size()));
        if (m < 1) throw Error(Errc::Validation, "overlay order must be >= 1");
        return {OverlayTag::SignRegionQm, m};
    }
    throw Error(Errc::Validation, "unknown overlay '" + s + "'");
}

/// Membership in a region quoted from earlier work. Overlays are data for
/// plotting; they never produce a frame verdict.
inline bool cited_overlay(const Overlay& o, double alpha, double beta) {
    if (!(alpha > 0.0 && beta > 0.0)) return false;
    if (o.tag == OverlayTag::OfsbQ2) {
        return alpha >= 2.0 / 9.0 && alpha <= 2.0 / 7.0 && beta >= 4.0 / (2.0 + 3.0 * alpha) &&
               beta <= 2.0 / (1.0 + alpha) && beta > 1.0;
    }
    const double m = o.m;
    if (!(beta > 1.0 / m && beta < 2.0 / m)) return false;
    const long kmax = static_cast<long>(std::ceil(1.0 / (alpha * beta)));
    for (long k = 1; k <= kmax; ++k) {
        const double ak = alpha * static_cast<double>(k);
        if (m / 2.0 <= ak && ak < 1.0 / beta) return true;
    }
    return false;
}

// ---------------------------------------------------------------- frame bounds

struct FrameBounds {
    double delta = 0.0;    // 2 alpha sqrt(M_{phi, 1/beta})
    double esssup = 0.0;   // of sum_k |phi^(xi + beta k)|^2 over [0, beta]
    double essinf = 0.0;
    double A = 0.0;        // (1/alpha)(1 - delta)^2 esssup, as printed
    double B = 0.0;        // (1/alpha)(1 + delta)^2 essinf, as printed
    double A_swapped = 0.0;  // (1/alpha)(1 - delta)^2 essinf
    double B_swapped = 0.0;  // (1/alpha)(1 + delta)^2 esssup
};

/// Bounds attached to the sufficient condition. The printed pairing puts the
/// supremum in the lower bound; the swapped pairing is reported alongside.
inline FrameBounds frame_bounds(const Window& w, double alpha, double beta, const LatticeOptions& opt = {}) {
    if (!(alpha > 0.0 && beta > 0.0)) throw Error(Errc::Validation, "alpha and beta must be positive");
    const double h = 1.0 / beta;
    FrameBounds fb;
    fb.delta = 2.0 * alpha * std::sqrt(m_value(w, h, opt));
    if (fb.delta > 1.0)
        throw Error(Errc::ConditionNotMet, "2 alpha sqrt(M) = " + std::to_string(fb.delta) + " exceeds 1");
    const auto p = periodize(w, h, opt);
    fb.esssup = 0.0;
    fb.essinf = std::numeric_limits<double>::infinity();
    for (double v : p.phi_vals) {
        // phi_vals holds (1/h) sum_l |phi^(w + l/h)|^2 = beta sum_k |phi^(w + beta k)|^2.
        const double s = v / beta;
        fb.esssup = std::max(fb.esssup, s);
        fb.essinf = std::min(fb.essinf, s);
    }
    const double lo = (1.0 - fb.delta) * (1.0 - fb.delta) / alpha;
    const double hi = (1.0 + fb.delta) * (1.0 + fb.delta) / alpha;
    fb.A = lo * fb.esssup;
    fb.B = hi * fb.essinf;
    fb.A_swapped = lo * fb.essinf;
    fb.B_swapped = hi * fb.esssup;
    return fb;
}

inline nlohmann::json frame_bounds_json(const FrameBounds& fb) {
    return {{"delta", fb.delta},
            {"esssup", fb.esssup},
            {"essinf", fb.essinf},
            {"printed", {{"A", fb.A}, {"B", fb.B}}},
            {"swapped", {{"A", fb.A_swapped}, {"B", fb.B_swapped}}}};
}

// ---------------------------------------------------------------- Hermite

inline constexpr int hermite_delta_max_degree = 8;

/// (Delta_n(alpha, beta), Delta_n(beta, alpha)) with Delta_n(a, b) = 2 a sqrt(M_{h_n, 1/b}).
/// The second entry equals the dual quantity because h_n is an eigenfunction of the transform.
inline std::pair<double, double> hermite_delta(int n, double alpha, double beta, const LatticeOptions& opt = {}) {
    if (n < 0 || n > hermite_delta_max_degree) throw Error(Errc::Validation, "hermite_delta supports n in [0, 8]");
    if (!(alpha > 0.0 && beta > 0.0)) throw Error(Errc::Validation, "alpha and beta must be positive");
    const Window w = hermite(n);
    auto delta = [&](double a, double b) { return 2.0 * a * std::sqrt(m_value(w, 1.0 / b, opt)); };
    return {delta(alpha, beta), delta(beta, alpha)};
}

// ---------------------------------------------------------------- region scan

struct ScanOptions {
    double alpha_lo = 0.0, alpha_hi = 2.0;
    double beta_lo = 0.0, beta_hi = 2.0;
    int alpha_res = 200, beta_res = 200;
    LatticeOptions lattice{};
    std::vector<Overlay> overlays;
    int threads = 0;  // 0: GABOR_THREADS or 1
};

/// M for one beta column (primal, h = 1/beta) or one alpha column (dual, h = 1/alpha).
struct ColumnInfo {
    double param = 0.0;
    bool evaluated = false;
    bool available = true;  // false: side not computable for this window
    bool stable = true;
    double m = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

struct Cell {
    double alpha = 0.0, beta = 0.0;
    double delta_primal = std::numeric_limits<double>::quiet_NaN();
    double delta_dual = std::numeric_limits<double>::quiet_NaN();
    Verdict verdict = Verdict::Unknown;
    std::string note;  // exclusion reason, overlay tag or column error
};

/// Cells are stored alpha-major: index = i * beta_axis.size() + j.
struct RegionGrid {
    Window window;
    ScanOptions options;
    std::vector<double> alpha_axis, beta_axis;
    std::vector<ColumnInfo> primal_columns;  // per beta
    std::vector<ColumnInfo> dual_columns;    // per alpha
    std::vector<Cell> cells;

    const Cell& at(std::size_t i, std::size_t j) const { return cells[i * beta_axis.size() + j]; }
};

inline int thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GABOR_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

namespace detail {

/// Uniform axis on (lo, hi]: lo + (hi - lo)(k + 1)/n.
inline std::vector<double> half_open_axis(double lo, double hi, int n) {
    if (n < 1) throw Error(Errc::Validation, "axis resolution must be >= 1");
    if (!(lo >= 0.0 && hi > lo && std::isfinite(hi))) throw Error(Errc::Validation, "axis range must satisfy 0 <= lo < hi");
    std::vector<double> a(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) a[static_cast<std::size_t>(k)] = lo + (hi - lo) * double(k + 1) / double(n);
    return a;
}

inline void eval_column(const Window& w, ColumnInfo& col, Side side, const LatticeOptions& base) {
    col.evaluated = true;
    if (side == Side::Dual && !has_time_domain(w)) {
        col.available = false;
        col.error = "dual side unavailable";
        return;
    }
    LatticeOptions opt = base;
    opt.side = side;
    const double h = 1.0 / col.param;
    try {
        const auto st = stability_check(w, h, opt.grid_size, opt.stability_threshold, side);
        if (!st.stable) {
            col.stable = false;
            return;
        }
        col.m = m_value(w, h, opt);
    } catch (const Error& e) {
        col.error = e.what();
    }
}

// Runs fn(k) for k in [0, n) on `threads` workers; results land by index.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < n; k = next++) fn(k);
        });
    for (auto& th : pool) th.join();
}

} // namespace detail

/// Per-cell sufficient-condition scan. M is evaluated once per beta column
/// (primal) and once per alpha column (dual), and only for columns holding a
/// cell with alpha beta < 1. Verdict priority: density exclusion, unstable
/// primal column, primal condition, dual condition, painless rectangle, overlay.
inline RegionGrid scan(const Window& w, const ScanOptions& opt = {}) {
    validate(w);
    RegionGrid g;
    g.window = w;
    g.options = opt;
    g.alpha_axis = detail::half_open_axis(opt.alpha_lo, opt.alpha_hi, opt.alpha_res);
    g.beta_axis = detail::half_open_axis(opt.beta_lo, opt.beta_hi, opt.beta_res);
    const double a_min = g.alpha_axis.front(), b_min = g.beta_axis.front();

    g.primal_columns.resize(g.beta_axis.size());
    g.dual_columns.resize(g.alpha_axis.size());
    for (std::size_t j = 0; j < g.beta_axis.size(); ++j) g.primal_columns[j].param = g.beta_axis[j];
    for (std::size_t i = 0; i < g.alpha_axis.size(); ++i) g.dual_columns[i].param = g.alpha_axis[i];

    const int threads = thread_count(opt.threads);
    const std::size_t nb = g.beta_axis.size(), na = g.alpha_axis.size();
    detail::parallel_for(nb + na, threads, [&](std::size_t k) {
        if (k < nb) {
            if (a_min * g.beta_axis[k] < 1.0) detail::eval_column(w, g.primal_columns[k], Side::Primal, opt.lattice);
        } else {
            const std::size_t i = k - nb;
            if (g.alpha_axis[i] * b_min < 1.0) detail::eval_column(w, g.dual_columns[i], Side::Dual, opt.lattice);
        }
    });

    const bool compact = std::isfinite(support_radius(w));
    const double sigma = support_radius(w);
    g.cells.resize(na * nb);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            Cell& c = g.cells[i * nb + j];
            c.alpha = g.alpha_axis[i];
            c.beta = g.beta_axis[j];
            const ColumnInfo& pc = g.primal_columns[j];
            const ColumnInfo& dc = g.dual_columns[i];
            if (pc.evaluated && std::isfinite(pc.m)) c.delta_primal = 2.0 * c.alpha * std::sqrt(pc.m);
            if (dc.evaluated && std::isfinite(dc.m)) c.delta_dual = 2.0 * c.beta * std::sqrt(dc.m);
            if (c.alpha * c.beta >= 1.0) {
                c.verdict = Verdict::Excluded;
                c.note = "density theorem";
                continue;
            }
            if (!pc.stable) {
                c.verdict = Verdict::Excluded;
                c.note = "unstable generator";
                continue;
            }
            if (c.delta_primal < 1.0) {
                c.verdict = Verdict::FramePrimal;
                continue;
            }
            if (c.delta_dual < 1.0) {
                c.verdict = Verdict::FrameDual;
                continue;
            }
            if (compact && painless_region(sigma, c.alpha, c.beta)) {
                c.verdict = Verdict::PainlessRegion;
                continue;
            }
            for (const auto& o : opt.overlays)
                if (cited_overlay(o, c.alpha, c.beta)) {
                    c.verdict = Verdict::CitedRegion;
                    c.note = o.name();
                    break;
                }
            if (c.verdict == Verdict::CitedRegion) continue;
            if (!pc.error.empty()) c.note = "primal: " + pc.error;
            else if (!dc.error.empty() && dc.available) c.note = "dual: " + dc.error;
        }
    }
    return g;
}

inline nlohmann::json region_meta(const RegionGrid& g) {
    nlohmann::json overlays = nlohmann::json::array();
    for (const auto& o : g.options.overlays) overlays.push_back(o.name());
    std::size_t counts[6] = {0, 0, 0, 0, 0, 0};
    for (const auto& c : g.cells) ++counts[static_cast<int>(c.verdict)];
    nlohmann::json tally;
    for (int v = 0; v < 6; ++v) tally[verdict_name(static_cast<Verdict>(v))] = counts[v];
    nlohmann::json unstable = nlohmann::json::array(), errors = nlohmann::json::array();
    for (const auto& c : g.primal_columns) {
        if (c.evaluated && !c.stable) unstable.push_back(c.param);
        if (!c.error.empty()) errors.push_back({{"side", "primal"}, {"beta", c.param}, {"error", c.error}});
    }
    for (const auto& c : g.dual_columns)
        if (c.available && !c.error.empty()) errors.push_back({{"side", "dual"}, {"alpha", c.param}, {"error", c.error}});
    return {{"version", version_string},
            {"window", to_json(g.window)},
            {"alpha_range", {g.options.alpha_lo, g.options.alpha_hi}},
            {"beta_range", {g.options.beta_lo, g.options.beta_hi}},
            {"resolution", {g.options.alpha_res, g.options.beta_res}},
            {"axis_rule", "lo + (hi - lo) (k + 1) / n"},
            {"grid_size", g.options.lattice.grid_size},
            {"tol", g.options.lattice.tol},
            {"stability_threshold", g.options.lattice.stability_threshold},
            {"dual_available", has_time_domain(g.window)},
            {"overlays", overlays},
            {"unstable_beta", unstable},
            {"column_errors", errors},
            {"frame_bound_pairing", {{"printed", "A with esssup, B with essinf"},
                                     {"swapped", "A with essinf, B with esssup"}}},
            {"verdicts", tally}};
}

// ---------------------------------------------------------------- dilation search

enum class Direction { ToZero, ToInfinity };

struct GammaStep {
    double gamma = 1.0;
    double delta_primal = std::numeric_limits<double>::quiet_NaN();
    double delta_dual = std::numeric_limits<double>::quiet_NaN();
};

struct GammaSearchResult {
    bool found = false;
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double delta = std::numeric_limits<double>::quiet_NaN();  // witnessing (or best) value
    std::string side;                                          // "primal" or "dual"
    std::vector<GammaStep> trace;
};

/// gamma = 2^{-k} (ToZero) or 2^{k} (ToInfinity), k = 0..budget; stops at the
/// first dilation with 2 alpha sqrt(M_{phi_gamma,1/beta}) < 1 or
/// 2 beta sqrt(M of the transform at 1/alpha) < 1.
inline GammaSearchResult gamma_search(const Window& w, double alpha, double beta, Direction dir, int budget = 60,
                                      const LatticeOptions& opt = {}) {
    if (!(alpha > 0.0 && beta > 0.0)) throw Error(Errc::Validation, "alpha and beta must be positive");
    if (!(alpha * beta < 1.0)) throw Error(Errc::Validation, "gamma search needs alpha beta < 1");
    if (budget < 0) throw Error(Errc::Validation, "budget must be nonnegative");
    GammaSearchResult r;
    double best = std::numeric_limits<double>::infinity();
    std::string best_side;
    double best_gamma = 1.0;
    for (int k = 0; k <= budget; ++k) {
        GammaStep s;
        s.gamma = std::ldexp(1.0, dir == Direction::ToZero ? -k : k);
        const Window wg = dilate(w, s.gamma);
        LatticeOptions o = opt;
        try {
            o.side = Side::Primal;
            s.delta_primal = 2.0 * alpha * std::sqrt(m_value(wg, 1.0 / beta, o));
        } catch (const Error&) {
        }
        if (has_time_domain(w)) {
            try {
                o.side = Side::Dual;
                s.delta_dual = 2.0 * beta * std::sqrt(m_value(wg, 1.0 / alpha, o));
            } catch (const Error&) {
            }
        }
        r.trace.push_back(s);
        if (s.delta_primal < best) best = s.delta_primal, best_side = "primal", best_gamma = s.gamma;
        if (s.delta_dual < best) best = s.delta_dual, best_side = "dual", best_gamma = s.gamma;
        if (best < 1.0) {
            r.found = true;
            break;
        }
    }
    r.gamma = best_gamma;
    r.delta = best;
    r.side = best_side;
    return r;
}

inline nlohmann::json gamma_search_json(const GammaSearchResult& r) {
    nlohmann::json trace = nlohmann::json::array();
    auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    for (const auto& s : r.trace)
        trace.push_back({{"gamma", s.gamma}, {"delta_primal", num(s.delta_primal)}, {"delta_dual", num(s.delta_dual)}});
    return {{"found", r.found}, {"gamma", num(r.gamma)}, {"delta", num(r.delta)}, {"side", r.side}, {"trace", trace}};
}

} // namespace gabor
