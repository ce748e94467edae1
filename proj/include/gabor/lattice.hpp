#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <optional>

#include <boost/math/special_functions/polygamma.hpp>

#include "gabor/error.hpp"
#include "gabor/window.hpp"

namespace gabor {

/// Primal sums use |phi^|^2; dual sums use |phi|^2, i.e. the squared transform
/// of phi^ (reflection does not change any supremum).
enum class Side { Primal, Dual };

struct LatticeOptions {
    int grid_size = 4096;
    double tol = 1e-13;
    double stability_threshold = 1e-12;
    long term_cap = 1L << 22;
    Side side = Side::Primal;
};

/// Samples of Phi_h, of the weighted sum and of their ratio B on the grid
/// w_j = j / (grid_size h), j = 0..grid_size.
struct PeriodizationProfile {
    double h = 1.0;
    std::vector<double> grid;
    std::vector<double> phi_vals;
    std::vector<double> weighted_vals;
    std::vector<double> b_vals;
    double tail_bound = 0.0;  // relative, over both series and all grid points
    long terms = 0;           // lattice terms per side; 0 for closed or finite forms
    bool exact = false;
};

struct StabilityReport {
    double essinf_est = 0.0;
    double esssup_est = 0.0;
    bool stable = false;
    int grid_size = 0;
};

struct MResult {
    double value = 0.0;
    double argmax_w = 0.0;
};

namespace detail {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

// Decay envelope exp(log_c) x^q exp(-a x^2 - b x), valid for x >= x0.
struct Envelope {
    double log_c = 0.0;
    double q = 0.0;
    double a = 0.0;
    double b = 0.0;
    double x0 = 0.0;
};

// log of an upper bound for int_X^inf x^k e^{-a x^2 - b x} dx, +inf when the
// bound or the sum-to-integral comparison is not yet valid at X.
inline double log_tail_integral(const Envelope& e, double X, double k) {
    if (X <= 0.0 || X < e.x0) return pos_inf;
    if (e.a > 0.0) {
        const double two_a_x2 = 2.0 * e.a * X * X;
        if (k > 0.0 && two_a_x2 <= k) return pos_inf;
        double lg = (k - 1.0) * std::log(X) - e.a * X * X - e.b * X - std::log(2.0 * e.a);
        if (k > 1.0) lg -= std::log1p(-(k - 1.0) / two_a_x2);
        return lg;
    }
    if (e.b > 0.0) {
        if (k > 0.0 && e.b * X <= k) return pos_inf;
        return k * std::log(X) - e.b * X - std::log(e.b - std::max(0.0, k) / X);
    }
    if (k >= -1.0) return pos_inf;
    return (k + 1.0) * std::log(X) - std::log(-k - 1.0);
}

inline double hermite_abs_coeff_sum(int n) {
    double prev = 1.0, cur = 2.0;
    if (n == 0) return 1.0;
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * cur + 2.0 * k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

// log of the constant in |h_n(s)|^2 <= C s^{2n} e^{-2 pi s^2}, |s| >= 1/sqrt(2 pi).
inline double hermite_envelope_log_c(int n) {
    const double c = hermite_normalization(n);
    return 2.0 * std::log(c) + 2.0 * std::log(hermite_abs_coeff_sum(n)) + n * std::log(2.0 * pi) -
           n * std::log(2.0) - std::lgamma(n + 1.0) - 0.5 * std::log(pi);
}

// Stable S(c) = sum_n 1/(c^2 + 4 pi^2 (u+n)^2) = sinh c / (2c (cosh c - cos 2 pi u)).
inline double pole_sum(double c, double k) {
    const double e = std::exp(-c);
    return (1.0 - e * e) / (1.0 + e * e - 2.0 * k * e) / (2.0 * c);
}

inline double pole_sum_dc(double c, double k) {
    const double e = std::exp(-c);
    const double den = 1.0 + e * e - 2.0 * k * e;
    const double r = (1.0 - e * e) / den;
    const double dr = -e * (2.0 * k * (1.0 + e * e) - 4.0 * e) / (den * den);
    return dr / (2.0 * c) - r / (2.0 * c * c);
}

struct TwoPoleSums {
    double F;
    double H;
};

// F~ and H~ for c, d > 0 by partial fractions, with the confluent limit.
inline TwoPoleSums two_pole_sums(double c, double d, double u) {
    const double k = std::cos(2.0 * pi * u);
    const double mid = 0.5 * (c + d);
    if (std::abs(c - d) < 1e-5 * mid) {
        const double s = pole_sum(mid, k), ds = pole_sum_dc(mid, k);
        const double m4 = mid * mid * mid * mid;
        return {-0.5 * m4 / mid * ds, m4 / (4.0 * pi * pi) * (s + 0.5 * mid * ds)};
    }
    const double sc = pole_sum(c, k), sd = pole_sum(d, k);
    const double c2 = c * c, d2 = d * d;
    return {c2 * d2 * (sc - sd) / (d2 - c2), c2 * d2 * (d2 * sd - c2 * sc) / (4.0 * pi * pi * (d2 - c2))};
}

struct ExpSums {
    double log_scale;
    double F;
    double H;
};

// sum e^{-2 rho |u+n|} and sum (u+n)^2 e^{-2 rho |u+n|} for u in [0, 1],
// scaled by e^{2 rho min(u, 1-u)}.
inline ExpSums exp_sums(double rho, double u) {
    const double q = std::exp(-2.0 * rho);
    const double one_q = -std::expm1(-2.0 * rho);
    const double m = std::min(u, 1.0 - u);
    const double el = std::exp(-2.0 * rho * (u - m));
    const double er = std::exp(-2.0 * rho * (1.0 - u - m));
    auto T = [&](double x) {
        return x * x / one_q + 2.0 * x * q / (one_q * one_q) + q * (1.0 + q) / (one_q * one_q * one_q);
    };
    return {-2.0 * rho * m, (el + er) / one_q, el * T(u) + er * T(1.0 - u)};
}

// |phi^_gamma(x)|^2 <= envelope, for every kind.
inline Envelope primal_envelope(const Window& w) {
    const double g = w.gamma;
    Envelope e;
    e.log_c = -std::log(g);
    auto add_pole = [&](double p) {
        if (p == 0.0) return;
        e.log_c += std::log(g * g / (4.0 * pi * pi * p * p));
        e.q -= 2.0;
    };
    switch (w.kind) {
        case Kind::BSpline:
            e.log_c += 2.0 * w.order * std::log(g / pi);
            e.q = -2.0 * w.order;
            break;
        case Kind::Gaussian:
        case Kind::TypeI:
            e.a = 2.0 * pi / (g * g);
            break;
        case Kind::TwoSidedExp:
            e.log_c += std::log(4.0);
            add_pole(1.0);
            add_pole(1.0);
            break;
        case Kind::TwoPole:
            add_pole(w.a);
            add_pole(w.b);
            break;
        case Kind::Hermite:
            e.log_c = hermite_envelope_log_c(w.order) - (2.0 * w.order + 1.0) * std::log(g);
            e.q = 2.0 * w.order;
            e.a = 2.0 * pi / (g * g);
            e.x0 = g / std::sqrt(2.0 * pi);
            break;
        case Kind::TypeII:
            if (w.base == Base::Exp) {
                e.b = 2.0 / g;
            } else {
                add_pole(w.a);
                add_pole(w.b);
                for (double v : w.factors) add_pole(v);
            }
            break;
    }
    return e;
}

enum class Method { PoissonBSpline, Compact, ClosedTwoPole, ClosedExp, Direct };

struct Sample {
    double log_scale = 0.0;
    long double s0 = 0.0L;  // sum |f(xi_l)|^2 = e^{log_scale} s0
    long double s2 = 0.0L;  // sum xi_l^2 |f(xi_l)|^2 = e^{log_scale} s2
    bool degenerate = false;
};

/// Lattice sums over xi_l = (u + l)/h for one window and side, with u = w h.
class LatticeSums {
public:
    LatticeSums(const Window& w, double h, Side side) : w_(w), h_(h), side_(side) {
        validate(w);
        if (!(h > 0.0) || !std::isfinite(h)) throw Error(Errc::Validation, "h must be positive and finite");
        const bool bare = w.factors.empty();
        if (side == Side::Dual && !has_time_domain(w))
            throw Error(Errc::Validation, std::string("dual sums need a closed time-domain form; '") +
                                              kind_name(w.kind) + "' has none");
        if (side == Side::Primal) {
            if (w.kind == Kind::BSpline) {
                method_ = Method::PoissonBSpline;
                init_poisson();
            } else if (w.kind == Kind::TwoPole || w.kind == Kind::TwoSidedExp ||
                       (w.kind == Kind::TypeII && w.base == Base::TwoPole && bare)) {
                method_ = Method::ClosedTwoPole;
                const double aa = (w.kind == Kind::TwoSidedExp) ? 1.0 : std::abs(w.a);
                const double bb = (w.kind == Kind::TwoSidedExp) ? 1.0 : std::abs(w.b);
                c_ = h * w.gamma / aa;
                d_ = h * w.gamma / bb;
                scale_ = (w.kind == Kind::TwoSidedExp) ? 4.0 : 1.0;
            } else if (w.kind == Kind::TypeII && w.base == Base::Exp && bare) {
                method_ = Method::ClosedExp;
                rho_ = 1.0 / (h * w.gamma);
                scale_ = 1.0 / w.gamma;
            } else {
                method_ = Method::Direct;
                env_ = primal_envelope(w);
            }
        } else {
            if (w.kind == Kind::BSpline) {
                method_ = Method::Compact;
            } else if (w.kind == Kind::TwoSidedExp) {
                method_ = Method::ClosedExp;
                rho_ = w.gamma / h;
                scale_ = w.gamma;
            } else {
                method_ = Method::Direct;
                env_ = dual_envelope();
            }
        }
    }

    Method method() const { return method_; }
    bool exact() const { return method_ != Method::Direct; }
    double h() const { return h_; }

    /// False when sum xi^2 |f|^2 diverges (B-spline of order 1).
    bool weighted_converges() const { return !(w_.kind == Kind::BSpline && w_.order == 1 && side_ == Side::Primal); }

    Sample eval(double u, long n) const {
        switch (method_) {
            case Method::PoissonBSpline: return eval_poisson(u);
            case Method::Compact: return eval_compact(u);
            case Method::ClosedTwoPole: return eval_two_pole(u);
            case Method::ClosedExp: return eval_exp(u);
            case Method::Direct: return eval_direct(u, n);
        }
        return {};
    }

    /// log bound on the omitted terms |l| > n of the plain (weight 0) or
    /// weighted (weight 2) series; -inf for closed forms.
    double log_tail(long n, int weight) const {
        if (exact()) return neg_inf;
        const double X = static_cast<double>(n) / h_;
        return std::log(2.0 * h_) + env_.log_c + log_tail_integral(env_, X, env_.q + weight);
    }

    const Envelope& envelope() const { return env_; }

private:
    Envelope dual_envelope() const {
        const double g = w_.gamma;
        Envelope e;
        if (w_.kind == Kind::Gaussian) {
            e.log_c = std::log(g);
            e.a = 2.0 * pi * g * g;
        } else {
            e.log_c = hermite_envelope_log_c(w_.order) + (2.0 * w_.order + 1.0) * std::log(g);
            e.q = 2.0 * w_.order;
            e.a = 2.0 * pi * g * g;
            e.x0 = 1.0 / (g * std::sqrt(2.0 * pi));
        }
        return e;
    }

    // Poisson dual: sum_l |Q^_gamma((u+l)/h)|^2 = h sum_k Q_{2m}(gamma k h) cos(2 pi k u);
    // the weighted sum uses -gamma^2 Q_{2m}''(gamma k h) / (4 pi^2).
    void init_poisson() {
        const int m = w_.order;
        const long double g = w_.gamma, h = h_;
        for (long k = 0;; ++k) {
            const long double x = g * static_cast<long double>(k) * h;
            if (x >= static_cast<long double>(m)) break;
            c0_.push_back(bspline_eval<long double>(2 * m, x));
            if (m >= 2) c2_.push_back(-g * g * bspline_second_derivative<long double>(2 * m, x));
            noise_ += (k == 0 ? 1.0L : 2.0L) * std::abs(c0_.back());
        }
        noise_ *= 128.0L * LDBL_EPSILON;
    }

    Sample eval_poisson(double u) const {
        const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
        long double s0 = c0_[0], s2 = c2_.empty() ? 0.0L : c2_[0];
        for (std::size_t k = 1; k < c0_.size(); ++k) {
            const long double cs = std::cos(two_pi * static_cast<long double>(k) * static_cast<long double>(u));
            s0 += 2.0L * c0_[k] * cs;
            if (!c2_.empty()) s2 += 2.0L * c2_[k] * cs;
        }
        Sample s;
        s.degenerate = s0 <= noise_;
        s.s0 = static_cast<long double>(h_) * s0;
        s.s2 = static_cast<long double>(h_) * s2 / (4.0L * std::numbers::pi_v<long double> * std::numbers::pi_v<long double>);
        return s;
    }

    Sample eval_compact(double u) const {
        const double sigma = support_radius(w_);
        const long lo = static_cast<long>(std::ceil(-sigma * h_ - u));
        const long hi = static_cast<long>(std::floor(sigma * h_ - u));
        long double s0 = 0.0L, s2 = 0.0L;
        for (long l = lo; l <= hi; ++l) {
            const long double xi = (static_cast<long double>(u) + l) / static_cast<long double>(h_);
            const long double v = static_cast<long double>(w_.gamma) *
                                  bspline_eval<long double>(w_.order, static_cast<long double>(w_.gamma) * xi);
            s0 += v * v / static_cast<long double>(w_.gamma);
            s2 += xi * xi * v * v / static_cast<long double>(w_.gamma);
        }
        Sample s;
        s.s0 = s0;
        s.s2 = s2;
        s.degenerate = !(s0 > 0.0L);
        return s;
    }

    Sample eval_two_pole(double u) const {
        const auto t = two_pole_sums(c_, d_, u);
        Sample s;
        s.s0 = scale_ / w_.gamma * t.F;
        s.s2 = scale_ / (w_.gamma * h_ * h_) * t.H;
        s.degenerate = !(s.s0 > 0.0L);
        return s;
    }

    Sample eval_exp(double u) const {
        const auto t = exp_sums(rho_, u);
        Sample s;
        s.log_scale = t.log_scale + std::log(scale_);
        s.s0 = t.F;
        s.s2 = t.H / (h_ * h_);
        s.degenerate = !(s.s0 > 0.0L);
        return s;
    }

    Sample eval_direct(double u, long n) const {
        std::vector<double> logs(static_cast<std::size_t>(2 * n + 1));
        double lmax = neg_inf;
        for (long l = -n; l <= n; ++l) {
            const double xi = (u + static_cast<double>(l)) / h_;
            const double lg = (side_ == Side::Primal) ? log_abs2_ft(w_, xi) : log_abs2_time(w_, xi);
            logs[static_cast<std::size_t>(l + n)] = lg;
            lmax = std::max(lmax, lg);
        }
        Sample s;
        if (lmax == neg_inf) {
            s.degenerate = true;
            return s;
        }
        long double s0 = 0.0L, s2 = 0.0L;
        for (long l = -n; l <= n; ++l) {
            const long double xi = (static_cast<long double>(u) + l) / static_cast<long double>(h_);
            const long double t = std::exp(static_cast<long double>(logs[static_cast<std::size_t>(l + n)] - lmax));
            s0 += t;
            s2 += xi * xi * t;
        }
        s.log_scale = lmax;
        s.s0 = s0;
        s.s2 = s2;
        return s;
    }

    Window w_;
    double h_;
    Side side_;
    Method method_ = Method::Direct;
    Envelope env_;
    std::vector<long double> c0_, c2_;
    long double noise_ = 0.0L;
    double c_ = 0.0, d_ = 0.0, rho_ = 0.0, scale_ = 1.0;
};

struct GridEval {
    std::vector<Sample> samples;
    double worst_rel_tail = 0.0;
    bool certified = true;
};

inline GridEval eval_grid(const LatticeSums& sums, int grid_size, long n, double tol, bool weighted) {
    GridEval g;
    g.samples.resize(static_cast<std::size_t>(grid_size) + 1);
    const double t0 = sums.log_tail(n, 0);
    const double t2 = weighted ? sums.log_tail(n, 2) : neg_inf;
    const double ltol = std::log(tol);
    for (int j = 0; j <= grid_size; ++j) {
        const double u = static_cast<double>(j) / grid_size;
        const Sample s = sums.eval(u, n);
        g.samples[static_cast<std::size_t>(j)] = s;
        if (sums.exact() || s.degenerate) continue;
        const double r0 = t0 - s.log_scale - static_cast<double>(std::log(s.s0));
        double r = r0;
        if (weighted && s.s2 > 0.0L) r = std::max(r, t2 - s.log_scale - static_cast<double>(std::log(s.s2)));
        g.worst_rel_tail = std::max(g.worst_rel_tail, std::exp(r));
        if (!(r <= ltol)) g.certified = false;
    }
    return g;
}

inline long certified_terms(const LatticeSums& sums, int grid_size, double tol, long cap, bool weighted,
                            GridEval& out) {
    if (sums.exact()) {
        out = eval_grid(sums, grid_size, 0, tol, weighted);
        return 0;
    }
    const double ltol = std::log(tol);
    const double cap0 = sums.log_tail(cap, 0);
    const double cap2 = weighted ? sums.log_tail(cap, 2) : neg_inf;
    for (long n = 8; n <= cap; n *= 2) {
        out = eval_grid(sums, grid_size, n, tol, weighted);
        if (out.certified) return n;
        // The full series is at most partial sum plus tail; if even the tail
        // at the cap is too large against that, doubling further is futile.
        const double t0 = sums.log_tail(n, 0), t2 = weighted ? sums.log_tail(n, 2) : neg_inf;
        auto hopeless = [&](double cap_tail, double tail, double log_partial) {
            if (cap_tail == neg_inf) return false;
            const double hi = std::max(tail, log_partial);
            const double log_full = hi + std::log1p(std::exp(std::min(tail, log_partial) - hi));
            return cap_tail - log_full > ltol;
        };
        for (const Sample& s : out.samples) {
            if (s.degenerate) continue;
            const double p0 = s.log_scale + static_cast<double>(std::log(s.s0));
            const double p2 = s.s2 > 0.0L ? s.log_scale + static_cast<double>(std::log(s.s2)) : neg_inf;
            if (hopeless(cap0, t0, p0) || (weighted && p2 != neg_inf && hopeless(cap2, t2, p2)))
                throw Error(Errc::TailNotCertifiable, "lattice tail bound at the term cap exceeds the tolerance");
        }
    }
    throw Error(Errc::TailNotCertifiable, "lattice tail stays above tolerance within the term cap");
}

inline PeriodizationProfile build_profile(const LatticeSums& sums, double h, int grid_size, const GridEval& g,
                                          long n, bool throw_on_degenerate) {
    PeriodizationProfile p;
    p.h = h;
    p.terms = n;
    p.exact = sums.exact();
    p.tail_bound = g.worst_rel_tail;
    const std::size_t count = g.samples.size();
    p.grid.resize(count);
    p.phi_vals.resize(count);
    p.weighted_vals.resize(count);
    p.b_vals.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
        const Sample& s = g.samples[j];
        p.grid[j] = (static_cast<double>(j) / grid_size) / h;
        const double scale = std::exp(s.log_scale);
        p.phi_vals[j] = s.degenerate ? 0.0 : std::max(0.0, scale * static_cast<double>(s.s0) / h);
        p.weighted_vals[j] = s.degenerate ? 0.0 : scale * static_cast<double>(s.s2);
        if (s.degenerate) {
            if (throw_on_degenerate)
                throw Error(Errc::DegenerateDenominator,
                            "periodization vanishes at w = " + std::to_string(p.grid[j]));
            p.b_vals[j] = std::numeric_limits<double>::quiet_NaN();
        } else {
            p.b_vals[j] = static_cast<double>(s.s2 / s.s0);
        }
    }
    return p;
}

inline void check_grid(int grid_size) {
    if (grid_size < 16) throw Error(Errc::Validation, "grid_size must be >= 16");
}

// zeta(s, x) + zeta(s, 1 - x) for integer s >= 2 via polygamma.
inline long double hurwitz_pair(int s, long double x) {
    namespace bm = boost::math;
    const long double sign = (s % 2 == 0) ? 1.0L : -1.0L;
    const long double fact = std::tgamma(static_cast<long double>(s));
    return sign * (bm::polygamma(s - 1, x) + bm::polygamma(s - 1, 1.0L - x)) / fact;
}

/// B-splines with 1/(h gamma) an integer: every term of both sums carries the
/// same power of sin(pi w / gamma), so B(w) = P^2 Z_{2m-2}(w/P) / Z_{2m}(w/P)
/// with P = 1/h and Z_s(x) = zeta(s, x) + zeta(s, 1 - x). This stays finite
/// where the periodization itself vanishes.
inline std::optional<MResult> bspline_commensurate_m(const Window& w, double h, const LatticeOptions& opt) {
    if (w.kind != Kind::BSpline || opt.side != Side::Primal || w.order < 2) return std::nullopt;
    const double n = 1.0 / (h * w.gamma);
    if (std::abs(n - std::round(n)) > 1e-12 * n || std::round(n) < 1.0) return std::nullopt;
    const double P = 1.0 / h;
    const int m = w.order;
    auto b_at = [&](double x) {
        if (!(x > 0.0 && x < 1.0)) return 0.0;
        const long double r = hurwitz_pair(2 * m - 2, x) / hurwitz_pair(2 * m, x);
        return static_cast<double>(P * P * r);
    };
    // B is even about x = 1/2, so the search runs over (0, 1/2].
    const int n_grid = opt.grid_size;
    int best = 1;
    double best_val = b_at(0.5 / n_grid);
    for (int j = 2; j <= n_grid; ++j) {
        const double v = b_at(0.5 * j / n_grid);
        if (v > best_val) {
            best_val = v;
            best = j;
        }
    }
    double lo = 0.5 * (best - 1) / n_grid, hi = std::min(0.5, 0.5 * (best + 1) / n_grid);
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
    double f1 = b_at(x1), f2 = b_at(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
        if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = b_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = b_at(x2);
        }
    }
    MResult r{best_val, 0.5 * best / n_grid * P};
    if (std::max(f1, f2) > r.value) {
        r.value = std::max(f1, f2);
        r.argmax_w = ((f1 >= f2) ? x1 : x2) * P;
    }
    return r;
}

} // namespace detail

inline PeriodizationProfile periodize(const Window& w, double h, int grid_size, double tol,
                                      Side side = Side::Primal, long term_cap = LatticeOptions{}.term_cap) {
    detail::check_grid(grid_size);
    if (!(tol > 0.0)) throw Error(Errc::Validation, "tol must be positive");
    const detail::LatticeSums sums(w, h, side);
    if (!sums.weighted_converges())
        throw Error(Errc::TailNotCertifiable, "weighted series diverges for a B-spline of order 1");
    detail::GridEval g;
    const long n = detail::certified_terms(sums, grid_size, tol, term_cap, true, g);
    return detail::build_profile(sums, h, grid_size, g, n, true);
}

inline PeriodizationProfile periodize(const Window& w, double h, const LatticeOptions& opt) {
    return periodize(w, h, opt.grid_size, opt.tol, opt.side, opt.term_cap);
}

/// Grid maximum of B followed by a golden-section polish around the discrete
/// argmax; ties go to the smaller w. Commensurate B-splines take the exact
/// ratio of Hurwitz sums instead.
inline MResult m_value_detail(const Window& w, double h, const LatticeOptions& opt = {}) {
    detail::check_grid(opt.grid_size);
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(Errc::Validation, "h must be positive and finite");
    if (auto r = detail::bspline_commensurate_m(w, h, opt)) return *r;
    const detail::LatticeSums sums(w, h, opt.side);
    if (!sums.weighted_converges())
        throw Error(Errc::TailNotCertifiable, "weighted series diverges for a B-spline of order 1");
    detail::GridEval g;
    const long n = detail::certified_terms(sums, opt.grid_size, opt.tol, opt.term_cap, true, g);
    const auto p = detail::build_profile(sums, h, opt.grid_size, g, n, true);

    std::size_t best = 0;
    for (std::size_t j = 1; j < p.b_vals.size(); ++j)
        if (p.b_vals[j] > p.b_vals[best]) best = j;

    auto b_at = [&](double u) {
        const auto s = sums.eval(u, n);
        if (s.degenerate) return -detail::pos_inf;
        return static_cast<double>(s.s2 / s.s0);
    };
    const double du = 1.0 / opt.grid_size;
    double lo = std::max(0.0, (static_cast<double>(best) - 1.0) * du);
    double hi = std::min(1.0, (static_cast<double>(best) + 1.0) * du);
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
    double f1 = b_at(x1), f2 = b_at(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
        if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = b_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = b_at(x2);
        }
    }
    MResult r{p.b_vals[best], p.grid[best]};
    const double polished = std::max(f1, f2);
    if (polished > r.value) {
        r.value = polished;
        r.argmax_w = ((f1 >= f2) ? x1 : x2) / h;
    }
    return r;
}

inline double m_value(const Window& w, double h, const LatticeOptions& opt = {}) {
    return m_value_detail(w, h, opt).value;
}

/// essinf/esssup of Phi_h over the grid. Stability compares essinf with the
/// threshold relative to esssup, so the verdict ignores the window's scale.
inline StabilityReport stability_check(const Window& w, double h, int grid_size,
                                       double threshold = LatticeOptions{}.stability_threshold,
                                       Side side = Side::Primal) {
    detail::check_grid(grid_size);
    const detail::LatticeSums sums(w, h, side);
    detail::GridEval g;
    const long n = detail::certified_terms(sums, grid_size, LatticeOptions{}.tol, LatticeOptions{}.term_cap,
                                           false, g);
    const auto p = detail::build_profile(sums, h, grid_size, g, n, false);
    StabilityReport r;
    r.grid_size = grid_size;
    r.essinf_est = *std::min_element(p.phi_vals.begin(), p.phi_vals.end());
    r.esssup_est = *std::max_element(p.phi_vals.begin(), p.phi_vals.end());
    r.stable = r.esssup_est > 0.0 && r.essinf_est > threshold * r.esssup_est;
    return r;
}

/// Terms per side so that the analytic tail of the Phi_h series is below tol.
inline long truncation_terms(const Window& w, double h, double tol) {
    validate(w);
    if (!(tol > 0.0)) throw Error(Errc::Validation, "tol must be positive");
    if (std::isinf(tol)) return 1;
    const detail::Envelope e = detail::primal_envelope(w);
    constexpr long cap = 1000000000000000L;
    auto ok = [&](long n) {
        const double lt = std::log(2.0) + e.log_c + detail::log_tail_integral(e, n / h, e.q);
        return lt < std::log(tol);
    };
    long hi = 1;
    while (!ok(hi)) {
        if (hi > cap / 2) throw Error(Errc::TailNotCertifiable, "truncation exceeds the term cap");
        hi *= 2;
    }
    long lo = hi / 2;
    if (hi == 1) return 1;
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

} // namespace gabor
