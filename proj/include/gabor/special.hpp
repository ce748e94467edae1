#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "gabor/error.hpp"
#include "gabor/lattice.hpp"
#include "gabor/window.hpp"

namespace gabor {

// ---------------------------------------------------------------- theta function

struct ThetaEval {
    double w = 0.0;
    double t = 1.0;
    double theta = 0.0;
    double dtheta_dw = 0.0;
    double q_ratio = 0.0;  // -dTheta/dw / sin(2 pi w)
    double lower = 0.0;    // A(t)
    double upper = 0.0;    // B(t)
    int terms = 0;
    double tail_bound = 0.0;
};

inline double theta_lower(double t) {
    if (t < 1.0) return std::pow(t, -1.5) * std::exp(-pi / (4.0 * t));
    return (1.0 - 1.0 / 3000.0) * 4.0 * pi * std::exp(-pi * t);
}

inline double theta_upper(double t) {
    if (t < 1.0) return std::pow(t, -1.5);
    return (1.0 + 1.0 / 3000.0) * 4.0 * pi * std::exp(-pi * t);
}

namespace detail {

// Small t: Theta = t^{-1/2} sum_n e^{-pi (w-n)^2 / t}. The points w - n are
// taken as v + c and v - c around the nearest half-integer center, v = w -
// center, so each pair folds into cosh/sinh terms of one sign and Q never
// cancels.
inline void theta_transformed(double w, double t, ThetaEval& r) {
    const double wr = w - std::floor(w);
    const bool half = std::abs(wr - 0.5) <= 0.25;
    const double center = half ? 0.5 : (wr < 0.5 ? 0.0 : 1.0);
    const double v = wr - center;
    const double k = pi / t;
    // Sums of e^{-pi x^2/t} and of (x e^{-pi x^2/t}) / v over the points x.
    double th = 0.0, dv = 0.0;
    if (!half) {
        th = std::exp(-k * v * v);
        dv = th;
    }
    int terms = half ? 0 : 1;
    double c = half ? 0.5 : 1.0;
    for (;; c += 1.0, ++terms) {
        const double a = k * (v * v + c * c);
        const double y = 2.0 * k * v * c;
        const double ep = std::exp(y - a), em = std::exp(-y - a);
        const double sinhc = std::abs(y) < 1e-3 ? std::exp(-a) * (1.0 + y * y / 6.0 + y * y * y * y / 120.0)
                                                : (ep - em) / (2.0 * y);
        th += ep + em;
        dv += (ep + em) - 4.0 * k * c * c * sinhc;
        // Pair c is bounded by 2 (1 + 2 k c^2) e^{-k (c - |v|)^2}; successive
        // bounds shrink geometrically since k > pi and |v| <= 1/2.
        const double cn = c + 1.0, av = std::abs(v);
        const double next = 2.0 * (1.0 + 2.0 * k * cn * cn) * std::exp(-k * (cn - av) * (cn - av));
        const double ratio = std::exp(-k * (2.0 * (cn - av) + 1.0)) * (1.0 + 2.0 * k * (cn + 1.0) * (cn + 1.0)) /
                             (1.0 + 2.0 * k * cn * cn);
        const double tail = ratio < 1.0 ? next / (1.0 - ratio) : pos_inf;
        if (tail <= 1e-17 * std::abs(dv) && tail <= 1e-17 * th) {
            r.tail_bound = 2.0 * pi * std::pow(t, -1.5) * std::abs(v) * tail;
            break;
        }
    }
    r.terms = terms + 1;
    const double sign = half ? -1.0 : 1.0;
    const double v_over_sin = v == 0.0 ? 1.0 / (2.0 * pi) : v / std::sin(2.0 * pi * v);
    r.theta = th / std::sqrt(t);
    r.q_ratio = 2.0 * pi * std::pow(t, -1.5) * sign * dv * v_over_sin;
    r.dtheta_dw = -r.q_ratio * std::sin(2.0 * pi * wr);
}

} // namespace detail

/// Theta(w; t) = sum_k e^{-pi k^2 t} e^{2 pi i k w} with its w-derivative and
/// the ratio Q. For t < 1 the Jacobi-transformed sum is used. Otherwise, near
/// the zeros of sin 2 pi w, Q is summed as 4 pi sum k e^{-pi k^2 t} U_{k-1}(cos 2 pi w).
inline ThetaEval theta_eval(double w, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw Error(Errc::Validation, "theta needs t > 0");
    if (!std::isfinite(w)) throw Error(Errc::Validation, "theta needs finite w");
    ThetaEval r;
    r.w = w;
    r.t = t;
    r.lower = theta_lower(t);
    r.upper = theta_upper(t);
    if (t < 1.0) {
        detail::theta_transformed(w, t, r);
        return r;
    }
    const double x = 2.0 * pi * (w - std::floor(w));
    const double s = std::sin(x), cx = std::cos(x);
    const bool band = std::abs(s) <= 1e-8;

    double theta = 1.0, dsum = 0.0, qsum = 0.0;
    double u_prev = 0.0, u_cur = 1.0;  // U_{k-2}, U_{k-1} at cos x
    const int cap = 1'000'000;
    int k = 1;
    for (;; ++k) {
        const double e = std::exp(-pi * t * double(k) * k);
        theta += 2.0 * e * std::cos(k * x);
        dsum += double(k) * e * std::sin(k * x);
        qsum += double(k) * e * u_cur;
        const double u_next = 2.0 * cx * u_cur - u_prev;
        u_prev = u_cur;
        u_cur = u_next;
        // Tail of sum_{j>k} j^2 e^{-pi t j^2}: geometric once the term ratio drops below 1.
        const double kn = k + 1.0;
        const double next = kn * kn * std::exp(-pi * t * kn * kn);
        const double ratio = ((kn + 1.0) / kn) * ((kn + 1.0) / kn) * std::exp(-pi * t * (2.0 * kn + 1.0));
        if (ratio < 1.0) {
            const double tail = next / (1.0 - ratio);
            if (tail <= 1e-17 * std::max(1.0, std::abs(qsum)) || k >= cap) {
                r.tail_bound = 4.0 * pi * tail;
                break;
            }
        }
        if (k >= cap) break;
    }
    r.terms = k;
    r.theta = theta;
    r.dtheta_dw = -4.0 * pi * dsum;
    r.q_ratio = band ? 4.0 * pi * qsum : -r.dtheta_dw / s;
    return r;
}

// ---------------------------------------------------------------- ratio profiles

enum class Family { GaussTheta, ExpSeries, TwoPoleClosed };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::GaussTheta: return "gauss_theta";
        case Family::ExpSeries: return "exp_series";
        case Family::TwoPoleClosed: return "twopole_closed";
    }
    return "unknown";
}

/// F, H and G = H/F on w_j = j/(n-1) in [0, 1]. F and H are stored scaled;
/// the true value is F * exp(log_scale). `alt_*` hold an independent
/// evaluation: theta identity (Gaussian), closed geometric form (exponential)
/// or direct lattice sum (two-pole).
struct RatioProfile {
    Family family = Family::GaussTheta;
    double rho = 1.0;
    std::vector<double> grid;
    std::vector<double> log_scale;
    std::vector<double> F, H, G;
    std::vector<double> alt_G;
    double cross_check = 0.0;       // max discrepancy between the two evaluations
    double argmax_w = 0.0;
    double monotone_violation = 0.0;  // largest decrease of G on [0, 1/2]
    bool in_proven_range = true;
};

namespace detail {

inline std::vector<double> unit_grid(int n) {
    if (n < 3) throw Error(Errc::Validation, "profile grid needs at least 3 points");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) g[static_cast<std::size_t>(j)] = double(j) / double(n - 1);
    return g;
}

inline void finish_profile(RatioProfile& p) {
    std::size_t best = 0;
    for (std::size_t j = 0; j < p.G.size(); ++j)
        if (p.G[j] > p.G[best]) best = j;
    p.argmax_w = p.grid[best];
    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < p.G.size() && p.grid[j + 1] <= 0.5 + 1e-15; ++j)
        worst = std::max(worst, p.G[j] - p.G[j + 1]);
    p.monotone_violation = worst;
}

} // namespace detail

/// Gaussian family F_rho(w) = sum e^{-2 pi (w+n)^2 / rho^2}, H with weight
/// (w+n)^2. F is cross-checked against (rho/sqrt 2) Theta(w; rho^2/2);
/// `cross_check` is relative to the largest F on the grid.
inline RatioProfile gauss_profile(double rho, int grid_size) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(Errc::Validation, "rho must be positive");
    RatioProfile p;
    p.family = Family::GaussTheta;
    p.rho = rho;
    p.grid = detail::unit_grid(grid_size);
    p.in_proven_range = rho < 2.0;
    const double k = 2.0 * pi / (rho * rho);
    double max_f = 0.0, max_diff = 0.0;
    for (double w : p.grid) {
        const double d = std::min(w, 1.0 - w);
        // Terms with k((w+n)^2 - d^2) > 745 vanish in double precision.
        const double reach = std::sqrt(d * d + 745.0 / k) + 1.0;
        const long lo = static_cast<long>(std::floor(-w - reach)), hi = static_cast<long>(std::ceil(reach - w));
        double f = 0.0, h = 0.0;
        for (long n = lo; n <= hi; ++n) {
            const double x = w + double(n);
            const double e = std::exp(-k * (x * x - d * d));
            f += e;
            h += x * x * e;
        }
        p.log_scale.push_back(-k * d * d);
        p.F.push_back(f);
        p.H.push_back(h);
        p.G.push_back(h / f);
        const double f_true = f * std::exp(-k * d * d);
        const double f_theta = rho / std::sqrt(2.0) * theta_eval(w, 0.5 * rho * rho).theta;
        max_f = std::max(max_f, f_true);
        max_diff = std::max(max_diff, std::abs(f_true - f_theta));
    }
    p.alt_G = p.G;
    p.cross_check = max_diff / max_f;
    detail::finish_profile(p);
    return p;
}

/// Sum_{l >= 2} l^2 e^{-pi (l^2 - 1)}, the constant compared against 1/3000.
inline double gauss_tail_constant() {
    double s = 0.0;
    for (int l = 2; l < 40; ++l) s += double(l) * l * std::exp(-pi * (double(l) * l - 1.0));
    return s;
}

/// log of e^{-pi/rho^2} h1/h2 with h1 = sum (2l-1)^2 e^{-pi (2l-1)^2/rho^2},
/// h2 = sum (2l)^2 e^{-pi (2l)^2/rho^2}; positive exactly when the ratio exceeds 1.
inline double gauss_h_log_ratio(double rho) {
    if (!(rho > 0.0)) throw Error(Errc::Validation, "rho must be positive");
    const double k = pi / (rho * rho);
    double s1 = 0.0, s2 = 0.0;
    for (int l = 1; l < 10000; ++l) {
        const double o = 2.0 * l - 1.0, e = 2.0 * l;
        const double t1 = o * o * std::exp(-k * (o * o - 1.0));
        const double t2 = e * e * std::exp(-k * (e * e - 4.0));
        s1 += t1;
        s2 += t2;
        if (t1 < 1e-18 * s1 && t2 < 1e-18 * s2) break;
    }
    // log h1 = -k + log s1, log h2 = -4k + log s2.
    return -k + (-k + std::log(s1)) - (-4.0 * k + std::log(s2));
}

// ---------------------------------------------------------------- exponential family

/// f_rho(w) = e^{4 rho (1-2w)} - (w e^{-2rho} + 1 - w) / (w - w e^{-2rho} + e^{-2rho}).
inline double exp_f_rho(double w, double rho) {
    const double q = std::exp(-2.0 * rho);
    return std::exp(4.0 * rho * (1.0 - 2.0 * w)) - (w * q + 1.0 - w) / (w - w * q + q);
}

inline double exp_I1_closed(double w, double rho) {
    const double q = std::exp(-2.0 * rho), one_q = -std::expm1(-2.0 * rho);
    return std::exp(-4.0 * rho * (1.0 - w)) * (w - w * q + q) / (one_q * one_q * one_q) * exp_f_rho(w, rho);
}

inline double exp_I2_closed(double w, double rho) {
    const double q = std::exp(-2.0 * rho), one_q = -std::expm1(-2.0 * rho);
    return q / (one_q * one_q * one_q) *
           (2.0 * w * (1.0 - q - 2.0 * rho - 2.0 * rho * q) + 2.0 * rho * q + q + 2.0 * rho - 1.0);
}

namespace detail {

// Indices beyond which e^{-2 rho L} drops below 1e-20 of the leading term.
inline int exp_cutoff(double rho) { return static_cast<int>(std::ceil(46.0 / (2.0 * rho))) + 8; }

} // namespace detail

/// I1 as the defining double sum, truncated.
inline double exp_I1_series(double w, double rho) {
    const int L = detail::exp_cutoff(rho);
    double s = 0.0;
    for (int l = 0; l <= L; ++l)
        for (int n = 0; n <= L; ++n) s += (w + l) * std::exp(-2.0 * rho * (2.0 * w + n + l));
    for (int l = 1; l <= L; ++l)
        for (int n = 1; n <= L; ++n) s += (w - l) * std::exp(-2.0 * rho * (-2.0 * w + n + l));
    return s;
}

/// I2 as the defining double sum, truncated.
inline double exp_I2_series(double w, double rho) {
    const int L = detail::exp_cutoff(rho);
    double s = 0.0;
    for (int l = 1; l <= L; ++l)
        for (int n = 0; n <= L; ++n)
            s += (w - l + 2.0 * rho * (w - l) * (w - l)) * std::exp(-2.0 * rho * (n + l));
    for (int l = 0; l <= L; ++l)
        for (int n = 1; n <= L; ++n)
            s += (w + l - 2.0 * rho * (w + l) * (w + l)) * std::exp(-2.0 * rho * (n + l));
    return s;
}

struct ExpProfile : RatioProfile {
    std::vector<double> I1, I2, f_rho;  // closed forms on the grid
    double I_cross_check = 0.0;         // closed vs double sum, relative, on a subsample
    double tail_bound = 0.0;
};

/// Exponential family: F(w) = sum e^{-2 rho |w+n|}, H with weight (w+n)^2,
/// by direct summation; the alternative is the closed geometric form.
inline ExpProfile exp_profile(double rho, int grid_size) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(Errc::Validation, "rho must be positive");
    ExpProfile p;
    p.family = Family::ExpSeries;
    p.rho = rho;
    p.grid = detail::unit_grid(grid_size);
    p.in_proven_range = rho >= 0.74;
    const double q = std::exp(-2.0 * rho);
    // Tail of sum_{k > N} (k+1)^2 q^k relative to the leading term.
    long N = 8;
    auto tail = [&](long n) {
        const double r = q * ((n + 3.0) / (n + 2.0)) * ((n + 3.0) / (n + 2.0));
        return r < 1.0 ? (n + 2.0) * (n + 2.0) * std::pow(q, double(n + 1)) / (1.0 - r) : detail::pos_inf;
    };
    while (tail(N) > 1e-17 && N < (1L << 24)) N *= 2;
    if (tail(N) > 1e-13) throw Error(Errc::TailNotCertifiable, "exponential series did not converge");
    p.tail_bound = 2.0 * tail(N);

    double max_diff = 0.0;
    for (double w : p.grid) {
        const double d = std::min(w, 1.0 - w);
        double f = 0.0, h = 0.0;
        for (long n = -N; n <= N; ++n) {
            const double x = w + double(n);
            const double e = std::exp(-2.0 * rho * (std::abs(x) - d));
            f += e;
            h += x * x * e;
        }
        p.log_scale.push_back(-2.0 * rho * d);
        p.F.push_back(f);
        p.H.push_back(h);
        p.G.push_back(h / f);
        const auto c = detail::exp_sums(rho, w);
        p.alt_G.push_back(c.H / c.F);
        max_diff = std::max(max_diff, std::abs(h / f - c.H / c.F) / std::max(1.0, h / f));
        p.I1.push_back(exp_I1_closed(w, rho));
        p.I2.push_back(exp_I2_closed(w, rho));
        p.f_rho.push_back(exp_f_rho(w, rho));
    }
    p.cross_check = max_diff;
    const std::size_t stride = std::max<std::size_t>(1, p.grid.size() / 64);
    double worst = 0.0;
    for (std::size_t j = 0; j < p.grid.size(); j += stride) {
        const double w = p.grid[j];
        const double s1 = exp_I1_series(w, rho), s2 = exp_I2_series(w, rho);
        worst = std::max(worst, std::abs(s1 - p.I1[j]) / std::max(1.0, std::abs(s1)));
        worst = std::max(worst, std::abs(s2 - p.I2[j]) / std::max(1.0, std::abs(s2)));
    }
    p.I_cross_check = worst;
    detail::finish_profile(p);
    return p;
}

// ---------------------------------------------------------------- two-pole family

/// Hyperbolic coefficients, all multiplied by 4 e^{-c-d} so that large c, d
/// stay finite. Requires c, d > 0.
struct HyperbolicCoeffs {
    double A, B, C, D;
};

inline HyperbolicCoeffs hyperbolic_coeffs(double c, double d) {
    const double ec = std::exp(-2.0 * c), ed = std::exp(-2.0 * d);
    const double mc = -std::expm1(-2.0 * c), md = -std::expm1(-2.0 * d);
    const double xc = std::exp(-c), xd = std::exp(-d);
    return {d * (1.0 + ec) * md - c * (1.0 + ed) * mc, 2.0 * (d * xc * md - c * xd * mc),
            d * (1.0 + ed) * mc - c * (1.0 + ec) * md, 2.0 * (c * xc * md - d * xd * mc)};
}

// Confluent c = d = m limit of the coefficients divided by (d - c), same scaling.
inline HyperbolicCoeffs hyperbolic_coeffs_confluent(double m) {
    const double e2 = std::exp(-2.0 * m), e1 = std::exp(-m), m2 = -std::expm1(-2.0 * m);
    return {(1.0 + e2) * m2 + 4.0 * m * e2, 2.0 * e1 * m2 + 2.0 * m * e1 * (1.0 + e2),
            (1.0 + e2) * m2 - 4.0 * m * e2, 2.0 * m * e1 * (1.0 + e2) - 2.0 * e1 * m2};
}

/// Closed form (cd / 4 pi^2)(A - B cos 2 pi w)/(C + D cos 2 pi w) for c = rho/a,
/// d = rho/b. The ratio is unchanged under c -> -c, so |c|, |d| are used; when
/// |c| and |d| agree to 1e-5 the symmetric confluent limit at their mean is taken.
inline double twopole_G_closed(double c, double d, double w) {
    c = std::abs(c);
    d = std::abs(d);
    const double k = std::cos(2.0 * pi * w);
    const double mid = 0.5 * (c + d);
    if (std::abs(c - d) < 1e-5 * mid) {
        const auto h = hyperbolic_coeffs_confluent(mid);
        return mid * mid / (4.0 * pi * pi) * (h.A - h.B * k) / (h.C + h.D * k);
    }
    const auto h = hyperbolic_coeffs(c, d);
    return c * d / (4.0 * pi * pi) * (h.A - h.B * k) / (h.C + h.D * k);
}

/// Relative residual of cd(AD + BC) = cd(d^2 - c^2) sinh c sinh d (cosh d - cosh c),
/// evaluated unscaled; meaningful for moderate c, d.
inline double twopole_identity_residual(double c, double d) {
    const double A = d * std::cosh(c) * std::sinh(d) - c * std::cosh(d) * std::sinh(c);
    const double B = d * std::sinh(d) - c * std::sinh(c);
    const double C = d * std::cosh(d) * std::sinh(c) - c * std::cosh(c) * std::sinh(d);
    const double D = c * std::sinh(d) - d * std::sinh(c);
    const double lhs = c * d * (A * D + B * C);
    const double rhs = c * d * (d * d - c * c) * std::sinh(c) * std::sinh(d) * (std::cosh(d) - std::cosh(c));
    return std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
}

/// Direct lattice sums of F~ and H~ with an asymptotic correction for |n| > N.
inline std::pair<double, double> twopole_direct_sums(double c, double d, double w) {
    const double c2 = c * c, d2 = d * d, p2 = 4.0 * pi * pi;
    const long N = std::max(2000L, static_cast<long>(100.0 * std::max(std::abs(c), std::abs(d))));
    double f = 0.0, h = 0.0;
    for (long n = -N; n <= N; ++n) {
        const double x = w + double(n), x2 = x * x;
        const double t = c2 * d2 / ((c2 + p2 * x2) * (d2 + p2 * x2));
        f += t;
        h += x2 * t;
    }
    // Midpoint-rule tails on both sides from the expansion in 1/x.
    const double K = c2 * d2 / (p2 * p2), s = (c2 + d2) / p2;
    auto tail_h = [&](double X) { return K * (1.0 / X - s / (3.0 * X * X * X)); };
    auto tail_f = [&](double X) { return K * (1.0 / (3.0 * X * X * X) - s / (5.0 * std::pow(X, 5))); };
    const double xr = N + 0.5 + w, xl = N + 0.5 - w;
    f += tail_f(xr) + tail_f(xl);
    h += tail_h(xr) + tail_h(xl);
    return {f, h};
}

/// Two-pole family with c = rho/a, d = rho/b. F, H come from the partial
/// fraction sums; the alternative G is the direct lattice sum. `cross_check`
/// compares H/F, the hyperbolic closed form and the direct sum.
inline RatioProfile twopole_profile(double a, double b, double rho, int grid_size) {
    if (a == 0.0 || b == 0.0 || !std::isfinite(a) || !std::isfinite(b))
        throw Error(Errc::Validation, "two-pole parameters must be nonzero and finite");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(Errc::Validation, "rho must be positive");
    RatioProfile p;
    p.family = Family::TwoPoleClosed;
    p.rho = rho;
    p.grid = detail::unit_grid(grid_size);
    const double c = std::abs(rho / a), d = std::abs(rho / b);
    double worst = 0.0;
    for (double w : p.grid) {
        const auto s = detail::two_pole_sums(c, d, w);
        const double g = s.H / s.F;
        const double closed = twopole_G_closed(c, d, w);
        const auto [fd, hd] = twopole_direct_sums(c, d, w);
        p.log_scale.push_back(0.0);
        p.F.push_back(s.F);
        p.H.push_back(s.H);
        p.G.push_back(g);
        p.alt_G.push_back(hd / fd);
        worst = std::max({worst, std::abs(closed - g) / g, std::abs(hd / fd - g) / g});
    }
    p.cross_check = worst;
    detail::finish_profile(p);
    return p;
}

inline nlohmann::json profile_json(const RatioProfile& p) {
    return {{"family", family_name(p.family)},
            {"rho", p.rho},
            {"grid_size", p.grid.size()},
            {"argmax_w", p.argmax_w},
            {"monotone_violation", p.monotone_violation},
            {"cross_check", p.cross_check},
            {"in_proven_range", p.in_proven_range}};
}

// ---------------------------------------------------------------- factor chains

struct MonotonicityReport {
    int chain_length = 0;                // number of comparisons B~_{mu+1} <= B~_mu
    std::vector<double> violations;      // per comparison, max of B~_{mu+1} - B~_mu
    double max_violation = 0.0;
    bool monotone = true;
    bool proven = true;                  // false for the type-II extension
    double tol = 1e-10;
};

namespace detail {

inline Window chain_window(const Window& base, const std::vector<double>& factors) {
    switch (base.kind) {
        case Kind::Gaussian: return dilate(type1(factors), base.gamma);
        case Kind::TwoSidedExp: return dilate(type2_exp(factors), base.gamma);
        case Kind::TwoPole: return dilate(type2_two_pole(base.a, base.b, factors), base.gamma);
        default: throw Error(Errc::Validation, "chain base must be gaussian, two_sided_exp or two_pole");
    }
}

} // namespace detail

/// Adds the factors one at a time and checks B~_{mu+1} <= B~_mu + tol on the
/// grid, with B~(u) = h^2 B(u/h). A Gaussian base builds type-I windows; an
/// exponential or two-pole base builds type-II windows with that transform.
inline MonotonicityReport tp_monotonicity_check(const Window& base, const std::vector<double>& factors, double h,
                                                int grid_size, double tol = 1e-10) {
    if (!(h > 0.0)) throw Error(Errc::Validation, "h must be positive");
    MonotonicityReport r;
    r.tol = tol;
    r.proven = base.kind == Kind::Gaussian;
    LatticeOptions opt;
    opt.grid_size = grid_size;
    std::vector<double> prefix;
    auto prev = periodize(detail::chain_window(base, prefix), h, opt).b_vals;
    for (double v : factors) {
        prefix.push_back(v);
        const auto cur = periodize(detail::chain_window(base, prefix), h, opt).b_vals;
        double worst = detail::neg_inf;
        for (std::size_t j = 0; j < cur.size(); ++j) {
            const double diff = h * h * (cur[j] - prev[j]);
            worst = std::max(worst, diff / std::max(1.0, h * h * prev[j]));
        }
        r.violations.push_back(worst);
        r.max_violation = std::max(r.max_violation, worst);
        prev = cur;
    }
    r.chain_length = static_cast<int>(factors.size());
    r.monotone = r.max_violation <= tol;
    return r;
}

// ---------------------------------------------------------------- dilation limits

enum class LimitKind { TypeIGammaToZero, TypeIIGammaToInf };

struct DilationLimitReport {
    LimitKind kind = LimitKind::TypeIGammaToZero;
    double param = 1.0;
    double limit = 0.0;
    std::vector<double> gammas;
    std::vector<double> m_values;
    std::vector<double> distances;
    bool monotone_approach = true;
    bool lower_bound_holds = true;  // M >= param^2 / 4 throughout
    std::string evaluation;         // how each gamma was turned into a lattice problem
};

/// M along a dilation sequence, compared with param^2/4.
/// Type-I, gamma -> 0: M_{phi_gamma, 1/beta} on the primal side.
/// Type-II, gamma -> infinity: for a window with a time-domain form, M of its
/// transform, i.e. the dual side of phi_gamma with h = 1/alpha; for a window
/// given by its transform, the primal side of phi_{1/gamma} with h = 1/alpha.
/// Both give alpha^2 sup sum (w+j)^2 e^{-2 alpha gamma |w+j|} / sum e^{...} for e^{-|x|}.
inline DilationLimitReport dilation_limit_check(LimitKind kind, const Window& window, double param,
                                                const std::vector<double>& gammas, int grid_size = 4096) {
    if (!(param > 0.0)) throw Error(Errc::Validation, "limit parameter must be positive");
    if (gammas.empty()) throw Error(Errc::Validation, "need at least one dilation");
    for (std::size_t k = 1; k < gammas.size(); ++k) {
        const bool ok = kind == LimitKind::TypeIGammaToZero ? gammas[k] < gammas[k - 1] : gammas[k] > gammas[k - 1];
        if (!ok) throw Error(Errc::Validation, "dilations must be sorted toward the limit");
    }
    DilationLimitReport r;
    r.kind = kind;
    r.param = param;
    r.limit = param * param / 4.0;
    r.gammas = gammas;
    LatticeOptions opt;
    opt.grid_size = grid_size;
    const bool dual = kind == LimitKind::TypeIIGammaToInf && has_time_domain(window);
    r.evaluation = kind == LimitKind::TypeIGammaToZero ? "primal, phi_gamma"
                   : dual                               ? "dual, phi_gamma"
                                                        : "primal, phi_{1/gamma}";
    opt.side = dual ? Side::Dual : Side::Primal;
    for (double g : gammas) {
        const double eff = (kind == LimitKind::TypeIIGammaToInf && !dual) ? 1.0 / g : g;
        const double m = m_value(dilate(window, eff), 1.0 / param, opt);
        r.m_values.push_back(m);
        r.distances.push_back(std::abs(m - r.limit));
        if (m < r.limit * (1.0 - 1e-12)) r.lower_bound_holds = false;
    }
    for (std::size_t k = 1; k < r.distances.size(); ++k)
        if (r.distances[k] > r.distances[k - 1] * (1.0 + 1e-9) + 1e-15) r.monotone_approach = false;
    return r;
}

} // namespace gabor
