#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "json.hpp"

#include "gabor/error.hpp"
#include "gabor/lattice.hpp"
#include "gabor/window.hpp"

namespace gabor {

/// f(x) = sum_k d_k phi(x - shift - h (first + k)) for the finitely many stored d_k.
struct SplineFunction {
    Window window;
    double h = 1.0;
    long first = 0;
    std::vector<double> coeffs;
    double shift = 0.0;
};

namespace detail {

inline void require_time_domain(const Window& w) {
    if (!has_time_domain(w))
        throw Error(Errc::Validation, std::string("'") + kind_name(w.kind) + "' has no closed time-domain form");
}

// Radius outside of which |phi| is below ~1e-25 of its peak (exact for B-splines).
inline double effective_radius(const Window& w) {
    const double g = w.gamma;
    switch (w.kind) {
        case Kind::BSpline: return 0.5 * w.order / g;
        case Kind::Gaussian: return std::sqrt(60.0 / pi) / g;
        case Kind::TwoSidedExp: return 60.0 / g;
        case Kind::Hermite: return (std::sqrt((2.0 * w.order + 1.0) / (2.0 * pi)) + std::sqrt(60.0 / pi)) / g;
        default: break;
    }
    throw Error(Errc::Validation, "window has no closed time-domain form");
}

// Uniform double in [-1, 1) from the top 53 bits, identical on every platform.
inline double symmetric_unit(std::mt19937_64& rng) {
    return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

} // namespace detail

inline SplineFunction make_spline(const Window& w, double h, std::vector<double> coeffs, long first = 0,
                                  double shift = 0.0) {
    validate(w);
    detail::require_time_domain(w);
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(Errc::Validation, "h must be positive and finite");
    for (double c : coeffs)
        if (!std::isfinite(c)) throw Error(Errc::Validation, "coefficients must be finite");
    return SplineFunction{w, h, first, std::move(coeffs), shift};
}

/// `count` coefficients uniform on [-1, 1), starting at index `first`.
inline SplineFunction synth(const Window& w, double h, int count, std::uint64_t seed, long first = 0) {
    if (count < 0) throw Error(Errc::Validation, "coefficient count must be nonnegative");
    std::mt19937_64 rng(seed);
    std::vector<double> c(static_cast<std::size_t>(count));
    for (auto& x : c) x = detail::symmetric_unit(rng);
    return make_spline(w, h, std::move(c), first);
}

/// Translate by tau: x -> f(x - tau).
inline SplineFunction translate(SplineFunction f, double tau) {
    f.shift += tau;
    return f;
}

/// Interval outside which f vanishes (compact windows) or is negligible.
inline std::pair<double, double> support_of(const SplineFunction& f) {
    const double r = detail::effective_radius(f.window);
    const double lo = f.shift + f.h * static_cast<double>(f.first);
    const double hi = f.shift + f.h * static_cast<double>(f.first + static_cast<long>(f.coeffs.size()) - 1);
    return {lo - r, hi + r};
}

namespace detail {

template <class Fn>
double spline_sum(const SplineFunction& f, double x, Fn&& fn) {
    if (f.coeffs.empty()) return 0.0;
    const double r = effective_radius(f.window);
    const double t = (x - f.shift) / f.h;
    const long n = static_cast<long>(f.coeffs.size());
    const long lo = std::max(f.first, static_cast<long>(std::floor(t - r / f.h)) - 1);
    const long hi = std::min(f.first + n - 1, static_cast<long>(std::ceil(t + r / f.h)) + 1);
    double s = 0.0;
    for (long k = lo; k <= hi; ++k)
        s += f.coeffs[static_cast<std::size_t>(k - f.first)] * fn(x - f.shift - f.h * static_cast<double>(k));
    return s;
}

} // namespace detail

inline double eval(const SplineFunction& f, double x) {
    return detail::spline_sum(f, x, [&](double y) { return window_eval(f.window, y); });
}

inline double eval_derivative(const SplineFunction& f, double x) {
    return detail::spline_sum(f, x, [&](double y) { return window_derivative(f.window, y); });
}

namespace detail {

// Points where some translate of phi is not smooth.
inline std::vector<double> breakpoints(const SplineFunction& f) {
    std::vector<double> pts;
    const auto [lo, hi] = support_of(f);
    pts.push_back(lo);
    pts.push_back(hi);
    const long n = static_cast<long>(f.coeffs.size());
    for (long k = f.first; k < f.first + n; ++k) {
        const double c = f.shift + f.h * static_cast<double>(k);
        if (f.window.kind == Kind::BSpline) {
            for (int j = 0; j <= f.window.order; ++j)
                pts.push_back(c + (j - 0.5 * f.window.order) / f.window.gamma);
        } else if (f.window.kind == Kind::TwoSidedExp) {
            pts.push_back(c);
        }
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double p : pts) {
        if (p < lo || p > hi) continue;
        if (out.empty() || p - out.back() > 1e-12 * std::max(1.0, std::abs(p))) out.push_back(p);
    }
    return out;
}

// 16-point Gauss-Legendre on every breakpoint interval, each split into
// `split` equal panels; smooth windows are additionally cut into panels no
// wider than `width`.
template <class Fn>
double panel_integral(const std::vector<double>& pts, int split, double width, Fn&& fn) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        const int pieces = split * std::max(1, static_cast<int>(std::ceil((b - a) / width)));
        const double step = (b - a) / pieces;
        for (int p = 0; p < pieces; ++p)
            acc += boost::math::quadrature::gauss<double, 16>::integrate(fn, a + p * step, a + (p + 1) * step);
    }
    return acc;
}

template <class Fn>
double converged_integral(const SplineFunction& f, Fn&& fn) {
    if (f.coeffs.empty()) return 0.0;
    const auto pts = breakpoints(f);
    const bool piecewise_poly = f.window.kind == Kind::BSpline && f.window.order <= 16;
    const double width = (f.window.kind == Kind::BSpline) ? std::numeric_limits<double>::infinity()
                                                           : 0.5 / f.window.gamma;
    double prev = panel_integral(pts, 1, width, fn);
    if (piecewise_poly) return prev;  // degree <= 30: the 16-point rule is exact
    for (int split = 2; split <= 64; split *= 2) {
        const double cur = panel_integral(pts, split, width, fn);
        if (std::abs(cur - prev) <= 1e-11 * std::abs(cur)) return cur;
        prev = cur;
    }
    throw Error(Errc::QuadratureNotConverged, "panel refinement did not reach relative accuracy 1e-11");
}

} // namespace detail

inline double l2_norm(const SplineFunction& f) {
    return std::sqrt(detail::converged_integral(f, [&](double x) {
        const double v = eval(f, x);
        return v * v;
    }));
}

inline double deriv_norm(const SplineFunction& f) {
    if (f.window.kind == Kind::BSpline && f.window.order < 2)
        throw Error(Errc::Validation, "Q_1 is not continuous; its derivative norm is undefined");
    return std::sqrt(detail::converged_integral(f, [&](double x) {
        const double v = eval_derivative(f, x);
        return v * v;
    }));
}

/// ||f'|| / (2 pi ||f||); the Bernstein bound says this is at most sqrt(M_{phi,h}).
inline double bernstein_ratio(const SplineFunction& f) {
    const double n = l2_norm(f);
    if (!(n > 0.0)) throw Error(Errc::ZeroFunction, "bernstein ratio of the zero function");
    return deriv_norm(f) / (2.0 * pi * n);
}

struct SharpnessProbe {
    double bound = 0.0;     // sqrt(M)
    double argmax_w = 0.0;  // maximizer of B on [0, 1/h]
    double ratio = 0.0;     // Bernstein ratio of the modulated spline
};

/// Spline with d_k = cos(2 pi w* h k), w* the maximizer of B, k = 0..count-1.
inline SharpnessProbe sharpness_probe(const Window& w, double h, int count) {
    if (count < 1) throw Error(Errc::Validation, "need at least one coefficient");
    const auto m = m_value_detail(w, h);
    std::vector<double> c(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) c[static_cast<std::size_t>(k)] = std::cos(2.0 * pi * m.argmax_w * h * k);
    return {std::sqrt(m.value), m.argmax_w, bernstein_ratio(make_spline(w, h, std::move(c)))};
}

// ---------------------------------------------------------------- sampling sets

struct SamplingSet {
    std::vector<double> points;
    std::vector<double> weights;  // (x_{n+1} - x_{n-1}) / 2, one-sided half gap at the ends
    double delta = 0.0;           // largest consecutive gap
};

inline SamplingSet make_sampling_set(std::vector<double> pts) {
    if (pts.size() < 2) throw Error(Errc::Validation, "sampling set needs at least two points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!std::isfinite(pts[i])) throw Error(Errc::Validation, "sampling points must be finite");
        if (i > 0 && !(pts[i] > pts[i - 1])) throw Error(Errc::Validation, "sampling points must increase strictly");
    }
    SamplingSet s;
    const std::size_t n = pts.size();
    s.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = pts[i == 0 ? 0 : i - 1], right = pts[i + 1 == n ? n - 1 : i + 1];
        s.weights[i] = 0.5 * (right - left);
        if (i > 0) s.delta = std::max(s.delta, pts[i] - pts[i - 1]);
    }
    s.points = std::move(pts);
    return s;
}

/// x_n = x0 + spacing n + jitter U[-1, 1) covering [lo, hi]; needs jitter < spacing / 2.
inline SamplingSet jittered_grid(double lo, double hi, double spacing, double jitter, std::uint64_t seed,
                                 double x0 = 0.0) {
    if (!(spacing > 0.0) || !(hi > lo)) throw Error(Errc::Validation, "need spacing > 0 and hi > lo");
    if (!(jitter >= 0.0 && jitter < 0.5 * spacing))
        throw Error(Errc::Validation, "jitter must lie in [0, spacing/2)");
    std::mt19937_64 rng(seed);
    const long first = static_cast<long>(std::floor((lo - x0) / spacing)) - 1;
    const long last = static_cast<long>(std::ceil((hi - x0) / spacing)) + 1;
    std::vector<double> pts;
    for (long n = first; n <= last; ++n)
        pts.push_back(x0 + spacing * static_cast<double>(n) + jitter * detail::symmetric_unit(rng));
    return make_sampling_set(std::move(pts));
}

/// Sampling interval around the support of f with a margin of three gaps.
inline std::pair<double, double> sampling_window(const SplineFunction& f, double spacing) {
    const auto [lo, hi] = support_of(f);
    return {lo - 3.0 * spacing, hi + 3.0 * spacing};
}

struct SamplingReport {
    double m_value = 0.0;
    double delta = 0.0;
    double norm2 = 0.0;        // ||f||^2
    double weighted_sum = 0.0; // sum w_n |f(x_n)|^2
    double lower = 0.0;        // (1 - 2 delta sqrt M)^2 ||f||^2
    double upper = 0.0;        // (1 + 2 delta sqrt M)^2 ||f||^2
    bool lower_ok = true;
    bool upper_ok = true;
};

/// Weighted sampling inequality for f on s. M is computed from f's window
/// unless given. The set must reach past the support of f on both sides.
inline SamplingReport sampling_bounds_check(const SplineFunction& f, const SamplingSet& s, double m = -1.0,
                                            double rel_tol = 1e-9) {
    SamplingReport r;
    r.m_value = m > 0.0 ? m : m_value(f.window, f.h);
    r.delta = s.delta;
    const double root = std::sqrt(r.m_value);
    if (!(2.0 * s.delta * root < 1.0))
        throw Error(Errc::DensityTooLow, "gap " + std::to_string(s.delta) + " is not below 1/(2 sqrt M) = " +
                                             std::to_string(0.5 / root));
    const auto [lo, hi] = support_of(f);
    if (!f.coeffs.empty() && (s.points.front() > lo || s.points.back() < hi))
        throw Error(Errc::Validation, "sampling set does not cover the support of f");
    r.norm2 = std::pow(l2_norm(f), 2);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        const double v = eval(f, s.points[i]);
        r.weighted_sum += s.weights[i] * v * v;
    }
    r.lower = std::pow(1.0 - 2.0 * s.delta * root, 2) * r.norm2;
    r.upper = std::pow(1.0 + 2.0 * s.delta * root, 2) * r.norm2;
    r.lower_ok = r.weighted_sum >= r.lower * (1.0 - rel_tol);
    r.upper_ok = r.weighted_sum <= r.upper * (1.0 + rel_tol);
    return r;
}

inline nlohmann::json sampling_json(const SamplingReport& r) {
    return {{"m_value", r.m_value}, {"delta", r.delta},       {"norm2", r.norm2}, {"weighted_sum", r.weighted_sum},
            {"lower", r.lower},     {"upper", r.upper},       {"lower_ok", r.lower_ok},
            {"upper_ok", r.upper_ok}};
}

} // namespace gabor
