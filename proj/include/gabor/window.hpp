#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "json.hpp"

#include "gabor/error.hpp"

namespace gabor {

inline constexpr double pi = std::numbers::pi;
inline constexpr int hermite_max_degree = 64;

enum class Kind { BSpline, Gaussian, TwoSidedExp, TwoPole, Hermite, TypeI, TypeII };
enum class Base { Exp, TwoPole };

/// Tagged window descriptor. `order` is the B-spline order m or the Hermite
/// index n; `a`, `b` are the two-pole parameters (also used by a type-II
/// two-pole base); `factors` are the v_j of a type-I/II product.
/// The dilation acts as phi_gamma(x) = sqrt(gamma) phi(gamma x).
struct Window {
    Kind kind = Kind::Gaussian;
    int order = 0;
    double a = 1.0;
    double b = 1.0;
    Base base = Base::Exp;
    std::vector<double> factors;
    double gamma = 1.0;

    bool operator==(const Window&) const = default;
};

inline void validate(const Window& w) {
    if (!(w.gamma > 0.0) || !std::isfinite(w.gamma))
        throw Error(Errc::Validation, "dilation must be positive and finite");
    switch (w.kind) {
        case Kind::BSpline:
            if (w.order < 1) throw Error(Errc::Validation, "B-spline order must be >= 1");
            break;
        case Kind::Hermite:
            if (w.order < 0 || w.order > hermite_max_degree)
                throw Error(Errc::Validation, "Hermite index must be in [0, 64]");
            break;
        case Kind::TwoPole:
            if (w.a == 0.0 || w.b == 0.0 || !std::isfinite(w.a) || !std::isfinite(w.b))
                throw Error(Errc::Validation, "two-pole parameters must be nonzero and finite");
            break;
        case Kind::TypeII:
            if (w.base == Base::TwoPole &&
                (w.a == 0.0 || w.b == 0.0 || !std::isfinite(w.a) || !std::isfinite(w.b)))
                throw Error(Errc::Validation, "two-pole parameters must be nonzero and finite");
            [[fallthrough]];
        case Kind::TypeI:
            for (double v : w.factors)
                if (!std::isfinite(v)) throw Error(Errc::Validation, "factor must be finite");
            break;
        default:
            break;
    }
}

inline Window bspline(int m) {
    Window w;
    w.kind = Kind::BSpline;
    w.order = m;
    validate(w);
    return w;
}
inline Window gaussian() { return Window{}; }
inline Window two_sided_exp() {
    Window w;
    w.kind = Kind::TwoSidedExp;
    return w;
}
inline Window two_pole(double a, double b) {
    Window w;
    w.kind = Kind::TwoPole;
    w.a = a;
    w.b = b;
    validate(w);
    return w;
}
inline Window hermite(int n) {
    Window w;
    w.kind = Kind::Hermite;
    w.order = n;
    validate(w);
    return w;
}
inline Window type1(std::vector<double> factors) {
    Window w;
    w.kind = Kind::TypeI;
    w.factors = std::move(factors);
    validate(w);
    return w;
}
inline Window type2_exp(std::vector<double> factors) {
    Window w;
    w.kind = Kind::TypeII;
    w.base = Base::Exp;
    w.factors = std::move(factors);
    validate(w);
    return w;
}
inline Window type2_two_pole(double a, double b, std::vector<double> factors) {
    Window w;
    w.kind = Kind::TypeII;
    w.base = Base::TwoPole;
    w.a = a;
    w.b = b;
    w.factors = std::move(factors);
    validate(w);
    return w;
}

inline Window dilate(Window w, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw Error(Errc::Validation, "dilation must be positive and finite");
    w.gamma *= gamma;
    return w;
}

// ---------------------------------------------------------------- B-splines

/// Centered B-spline Q_m via the truncated-power sum, evaluated on the left
/// half so that at most ceil(m/2) terms enter.
template <class T>
T bspline_eval(int m, T x) {
    if (m < 1) throw Error(Errc::Validation, "B-spline order must be >= 1");
    using std::abs;
    const T y = -abs(x);
    const T half = T(m) / 2;
    if (y + half <= T(0)) return T(0);
    T sum = 0;
    T binom = 1;
    for (int j = 0; j <= m; ++j) {
        const T t = y + half - T(j);
        if (t <= T(0)) break;
        T p = 1;
        for (int k = 0; k < m - 1; ++k) p *= t;
        sum += (j % 2 == 0 ? binom : -binom) * p;
        binom = binom * T(m - j) / T(j + 1);
    }
    T fact = 1;
    for (int k = 2; k < m; ++k) fact *= T(k);
    return sum / fact;
}

/// Q_m'. For m = 2 this is the a.e. derivative (+1 on (-1,0), -1 on (0,1)).
inline double bspline_derivative(int m, double x) {
    if (m < 2) throw Error(Errc::Validation, "B-spline derivative needs order >= 2");
    if (m == 2) {
        if (x > -1.0 && x < 0.0) return 1.0;
        if (x > 0.0 && x < 1.0) return -1.0;
        return 0.0;
    }
    return bspline_eval(m - 1, x + 0.5) - bspline_eval(m - 1, x - 0.5);
}

/// Q_m'' as a second difference of Q_{m-2}; requires m >= 4.
template <class T>
T bspline_second_derivative(int m, T x) {
    if (m < 4) throw Error(Errc::Validation, "continuous second derivative needs order >= 4");
    return bspline_eval(m - 2, x + T(1)) - T(2) * bspline_eval(m - 2, x) +
           bspline_eval(m - 2, x - T(1));
}

inline double sinc_pi(double xi) {
    const double t = pi * xi;
    if (std::abs(t) < 1e-4) {
        const double t2 = t * t;
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sin(t) / t;
}

// ---------------------------------------------------------------- Hermite

namespace detail {

// psi_0..psi_{n+1} of the orthonormal Hermite functions at y.
inline std::vector<double> hermite_functions(int n, double y) {
    std::vector<double> psi(static_cast<std::size_t>(n) + 2);
    psi[0] = std::pow(pi, -0.25) * std::exp(-0.5 * y * y);
    psi[1] = std::sqrt(2.0) * y * psi[0];
    for (int k = 1; k <= n; ++k)
        psi[k + 1] = std::sqrt(2.0 / (k + 1)) * y * psi[k] - std::sqrt(double(k) / (k + 1)) * psi[k - 1];
    return psi;
}

// (-1)^n psi_n(sqrt(2 pi) x): the Rodrigues form up to a positive constant.
inline double hermite_raw(int n, double x) {
    const double v = hermite_functions(n, std::sqrt(2.0 * pi) * x)[n];
    return (n % 2 == 0) ? v : -v;
}

inline double hermite_raw_derivative(int n, double x) {
    const auto psi = hermite_functions(n, std::sqrt(2.0 * pi) * x);
    double d = -std::sqrt((n + 1) / 2.0) * psi[n + 1];
    if (n > 0) d += std::sqrt(n / 2.0) * psi[n - 1];
    d *= std::sqrt(2.0 * pi);
    return (n % 2 == 0) ? d : -d;
}

inline double hermite_quadrature_norm(int n) {
    const double reach = (std::sqrt(2.0 * n + 1.0) + 12.0) / std::sqrt(2.0 * pi);
    const int panels = static_cast<int>(std::ceil(2.0 * reach / 0.125));
    const double width = 2.0 * reach / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = -reach + p * width;
        acc += boost::math::quadrature::gauss<double, 16>::integrate(
            [n](double x) {
                const double v = hermite_raw(n, x);
                return v * v;
            },
            lo, lo + width);
    }
    return std::sqrt(acc);
}

} // namespace detail

/// Positive constant a_n (relative to the stable raw form) making ||h_n|| = 1,
/// found by quadrature. Every ratio-type quantity is independent of it.
inline double hermite_normalization(int n) {
    if (n < 0 || n > hermite_max_degree) throw Error(Errc::Validation, "Hermite index must be in [0, 64]");
    static const std::array<double, hermite_max_degree + 1> table = [] {
        std::array<double, hermite_max_degree + 1> t{};
        for (int k = 0; k <= hermite_max_degree; ++k) t[k] = 1.0 / detail::hermite_quadrature_norm(k);
        return t;
    }();
    return table[n];
}

inline double hermite_eval(int n, double x) {
    return hermite_normalization(n) * detail::hermite_raw(n, x);
}

inline double hermite_derivative(int n, double x) {
    return hermite_normalization(n) * detail::hermite_raw_derivative(n, x);
}

// ---------------------------------------------------------------- transforms

namespace detail {

inline std::complex<double> factor_product(const std::vector<double>& vs, double s) {
    std::complex<double> p = 1.0;
    for (double v : vs) {
        const double ph = -2.0 * pi * v * s;
        p *= std::complex<double>(std::cos(ph), std::sin(ph)) / std::complex<double>(1.0, 2.0 * pi * v * s);
    }
    return p;
}

inline double factor_log_abs2(const std::vector<double>& vs, double s) {
    double acc = 0.0;
    for (double v : vs) acc -= std::log1p(4.0 * pi * pi * v * v * s * s);
    return acc;
}

inline std::complex<double> two_pole_value(double a, double b, double s) {
    return 1.0 / (std::complex<double>(1.0, 2.0 * pi * a * s) * std::complex<double>(1.0, 2.0 * pi * b * s));
}

} // namespace detail

/// Fourier transform of the dilated window, f^(xi) = int f(x) e^{-2 pi i x xi} dx.
inline std::complex<double> window_ft(const Window& w, double xi) {
    const double s = xi / w.gamma;
    std::complex<double> v;
    switch (w.kind) {
        case Kind::BSpline: v = std::pow(sinc_pi(s), w.order); break;
        case Kind::Gaussian: v = std::exp(-pi * s * s); break;
        case Kind::TwoSidedExp: v = 2.0 / (1.0 + 4.0 * pi * pi * s * s); break;
        case Kind::TwoPole: v = detail::two_pole_value(w.a, w.b, s); break;
        case Kind::Hermite: {
            static const std::complex<double> mi[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
            v = mi[w.order % 4] * hermite_eval(w.order, s);
            break;
        }
        case Kind::TypeI: v = std::exp(-pi * s * s) * detail::factor_product(w.factors, s); break;
        case Kind::TypeII: {
            const std::complex<double> base = (w.base == Base::Exp)
                                                  ? std::complex<double>(std::exp(-std::abs(s)))
                                                  : detail::two_pole_value(w.a, w.b, s);
            v = base * detail::factor_product(w.factors, s);
            break;
        }
    }
    return v / std::sqrt(w.gamma);
}

/// log |f^(xi)|^2, finite or -inf; used by the log-space lattice sums.
inline double log_abs2_ft(const Window& w, double xi) {
    const double s = xi / w.gamma;
    double l = 0.0;
    switch (w.kind) {
        case Kind::BSpline: l = 2.0 * w.order * std::log(std::abs(sinc_pi(s))); break;
        case Kind::Gaussian: l = -2.0 * pi * s * s; break;
        case Kind::TwoSidedExp: l = std::log(4.0) - 2.0 * std::log1p(4.0 * pi * pi * s * s); break;
        case Kind::TwoPole:
            l = -std::log1p(4.0 * pi * pi * w.a * w.a * s * s) - std::log1p(4.0 * pi * pi * w.b * w.b * s * s);
            break;
        case Kind::Hermite: {
            const double h = hermite_eval(w.order, s);
            l = std::log(h * h);
            break;
        }
        case Kind::TypeI: l = -2.0 * pi * s * s + detail::factor_log_abs2(w.factors, s); break;
        case Kind::TypeII:
            l = (w.base == Base::Exp ? -2.0 * std::abs(s)
                                     : -std::log1p(4.0 * pi * pi * w.a * w.a * s * s) -
                                           std::log1p(4.0 * pi * pi * w.b * w.b * s * s)) +
                detail::factor_log_abs2(w.factors, s);
            break;
    }
    return l - std::log(w.gamma);
}

// ---------------------------------------------------------------- time domain

/// True when phi itself has a closed form in the catalog.
inline bool has_time_domain(const Window& w) {
    return w.kind == Kind::BSpline || w.kind == Kind::Gaussian || w.kind == Kind::TwoSidedExp ||
           w.kind == Kind::Hermite;
}

/// Half-width sigma of the support [-sigma, sigma]; infinity if not compact.
inline double support_radius(const Window& w) {
    if (w.kind == Kind::BSpline) return 0.5 * w.order / w.gamma;
    return std::numeric_limits<double>::infinity();
}

inline double window_eval(const Window& w, double x) {
    const double s = w.gamma * x;
    double v = 0.0;
    switch (w.kind) {
        case Kind::BSpline: v = bspline_eval(w.order, s); break;
        case Kind::Gaussian: v = std::exp(-pi * s * s); break;
        case Kind::TwoSidedExp: v = std::exp(-std::abs(s)); break;
        case Kind::Hermite: v = hermite_eval(w.order, s); break;
        default: throw Error(Errc::Validation, "window has no closed time-domain form");
    }
    return std::sqrt(w.gamma) * v;
}

inline double window_derivative(const Window& w, double x) {
    const double s = w.gamma * x;
    double v = 0.0;
    switch (w.kind) {
        case Kind::BSpline: v = (w.order == 1) ? 0.0 : bspline_derivative(w.order, s); break;
        case Kind::Gaussian: v = -2.0 * pi * s * std::exp(-pi * s * s); break;
        case Kind::TwoSidedExp: v = (s > 0 ? -1.0 : (s < 0 ? 1.0 : 0.0)) * std::exp(-std::abs(s)); break;
        case Kind::Hermite: v = hermite_derivative(w.order, s); break;
        default: throw Error(Errc::Validation, "window has no closed time-domain form");
    }
    return w.gamma * std::sqrt(w.gamma) * v;
}

/// log |phi(x)|^2 of the dilated window.
inline double log_abs2_time(const Window& w, double x) {
    const double s = w.gamma * x;
    double l = 0.0;
    switch (w.kind) {
        case Kind::BSpline: {
            const double v = bspline_eval(w.order, s);
            l = std::log(v * v);
            break;
        }
        case Kind::Gaussian: l = -2.0 * pi * s * s; break;
        case Kind::TwoSidedExp: l = -2.0 * std::abs(s); break;
        case Kind::Hermite: {
            const double v = hermite_eval(w.order, s);
            l = std::log(v * v);
            break;
        }
        default: throw Error(Errc::Validation, "window has no closed time-domain form");
    }
    return l + std::log(w.gamma);
}

// ---------------------------------------------------------------- serialization

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::BSpline: return "bspline";
        case Kind::Gaussian: return "gaussian";
        case Kind::TwoSidedExp: return "two_sided_exp";
        case Kind::TwoPole: return "two_pole";
        case Kind::Hermite: return "hermite";
        case Kind::TypeI: return "type1";
        case Kind::TypeII: return "type2";
    }
    return "?";
}

inline nlohmann::json to_json(const Window& w) {
    nlohmann::json params = nlohmann::json::object();
    switch (w.kind) {
        case Kind::BSpline: params["m"] = w.order; break;
        case Kind::Hermite: params["n"] = w.order; break;
        case Kind::TwoPole:
            params["a"] = w.a;
            params["b"] = w.b;
            break;
        case Kind::TypeI: params["factors"] = w.factors; break;
        case Kind::TypeII:
            params["base"] = (w.base == Base::Exp) ? "exp" : "two_pole";
            if (w.base == Base::TwoPole) {
                params["a"] = w.a;
                params["b"] = w.b;
            }
            params["factors"] = w.factors;
            break;
        default: break;
    }
    return {{"kind", kind_name(w.kind)}, {"params", params}, {"gamma", w.gamma}};
}

inline Window window_from_json(const nlohmann::json& j) {
    try {
        Window w;
        const std::string kind = j.at("kind").get<std::string>();
        const nlohmann::json params = j.value("params", nlohmann::json::object());
        w.gamma = j.value("gamma", 1.0);
        if (kind == "bspline") {
            w.kind = Kind::BSpline;
            w.order = params.at("m").get<int>();
        } else if (kind == "gaussian") {
            w.kind = Kind::Gaussian;
        } else if (kind == "two_sided_exp") {
            w.kind = Kind::TwoSidedExp;
        } else if (kind == "two_pole") {
            w.kind = Kind::TwoPole;
            w.a = params.at("a").get<double>();
            w.b = params.at("b").get<double>();
        } else if (kind == "hermite") {
            w.kind = Kind::Hermite;
            w.order = params.at("n").get<int>();
        } else if (kind == "type1") {
            w.kind = Kind::TypeI;
            w.factors = params.value("factors", std::vector<double>{});
        } else if (kind == "type2") {
            w.kind = Kind::TypeII;
            const std::string base = params.value("base", std::string("exp"));
            if (base == "exp") {
                w.base = Base::Exp;
            } else if (base == "two_pole") {
                w.base = Base::TwoPole;
                w.a = params.at("a").get<double>();
                w.b = params.at("b").get<double>();
            } else {
                throw Error(Errc::Validation, "unknown type2 base '" + base + "'");
            }
            w.factors = params.value("factors", std::vector<double>{});
        } else {
            throw Error(Errc::Validation, "unknown window kind '" + kind + "'");
        }
        validate(w);
        return w;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Validation, std::string("malformed window JSON: ") + e.what());
    }
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline double parse_real(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw Error(Errc::Validation, "not a number: '" + s + "'");
    }
    if (used != s.size()) throw Error(Errc::Validation, "not a number: '" + s + "'");
    return v;
}

inline int parse_int(const std::string& s) {
    const double v = parse_real(s);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw Error(Errc::Validation, "not an integer: '" + s + "'");
    return static_cast<int>(v);
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    if (s.empty()) return out;
    for (const auto& part : split(s, ',')) out.push_back(parse_real(part));
    return out;
}

} // namespace detail

/// Inline descriptor: bspline:M, gaussian, exp, twopole:A,B, hermite:N,
/// type1:V1,V2,..., type2:exp:V1,..., type2:twopole:A,B:V1,...
/// A trailing @G dilates by G, e.g. gaussian@0.5.
inline Window parse_window_spec(const std::string& spec) {
    const auto at = spec.find('@');
    if (at != std::string::npos) return dilate(parse_window_spec(spec.substr(0, at)), detail::parse_real(spec.substr(at + 1)));
    const auto parts = detail::split(spec, ':');
    if (parts.empty()) throw Error(Errc::Validation, "empty window spec");
    const std::string& head = parts[0];
    auto arg = [&](std::size_t i) -> std::string {
        if (i >= parts.size()) throw Error(Errc::Validation, "window spec '" + spec + "' is missing a field");
        return parts[i];
    };
    if (head == "bspline") return bspline(detail::parse_int(arg(1)));
    if (head == "gaussian") return gaussian();
    if (head == "exp") return two_sided_exp();
    if (head == "hermite") return hermite(detail::parse_int(arg(1)));
    if (head == "twopole") {
        const auto ab = detail::parse_list(arg(1));
        if (ab.size() != 2) throw Error(Errc::Validation, "twopole needs A,B");
        return two_pole(ab[0], ab[1]);
    }
    if (head == "type1") return type1(parts.size() > 1 ? detail::parse_list(parts[1]) : std::vector<double>{});
    if (head == "type2") {
        const std::string base = arg(1);
        if (base == "exp") return type2_exp(parts.size() > 2 ? detail::parse_list(parts[2]) : std::vector<double>{});
        if (base == "twopole") {
            const auto ab = detail::parse_list(arg(2));
            if (ab.size() != 2) throw Error(Errc::Validation, "type2 twopole base needs A,B");
            return type2_two_pole(ab[0], ab[1],
                                  parts.size() > 3 ? detail::parse_list(parts[3]) : std::vector<double>{});
        }
        throw Error(Errc::Validation, "unknown type2 base '" + base + "'");
    }
    throw Error(Errc::Validation, "unknown window kind '" + head + "'");
}

} // namespace gabor
