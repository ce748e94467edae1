#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"

#include "gabor/error.hpp"
#include "gabor/window.hpp"

namespace gabor {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << '/' << denominator(r);
    return os.str();
}

/// Exact parse of "p/q", an integer, or a terminating decimal such as "-1.25".
inline Rational parse_rational(const std::string& text) {
    auto bad = [&] { return Error(Errc::Validation, "not a rational: '" + text + "'"); };
    auto parse_int = [&](const std::string& s) {
        if (s.empty()) throw bad();
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) throw bad();
        for (std::size_t k = i; k < s.size(); ++k)
            if (s[k] < '0' || s[k] > '9') throw bad();
        BigInt v(s.substr(i));
        return s[0] == '-' ? BigInt(-v) : v;
    };
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const BigInt den = parse_int(text.substr(slash + 1));
        if (den == 0) throw bad();
        return Rational(parse_int(text.substr(0, slash)), den);
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(parse_int(text));
    const std::string whole = text.substr(0, dot), frac = text.substr(dot + 1);
    if (frac.empty()) throw bad();
    for (char ch : frac)
        if (ch < '0' || ch > '9') throw bad();
    const bool neg = !whole.empty() && whole[0] == '-';
    const std::string digits = (whole.empty() || whole == "-" || whole == "+") ? std::string("0") : whole;
    BigInt scale = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
    const Rational mag = Rational(abs(parse_int(digits))) + Rational(BigInt(frac), scale);
    return neg ? Rational(-mag) : mag;
}

inline nlohmann::json rational_json(const Rational& r) {
    std::ostringstream n, d;
    n << numerator(r);
    d << denominator(r);
    return {{"num", n.str()}, {"den", d.str()}};
}

/// Dense polynomial with exact rational coefficients, constant term first.
class RationalPoly {
public:
    RationalPoly() = default;
    explicit RationalPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
    RationalPoly(std::initializer_list<Rational> coeffs) : c_(coeffs) { trim(); }

    /// From integer coefficients listed highest degree first, as printed.
    static RationalPoly from_descending(std::initializer_list<long long> coeffs) {
        std::vector<Rational> c;
        for (auto it = std::rbegin(coeffs); it != std::rend(coeffs); ++it) c.emplace_back(*it);
        return RationalPoly(std::move(c));
    }

    static RationalPoly monomial(const Rational& coeff, std::size_t degree) {
        std::vector<Rational> c(degree + 1);
        c[degree] = coeff;
        return RationalPoly(std::move(c));
    }

    const std::vector<Rational>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    Rational coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Rational(0); }
    Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }

    Rational operator()(const Rational& x) const {
        Rational acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    double eval_double(double x) const {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + static_cast<double>(*it);
        return acc;
    }

    RationalPoly derivative() const {
        std::vector<Rational> d;
        for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * Rational(static_cast<long long>(k)));
        return RationalPoly(std::move(d));
    }

    RationalPoly derivative(int order) const {
        RationalPoly p = *this;
        for (int k = 0; k < order; ++k) p = p.derivative();
        return p;
    }

    friend RationalPoly operator+(const RationalPoly& a, const RationalPoly& b) {
        std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) + b.coeff(k);
        return RationalPoly(std::move(c));
    }
    friend RationalPoly operator-(const RationalPoly& a) {
        std::vector<Rational> c(a.c_);
        for (auto& x : c) x = -x;
        return RationalPoly(std::move(c));
    }
    friend RationalPoly operator-(const RationalPoly& a, const RationalPoly& b) { return a + (-b); }
    friend RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> c(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return RationalPoly(std::move(c));
    }
    friend RationalPoly operator*(const Rational& s, const RationalPoly& a) { return RationalPoly({s}) * a; }
    friend bool operator==(const RationalPoly& a, const RationalPoly& b) { return a.c_ == b.c_; }

    /// Euclidean division over the rationals: *this = q * d + r, deg r < deg d.
    std::pair<RationalPoly, RationalPoly> divmod(const RationalPoly& d) const {
        if (d.is_zero()) throw Error(Errc::Validation, "polynomial division by zero");
        std::vector<Rational> r(c_);
        std::vector<Rational> q(c_.size() >= d.c_.size() ? c_.size() - d.c_.size() + 1 : 0);
        const Rational lead = d.leading();
        for (int k = static_cast<int>(r.size()) - 1; k >= d.degree(); --k) {
            const Rational f = r[static_cast<std::size_t>(k)] / lead;
            if (f == 0) continue;
            const std::size_t shift = static_cast<std::size_t>(k - d.degree());
            q[shift] = f;
            for (std::size_t j = 0; j < d.c_.size(); ++j) r[shift + j] -= f * d.c_[j];
        }
        return {RationalPoly(std::move(q)), RationalPoly(std::move(r))};
    }

    std::string to_string(const std::string& var = "x") const {
        if (c_.empty()) return "0";
        std::string out;
        for (int k = degree(); k >= 0; --k) {
            const Rational& a = c_[static_cast<std::size_t>(k)];
            if (a == 0) continue;
            const bool neg = a < 0;
            const Rational mag = neg ? Rational(-a) : a;
            if (out.empty())
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            const bool unit = (mag == 1) && k > 0;
            if (!unit) out += gabor::to_string(mag);
            if (k > 0) out += (unit ? "" : "*") + var + (k > 1 ? "^" + std::to_string(k) : "");
        }
        return out;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Rational> c_;
};

inline nlohmann::json poly_json(const RationalPoly& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : p.coeffs()) arr.push_back(rational_json(c));
    return arr;
}

// ---------------------------------------------------------------- sign counting

inline int sign_of(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

/// Sign changes in the sequence with zero entries dropped.
inline int sign_changes(const std::vector<Rational>& seq) {
    int count = 0, last = 0;
    for (const auto& v : seq) {
        const int s = sign_of(v);
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

enum class CertKind { BudanFourier, Sturm };

struct Certificate {
    CertKind kind = CertKind::BudanFourier;
    Rational a, b;
    std::vector<Rational> left_seq, right_seq;
    int v_left = 0;
    int v_right = 0;
    int zero_count_bound = 0;          // BF: upper bound (same parity); Sturm: exact
    std::vector<RationalPoly> chain;   // f, f', ... or the Sturm chain
};

/// Derivative sequences at both ends; bounds the zeros in (a, b].
inline Certificate budan_fourier(const RationalPoly& f, const Rational& a, const Rational& b) {
    if (!(a < b)) throw Error(Errc::Validation, "interval must satisfy a < b");
    Certificate c;
    c.kind = CertKind::BudanFourier;
    c.a = a;
    c.b = b;
    RationalPoly p = f;
    const int n = std::max(0, f.degree());
    for (int k = 0; k <= n; ++k) {
        c.chain.push_back(p);
        c.left_seq.push_back(p(a));
        c.right_seq.push_back(p(b));
        p = p.derivative();
    }
    c.v_left = sign_changes(c.left_seq);
    c.v_right = sign_changes(c.right_seq);
    c.zero_count_bound = c.v_left - c.v_right;
    return c;
}

/// Sturm chain f_0 = f, f_1 = f', f_{j+1} = -rem(f_{j-1}, f_j); exact count
/// of distinct zeros in [a, b].
inline Certificate sturm(const RationalPoly& f, const Rational& a, const Rational& b) {
    if (!(a < b)) throw Error(Errc::Validation, "interval must satisfy a < b");
    if (f.is_zero() || f(a) * f(b) == 0)
        throw Error(Errc::EndpointZero, "Sturm method not possible: f(a) f(b) = 0");
    Certificate c;
    c.kind = CertKind::Sturm;
    c.a = a;
    c.b = b;
    c.chain.push_back(f);
    RationalPoly prev = f, cur = f.derivative();
    while (!cur.is_zero()) {
        c.chain.push_back(cur);
        if (cur.degree() == 0) break;
        RationalPoly next = -prev.divmod(cur).second;
        prev = std::move(cur);
        cur = std::move(next);
    }
    for (const auto& p : c.chain) {
        c.left_seq.push_back(p(a));
        c.right_seq.push_back(p(b));
    }
    c.v_left = sign_changes(c.left_seq);
    c.v_right = sign_changes(c.right_seq);
    c.zero_count_bound = c.v_left - c.v_right;
    return c;
}

inline nlohmann::json certificate_json(const Certificate& c, const std::string& var = "x") {
    nlohmann::json left = nlohmann::json::array(), right = nlohmann::json::array(),
                   chain = nlohmann::json::array(), chain_text = nlohmann::json::array();
    for (const auto& v : c.left_seq) left.push_back(rational_json(v));
    for (const auto& v : c.right_seq) right.push_back(rational_json(v));
    for (const auto& p : c.chain) {
        chain.push_back(poly_json(p));
        chain_text.push_back(p.to_string(var));
    }
    return {{"kind", c.kind == CertKind::Sturm ? "sturm" : "budan_fourier"},
            {"interval", {{"a", rational_json(c.a)}, {"b", rational_json(c.b)}}},
            {"left_seq", left},
            {"right_seq", right},
            {"v_left", c.v_left},
            {"v_right", c.v_right},
            {"zero_count_bound", c.zero_count_bound},
            {"chain", chain},
            {"chain_text", chain_text}};
}

/// Plain-text layout: VFB/V_F lines for Budan-Fourier, VS/V_S lines for Sturm.
inline std::string certificate_text(const Certificate& c) {
    const bool st = c.kind == CertKind::Sturm;
    auto seq = [](const std::vector<Rational>& s) {
        std::string out = "[";
        for (std::size_t k = 0; k < s.size(); ++k) out += (k ? " " : "") + to_string(s[k]);
        return out + "]";
    };
    std::ostringstream os;
    os << (st ? "VS(a):" : "VFB(a):") << seq(c.left_seq) << '\n';
    os << (st ? "VS(b):" : "VFB(b):") << seq(c.right_seq) << '\n';
    os << (st ? "V_S(a): " : "V_F(a): ") << c.v_left << '\n';
    os << (st ? "V_S(b): " : "V_F(b): ") << c.v_right << '\n';
    os << (st ? "N[a,b] = " : "N(a,b] <= ") << c.zero_count_bound << '\n';
    return os.str();
}

// ---------------------------------------------------------------- trig reduction

/// p with sum_k c_k cos(k y) = p(cos y), via Chebyshev T_k.
inline RationalPoly trig_reduce(const std::vector<Rational>& cos_series) {
    RationalPoly acc;
    RationalPoly t_prev({Rational(1)}), t_cur({Rational(0), Rational(1)});
    const RationalPoly two_u({Rational(0), Rational(2)});
    for (std::size_t k = 0; k < cos_series.size(); ++k) {
        const RationalPoly& tk = (k == 0) ? t_prev : t_cur;
        acc = acc + cos_series[k] * tk;
        if (k >= 1) {
            RationalPoly t_next = two_u * t_cur - t_prev;
            t_prev = std::move(t_cur);
            t_cur = std::move(t_next);
        }
    }
    return acc;
}

/// q with sum_k s_k sin(k y) = q(cos y) sin y, via U_{k-1}; s_0 is ignored.
inline RationalPoly trig_reduce_sin(const std::vector<Rational>& sin_series) {
    RationalPoly acc;
    RationalPoly u_prev({Rational(0)}), u_cur({Rational(1)});  // U_{-1}, U_0
    const RationalPoly two_u({Rational(0), Rational(2)});
    for (std::size_t k = 1; k < sin_series.size(); ++k) {
        acc = acc + sin_series[k] * u_cur;
        RationalPoly u_next = two_u * u_cur - u_prev;
        u_prev = std::move(u_cur);
        u_cur = std::move(u_next);
    }
    return acc;
}

// ---------------------------------------------------------------- B-spline case analysis

enum class CaseId { Case2, Case3 };

/// Sine-series coefficients (index k for sin k y) as polynomials in beta.
inline std::vector<RationalPoly> case_coefficients(CaseId id) {
    using P = RationalPoly;
    if (id == CaseId::Case2)
        return {P{},
                P::from_descending({36, -114, 156, -102, 27}),
                P::from_descending({24, -56, 48, -16, 0}),
                P::from_descending({12, -40, 54, -35, 9})};
    return {P{},
            P::from_descending({36, -74, 6, 83, -48}),
            P::from_descending({72, -272, 456, -400, 144}),
            P::from_descending({48, -166, 216, -116, 9}),
            P::from_descending({24, -108, 204, -192, 72}),
            P::from_descending({8, -30, 37, -15})};
}

inline std::pair<Rational, Rational> case_range(CaseId id) {
    return id == CaseId::Case2 ? std::pair<Rational, Rational>{Rational(1), Rational(3, 2)}
                               : std::pair<Rational, Rational>{Rational(3, 2), Rational(2)};
}

/// P_beta (Case2) or K_beta (Case3) as a polynomial in u = cos y.
/// beta must lie in the closed case interval; the endpoints are where the
/// tables are evaluated.
inline RationalPoly case_polys(CaseId id, const Rational& beta) {
    const auto [lo, hi] = case_range(id);
    if (beta < lo || beta > hi)
        throw Error(Errc::OutOfRange, "beta = " + to_string(beta) + " outside [" + to_string(lo) + ", " +
                                          to_string(hi) + "]");
    std::vector<Rational> s;
    for (const auto& p : case_coefficients(id)) s.push_back(p(beta));
    return trig_reduce_sin(s);
}

/// Coefficients in u of the case polynomial, each a polynomial in beta.
inline std::vector<RationalPoly> case_poly_in_beta(CaseId id) {
    const auto coeffs = case_coefficients(id);
    // Same U_{k-1} expansion as trig_reduce_sin, carried with beta-polynomial coefficients.
    std::vector<std::vector<Rational>> u_polys = {{Rational(1)}, {Rational(0), Rational(2)}};
    while (u_polys.size() + 1 < coeffs.size()) {
        const auto& a = u_polys[u_polys.size() - 1];
        const auto& b = u_polys[u_polys.size() - 2];
        std::vector<Rational> next(a.size() + 1);
        for (std::size_t i = 0; i < a.size(); ++i) next[i + 1] += 2 * a[i];
        for (std::size_t i = 0; i < b.size(); ++i) next[i] -= b[i];
        u_polys.push_back(next);
    }
    std::vector<RationalPoly> out;
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
        const auto& up = u_polys[k - 1];
        if (out.size() < up.size()) out.resize(up.size());
        for (std::size_t i = 0; i < up.size(); ++i) out[i] = out[i] + up[i] * coeffs[k];
    }
    return out;
}

/// d^j/du^j of the case polynomial at u0, as a polynomial in beta.
inline RationalPoly endpoint_in_beta(CaseId id, int j, const Rational& u0) {
    const auto cu = case_poly_in_beta(id);
    RationalPoly acc;
    for (std::size_t k = static_cast<std::size_t>(j); k < cu.size(); ++k) {
        Rational f = 1;
        for (std::size_t t = k - static_cast<std::size_t>(j) + 1; t <= k; ++t) f *= Rational(static_cast<long long>(t));
        Rational pw = 1;
        for (std::size_t t = 0; t < k - static_cast<std::size_t>(j); ++t) pw *= u0;
        acc = acc + (f * pw) * cu[k];
    }
    return acc;
}

struct TableRow {
    std::string table;     // "1" or "2"
    std::string name;      // q0..q4, p0..p5
    std::string relation;  // e.g. "P'(1) = 24(beta-1) q1(beta)"
    RationalPoly poly;     // q_i or p_i in beta
    Certificate bf;        // Budan-Fourier on (a, b]
    bool determined = true;
    std::string sign;      // ">0", ">=0" or "not able to determine"
    std::optional<Certificate> resolution;  // Sturm on [a, b] when BF is inconclusive
};

namespace detail {

inline RationalPoly exact_quotient(const RationalPoly& num, const RationalPoly& den) {
    auto [q, r] = num.divmod(den);
    if (!r.is_zero()) throw Error(Errc::Validation, "endpoint polynomial does not factor as tabulated");
    return q;
}

} // namespace detail

/// Rows of the endpoint sign tables for P_beta and K_beta.
inline std::vector<TableRow> reproduce_tables() {
    using P = RationalPoly;
    const P one = P{Rational(1)};
    const P beta_m1 = P::from_descending({1, -1});
    const P two_m_beta = P::from_descending({-1, 2});
    const P two_beta_m3 = P::from_descending({2, -3});

    struct Spec {
        const char* table;
        const char* name;
        const char* relation;
        CaseId id;
        int deriv;
        int end;
        P factor;
        bool strict;
    };
    const std::vector<Spec> specs = {
        {"1", "q0", "P(1) = q0(beta)", CaseId::Case2, 0, 1, one, true},
        {"1", "q1", "P'(1) = 24(beta-1) q1(beta)", CaseId::Case2, 1, 1, Rational(24) * beta_m1, false},
        {"1", "q2", "P''(1) = 8(beta-1) q2(beta)", CaseId::Case2, 2, 1, Rational(8) * beta_m1, false},
        {"1", "q3", "P(-1) = (2-beta) q3(beta)", CaseId::Case2, 0, -1, two_m_beta, true},
        {"1", "q4", "P'(-1) = 8(beta-1) q4(beta)", CaseId::Case2, 1, -1, Rational(8) * beta_m1, false},
        {"2", "p0", "K(1) = 4 p0(beta)", CaseId::Case3, 0, 1, Rational(4) * one, true},
        {"2", "p1", "K'(1) = 8 p1(beta)", CaseId::Case3, 1, 1, Rational(8) * one, true},
        {"2", "p2", "K''(1) = 8 p2(beta)", CaseId::Case3, 2, 1, Rational(8) * one, true},
        {"2", "p3", "K'''(1) = 192(beta-1)(2beta-3) p3(beta)", CaseId::Case3, 3, 1,
         Rational(192) * beta_m1 * two_beta_m3, false},
        {"2", "p4", "K'(-1) = 8(2-beta) p4(beta)", CaseId::Case3, 1, -1, Rational(8) * two_m_beta, false},
        {"2", "p5", "K''(-1) = 8(2-beta) p5(beta)", CaseId::Case3, 2, -1, Rational(8) * two_m_beta, false},
    };

    std::vector<TableRow> rows;
    for (const auto& s : specs) {
        TableRow row;
        row.table = s.table;
        row.name = s.name;
        row.relation = s.relation;
        row.poly = detail::exact_quotient(endpoint_in_beta(s.id, s.deriv, Rational(s.end)), s.factor);
        const auto [a, b] = case_range(s.id);
        row.bf = budan_fourier(row.poly, a, b);
        if (row.bf.zero_count_bound == 0) {
            row.determined = true;
            row.sign = (s.strict && row.poly(b) > 0) ? ">0" : (row.poly(b) > 0 ? ">=0" : "<0");
        } else {
            row.determined = false;
            row.sign = "not able to determine";
            row.resolution = sturm(row.poly, a, b);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline nlohmann::json tables_json(const std::vector<TableRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j = {{"table", r.table},
                            {"name", r.name},
                            {"relation", r.relation},
                            {"poly", r.poly.to_string("beta")},
                            {"budan_fourier", certificate_json(r.bf, "beta")},
                            {"determined", r.determined},
                            {"sign", r.sign}};
        if (r.resolution) j["sturm"] = certificate_json(*r.resolution, "beta");
        out.push_back(j);
    }
    return out;
}

inline std::string tables_text(const std::vector<TableRow>& rows) {
    std::ostringstream os;
    std::string current;
    auto fmt = [](const Rational& r) {
        // Tabulated values are printed as decimals when they terminate.
        BigInt d = denominator(r);
        int twos = 0, fives = 0;
        while (d % 2 == 0) d /= 2, ++twos;
        while (d % 5 == 0) d /= 5, ++fives;
        if (d != 1) return to_string(r);
        const int places = std::max(twos, fives);
        BigInt scale = 1;
        for (int k = 0; k < places; ++k) scale *= 10;
        const BigInt scaled = numerator(r) * scale / denominator(r);
        const bool neg = scaled < 0;
        std::string digits = (neg ? BigInt(-scaled) : scaled).str();
        if (places > 0) {
            while (digits.size() <= static_cast<std::size_t>(places)) digits.insert(0, "0");
            digits.insert(digits.size() - places, ".");
        }
        return (neg ? "-" : "") + digits;
    };
    for (const auto& r : rows) {
        if (r.table != current) {
            current = r.table;
            const auto [a, b] = r.table == "1" ? case_range(CaseId::Case2) : case_range(CaseId::Case3);
            os << "Table " << r.table << "  (beta = " << fmt(a) << " | beta = " << fmt(b) << ")\n";
        }
        os << "  " << r.relation << "\n";
        for (std::size_t k = 0; k < r.bf.left_seq.size(); ++k)
            os << "    " << r.name << std::string(k, '\'') << ": " << fmt(r.bf.left_seq[k]) << " | "
               << fmt(r.bf.right_seq[k]) << "\n";
        os << "    N = " << r.bf.zero_count_bound << ", sign " << r.sign << "\n";
        if (r.resolution)
            os << "    Sturm on [" << fmt(r.resolution->a) << ", " << fmt(r.resolution->b)
               << "]: N = " << r.resolution->zero_count_bound << "\n";
    }
    return os.str();
}

/// Closed form of M_{Q_2, 1/beta} for 0 < beta < 2, evaluated in extended precision.
inline double mq2_closed_form(double beta) {
    if (!(beta > 0.0 && beta < 2.0)) throw Error(Errc::OutOfRange, "closed form needs 0 < beta < 2");
    using L = long double;
    const L r = L(1) / L(beta);
    auto q2 = [](L x) { return bspline_eval<L>(2, x); };
    auto q4 = [](L x) { return bspline_eval<L>(4, x); };
    const L num = 1 - 2 * q2(r) + q2(1 - r) - q2(1 - 2 * r) + q2(1 - 3 * r);
    const L den = L(1) / 3 - q4(r) + q4(2 * r) - q4(3 * r);
    const L pi_l = std::numbers::pi_v<long double>;
    return static_cast<double>(num / den / (4 * pi_l * pi_l));
}

} // namespace gabor
