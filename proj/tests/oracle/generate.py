#!/usr/bin/env python3
"""Reference values for the C++ tests, computed independently with mpmath/sympy.

Writes tests/oracle_values.hpp. Rerun after changing any definition here:

    python3 tests/oracle/generate.py
"""

import os
import sys

import mpmath as mp
import sympy as sp

mp.mp.dps = 30
PI = mp.pi

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "oracle_values.hpp")


def golden_max(f, lo, hi, grid=200, iters=100):
    """Grid scan then golden-section refinement; returns (max, argmax)."""
    xs = [lo + (hi - lo) * mp.mpf(j) / grid for j in range(grid + 1)]
    vals = [f(x) for x in xs]
    j = max(range(len(xs)), key=lambda i: vals[i])
    a = xs[max(j - 1, 0)]
    b = xs[min(j + 1, grid)]
    r = (mp.sqrt(5) - 1) / 2
    x1, x2 = b - r * (b - a), a + r * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - r * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + r * (b - a)
            f2 = f(x2)
    best = max(vals[j], f1, f2)
    arg = xs[j] if best == vals[j] else (x1 if f1 >= f2 else x2)
    return best, arg


# ------------------------------------------------------------ B-spline M values
#
# |Q_m^(xi)|^2 = (sin(pi xi) / (pi xi))^(2m). For 1/h = beta = p/q, split the
# lattice w + l p/q by l mod q; within a class sin^2 is constant and the
# remaining sum over k is a pair of Hurwitz zeta values.

def zpair(s, y):
    y = y - mp.floor(y)
    return mp.zeta(s, y) + mp.zeta(s, 1 - y)


def bspline_B(m, p, q, w):
    num = mp.mpf(0)
    den = mp.mpf(0)
    for r in range(q):
        x = w + mp.mpf(r) * p / q
        s = mp.sin(PI * x) ** (2 * m)
        den += s * mp.mpf(p) ** (-2 * m) * zpair(2 * m, x / p)
        num += s * mp.mpf(p) ** (-(2 * m - 2)) * zpair(2 * m - 2, x / p)
    return num / den


def bspline_M(m, p, q):
    beta = mp.mpf(p) / q
    eps = beta * mp.mpf(10) ** -12
    # B is even and beta-periodic in w.
    return golden_max(lambda w: bspline_B(m, p, q, w), eps, beta / 2)[0]


def bspline_M_commensurate(m, P):
    """1/h = P integer: common sin factor cancels."""
    f = lambda x: mp.mpf(P) ** 2 * zpair(2 * m - 2, x) / zpair(2 * m, x)
    return golden_max(f, mp.mpf(10) ** -12, mp.mpf(1) / 2)[0]


def hat(x):
    x = abs(x)
    return 1 - x if x < 1 else mp.mpf(0)


def cubic(x):
    # Centered cubic B-spline on [-2, 2].
    x = abs(x)
    if x < 1:
        return mp.mpf(2) / 3 - x ** 2 + x ** 3 / 2
    if x < 2:
        return (2 - x) ** 3 / 6
    return mp.mpf(0)


def mq2_closed(beta):
    r = 1 / mp.mpf(beta)
    num = 1 - 2 * hat(r) + hat(1 - r) - hat(1 - 2 * r) + hat(1 - 3 * r)
    den = mp.mpf(1) / 3 - cubic(r) + cubic(2 * r) - cubic(3 * r)
    return num / den / (4 * PI ** 2)


# ------------------------------------------------------------ rapidly decaying windows

def direct_B(abs2, P, w, terms):
    num = mp.mpf(0)
    den = mp.mpf(0)
    for l in range(-terms, terms + 1):
        xi = w + l * P
        a = abs2(xi)
        den += a
        num += xi ** 2 * a
    return num / den


def gauss_M(P, gamma):
    abs2 = lambda xi: mp.exp(-2 * PI * (xi / gamma) ** 2) / gamma
    return golden_max(lambda w: direct_B(abs2, P, w, 60), mp.mpf(0), mp.mpf(P) / 2)[0]


def exp_M(P):
    # e^{-|x|} has transform 2 / (1 + 4 pi^2 xi^2).
    def B(w):
        den = mp.nsum(lambda l: 4 / (1 + 4 * PI ** 2 * (w + l * P) ** 2) ** 2, [-mp.inf, mp.inf])
        num = mp.nsum(lambda l: 4 * (w + l * P) ** 2 / (1 + 4 * PI ** 2 * (w + l * P) ** 2) ** 2,
                      [-mp.inf, mp.inf])
        return num / den
    return golden_max(B, mp.mpf(0), mp.mpf(P) / 2, grid=40, iters=80)[0]


# ------------------------------------------------------------ theta ratio

def theta_Q(w, t):
    q = mp.exp(-PI * t)
    d = PI * mp.jtheta(3, PI * w, q, 1)
    return -d / mp.sin(2 * PI * w)


# ------------------------------------------------------------ exponential double sums

def exp_I1(w, rho, L=400):
    q = mp.exp(-2 * rho)
    geo0 = 1 / (1 - q)       # sum_{n >= 0} q^n
    geo1 = q / (1 - q)       # sum_{n >= 1} q^n
    s = mp.mpf(0)
    for l in range(0, L + 1):
        s += (w + l) * mp.exp(-2 * rho * (2 * w + l)) * geo0
    for l in range(1, L + 1):
        s += (w - l) * mp.exp(-2 * rho * (-2 * w + l)) * geo1
    return s


def exp_I2(w, rho, L=400):
    q = mp.exp(-2 * rho)
    geo0 = 1 / (1 - q)
    geo1 = q / (1 - q)
    s = mp.mpf(0)
    for l in range(1, L + 1):
        s += (w - l + 2 * rho * (w - l) ** 2) * mp.exp(-2 * rho * l) * geo0
    for l in range(0, L + 1):
        s += (w + l - 2 * rho * (w + l) ** 2) * mp.exp(-2 * rho * l) * geo1
    return s


# ------------------------------------------------------------ two-pole ratio

def twopole_G(c, d, w):
    t = lambda x: c ** 2 * d ** 2 / ((c ** 2 + 4 * PI ** 2 * x ** 2) * (d ** 2 + 4 * PI ** 2 * x ** 2))
    f = mp.nsum(lambda n: t(w + n), [-mp.inf, mp.inf])
    h = mp.nsum(lambda n: (w + n) ** 2 * t(w + n), [-mp.inf, mp.inf])
    return h / f


# ------------------------------------------------------------ exact spline norms

def bspline_norms(m):
    """Exact integrals of Q_m^2 and (Q_m')^2 from the truncated-power form."""
    x = sp.symbols("x", real=True)
    half = sp.Rational(m, 2)
    n0 = sp.Integer(0)
    n1 = sp.Integer(0)
    for j in range(m):
        lo, hi = j - half, j + 1 - half
        # On [lo, hi] exactly the powers with k <= j are active.
        f = sum((-1) ** k * sp.binomial(m, k) * (x + half - k) ** (m - 1) for k in range(j + 1))
        f = sp.expand(f / sp.factorial(m - 1))
        n0 += sp.integrate(f ** 2, (x, lo, hi))
        n1 += sp.integrate(sp.diff(f, x) ** 2, (x, lo, hi))
    return sp.nsimplify(n0), sp.nsimplify(n1)


# ------------------------------------------------------------ output

def lit(v):
    return mp.nstr(mp.mpf(v), 17, min_fixed=-5, max_fixed=5) if not isinstance(v, str) else v


def main():
    lines = []
    emit = lines.append

    emit("// Generated by tests/oracle/generate.py (mpmath/sympy); do not edit by hand.")
    emit("#pragma once")
    emit("")
    emit("#include <array>")
    emit("")
    emit("namespace oracle {")
    emit("")

    emit("struct MCase { int order; double beta; double m; };")
    cases = []
    for (m, p, q) in [(2, 1, 10), (2, 3, 10), (2, 1, 2), (2, 4, 5), (2, 6, 5), (2, 7, 5), (2, 17, 10),
                      (2, 19, 10), (3, 1, 2), (3, 3, 2), (4, 4, 5)]:
        val = bspline_M(m, p, q)
        if m == 2:
            closed = mq2_closed(mp.mpf(p) / q)
            if abs(closed - val) > mp.mpf(10) ** -25 * val:
                sys.exit(f"closed form disagrees at beta={p}/{q}: {closed} vs {val}")
        cases.append((m, f"{p}.0 / {q}.0", val))
    emit(f"inline constexpr std::array<MCase, {len(cases)}> bspline_m{{{{")
    for m, b, v in cases:
        emit(f"    {{{m}, {b}, {lit(v)}}},")
    emit("}};")
    emit("")

    emit("// 1/h integer: B-splines whose periodization vanishes somewhere.")
    emit("struct CommensurateCase { int order; double h; double m; };")
    comm = []
    for m in (2, 3, 4):
        for P in (1, 2):
            comm.append((m, f"1.0 / {P}.0", bspline_M_commensurate(m, P)))
    emit(f"inline constexpr std::array<CommensurateCase, {len(comm)}> bspline_commensurate{{{{")
    for m, h, v in comm:
        emit(f"    {{{m}, {h}, {lit(v)}}},")
    emit("}};")
    emit("")

    emit("struct GaussCase { double h; double gamma; double m; };")
    gc = [("1.0", 1, gauss_M(1, 1)), ("2.0", 1, gauss_M(mp.mpf(1) / 2, 1)),
          ("2.0 / 3.0", 1, gauss_M(mp.mpf(3) / 2, 1)), ("1.0", "0.5", gauss_M(1, mp.mpf(1) / 2))]
    emit(f"inline constexpr std::array<GaussCase, {len(gc)}> gauss_m{{{{")
    for h, g, v in gc:
        emit(f"    {{{h}, {g}, {lit(v)}}},")
    emit("}};")
    emit("")

    emit(f"inline constexpr double exp_m_h1 = {lit(exp_M(1))};")
    emit(f"inline constexpr double exp_m_h2 = {lit(exp_M(mp.mpf(1) / 2))};")
    emit("")

    emit("struct ThetaCase { double w; double t; double q; };")
    tc = []
    for w, t in [("0.25", "1.0"), ("0.1", "0.1"), ("0.37", "0.5"), ("0.05", "2.0"), ("0.49", "5.0"), ("0.3", "0.02"),
                 ("0.5000001", "0.05"), ("0.2", "0.005"), ("0.75", "0.3"), ("0.001", "0.05"), ("0.52", "0.9")]:
        tc.append((w, t, theta_Q(mp.mpf(w), mp.mpf(t))))
    emit(f"inline constexpr std::array<ThetaCase, {len(tc)}> theta_q{{{{")
    for w, t, v in tc:
        emit(f"    {{{w}, {t}, {lit(v)}}},")
    emit("}};")
    emit("")

    emit("struct ExpCase { double w; double rho; double i1; double i2; };")
    ec = []
    for w, rho in [("0.3", "1.0"), ("0.1", "0.74"), ("0.45", "2.0"), ("0.2", "0.3")]:
        ec.append((w, rho, exp_I1(mp.mpf(w), mp.mpf(rho)), exp_I2(mp.mpf(w), mp.mpf(rho))))
    emit(f"inline constexpr std::array<ExpCase, {len(ec)}> exp_i{{{{")
    for w, rho, a, b in ec:
        emit(f"    {{{w}, {rho}, {lit(a)}, {lit(b)}}},")
    emit("}};")
    emit("")

    emit("struct TwoPoleCase { double c; double d; double w; double g; };")
    tp = []
    for c, d, w in [("1.0", "2.0", "0.25"), ("0.5", "1.0 / 6.0", "0.3"), ("2.0", "2.0", "0.5"), ("3.0", "0.7", "0.1")]:
        cv = mp.mpf(eval(c))
        dv = mp.mpf(1) / 6 if d == "1.0 / 6.0" else mp.mpf(d)
        tp.append((c, d, w, twopole_G(cv, dv, mp.mpf(w))))
    emit(f"inline constexpr std::array<TwoPoleCase, {len(tp)}> twopole_g{{{{")
    for c, d, w, v in tp:
        emit(f"    {{{c}, {d}, {w}, {lit(v)}}},")
    emit("}};")
    emit("")

    emit("// Exact squared norms of Q_m and Q_m' as numerator/denominator.")
    emit("struct NormCase { int order; long n0_num, n0_den, n1_num, n1_den; };")
    nc = []
    for m in (2, 3, 4):
        n0, n1 = bspline_norms(m)
        n0, n1 = sp.Rational(n0), sp.Rational(n1)
        nc.append((m, n0.p, n0.q, n1.p, n1.q))
    emit(f"inline constexpr std::array<NormCase, {len(nc)}> bspline_norms{{{{")
    for row in nc:
        emit("    {%d, %d, %d, %d, %d}," % row)
    emit("}};")
    emit("")
    emit(f"inline constexpr double q2_bernstein_ratio = {lit(mp.sqrt(3) / (2 * PI))};")
    emit("")
    emit("} // namespace oracle")

    with open(OUT, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {os.path.normpath(OUT)}")


if __name__ == "__main__":
    main()
