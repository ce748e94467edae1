#include <cmath>

#include "catch_amalgamated.hpp"

#include "gabor/sampling.hpp"
#include "oracle_values.hpp"

using namespace gabor;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("B-spline norms are exact", "[sampling]") {
    for (const auto& c : oracle::bspline_norms) {
        const auto f = make_spline(bspline(c.order), 1.0, {1.0});
        INFO("order " << c.order);
        CHECK_THAT(std::pow(l2_norm(f), 2), WithinRel(double(c.n0_num) / c.n0_den, 1e-14));
        CHECK_THAT(std::pow(deriv_norm(f), 2), WithinRel(double(c.n1_num) / c.n1_den, 1e-14));
    }
}

TEST_CASE("Bernstein ratio of Q2 itself", "[sampling]") {
    const auto f = make_spline(bspline(2), 1.0, {1.0});
    CHECK_THAT(bernstein_ratio(f), WithinRel(oracle::q2_bernstein_ratio, 1e-14));
    CHECK(bernstein_ratio(f) <= std::sqrt(m_value(bspline(2), 1.0)));
}

TEST_CASE("norms scale and translate", "[sampling]") {
    const auto f = synth(bspline(3), 1.0, 16, 7);
    auto g = f;
    for (auto& c : g.coeffs) c *= -2.5;
    CHECK_THAT(l2_norm(g), WithinRel(2.5 * l2_norm(f), 1e-13));
    CHECK_THAT(l2_norm(translate(f, 0.37)), WithinRel(l2_norm(f), 1e-12));
}

TEST_CASE("zero function", "[sampling]") {
    const auto f = make_spline(bspline(3), 1.0, {0.0, 0.0});
    CHECK(l2_norm(f) == 0.0);
    try {
        bernstein_ratio(f);
        FAIL("no exception");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ZeroFunction);
    }
}

TEST_CASE("synth is deterministic", "[sampling]") {
    const auto a = synth(bspline(3), 1.0, 64, 42);
    const auto b = synth(bspline(3), 1.0, 64, 42);
    const auto c = synth(bspline(3), 1.0, 64, 43);
    CHECK(a.coeffs == b.coeffs);
    CHECK(a.coeffs != c.coeffs);
    for (double v : a.coeffs) {
        CHECK(v >= -1.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("quadrature handles smooth windows", "[sampling]") {
    // ||phi_gamma||^2 of the Gaussian e^{-pi x^2} is 1/sqrt 2 for every gamma.
    const auto f = make_spline(gaussian(), 1.0, {1.0});
    CHECK_THAT(std::pow(l2_norm(f), 2), WithinRel(1.0 / std::sqrt(2.0), 1e-9));
    const auto e = make_spline(two_sided_exp(), 1.0, {1.0});
    CHECK_THAT(std::pow(l2_norm(e), 2), WithinRel(1.0, 1e-9));
    CHECK_THAT(std::pow(deriv_norm(e), 2), WithinRel(1.0, 1e-9));
}

TEST_CASE("sharpness probe approaches the bound", "[sampling]") {
    const auto p = sharpness_probe(bspline(3), 1.0, 200);
    CHECK(p.ratio <= p.bound * (1.0 + 1e-8));
    CHECK(p.ratio >= 0.9 * p.bound);
}

TEST_CASE("sampling set weights", "[sampling]") {
    const auto s = make_sampling_set({0.0, 1.0, 3.0, 3.5});
    CHECK(s.weights == std::vector<double>{0.5, 1.5, 1.25, 0.25});
    CHECK(s.delta == 2.0);
    CHECK_THROWS_AS(make_sampling_set({0.0, 0.0, 1.0}), Error);
    CHECK_THROWS_AS(jittered_grid(0.0, 1.0, 0.1, 0.05, 1), Error);
}

TEST_CASE("sampling inequality on a jittered grid", "[sampling]") {
    const auto f = synth(bspline(3), 1.0, 20, 11);
    const auto [lo, hi] = sampling_window(f, 0.2);
    const auto s = jittered_grid(lo, hi, 0.2, 0.05, 99);
    const auto r = sampling_bounds_check(f, s);
    CHECK(r.lower_ok);
    CHECK(r.upper_ok);
    CHECK(r.lower <= r.weighted_sum);
    CHECK(r.weighted_sum <= r.upper);
}

TEST_CASE("sampling sum converges to the norm", "[sampling]") {
    const auto f = synth(bspline(3), 1.0, 12, 5);
    const auto [lo, hi] = sampling_window(f, 1e-3);
    const auto s = jittered_grid(lo, hi, 1e-3, 0.0, 1);
    const auto r = sampling_bounds_check(f, s);
    CHECK_THAT(r.weighted_sum, WithinRel(r.norm2, 1e-4));
}

TEST_CASE("sparse sets are rejected", "[sampling]") {
    const auto f = synth(bspline(3), 1.0, 8, 3);
    const double m = m_value(bspline(3), 1.0);
    const double gap = 0.5 / std::sqrt(m);
    const auto [lo, hi] = sampling_window(f, gap);
    const auto s = jittered_grid(lo, hi, gap, 0.0, 1);
    try {
        sampling_bounds_check(f, s, m);
        FAIL("no exception");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DensityTooLow);
    }
}

TEST_CASE("sampling set must cover the support", "[sampling]") {
    const auto f = synth(bspline(3), 1.0, 8, 3);
    const auto s = jittered_grid(0.0, 2.0, 0.1, 0.0, 1);
    CHECK_THROWS_AS(sampling_bounds_check(f, s), Error);
}

TEST_CASE("uniform shifts satisfy the normalized bound", "[sampling]") {
    const auto f = synth(bspline(4), 1.0, 16, 21);
    const double m = m_value(bspline(4), 1.0);
    const double a = 0.3;
    const auto [lo, hi] = sampling_window(f, a);
    const auto s = jittered_grid(lo, hi, a, 0.0, 1, 0.123);
    const auto r = sampling_bounds_check(f, s, m);
    const double n2 = r.norm2;
    double plain = 0.0;
    for (double x : s.points) plain += std::pow(eval(f, x), 2);
    CHECK(plain >= std::pow(1 - 2 * a * std::sqrt(m), 2) * n2 / a);
    CHECK(plain <= std::pow(1 + 2 * a * std::sqrt(m), 2) * n2 / a);
}
