#include <chrono>
#include <cmath>

#include "catch_amalgamated.hpp"

#include "gabor/certify.hpp"
#include "gabor/lattice.hpp"
#include "oracle_values.hpp"

using namespace gabor;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("B-spline M values match the Hurwitz-zeta oracle", "[lattice]") {
    for (const auto& c : oracle::bspline_m) {
        INFO("order " << c.order << " beta " << c.beta);
        CHECK_THAT(m_value(bspline(c.order), 1.0 / c.beta), WithinRel(c.m, 1e-11));
    }
}

TEST_CASE("commensurate B-splines have finite M where the periodization vanishes", "[lattice]") {
    for (const auto& c : oracle::bspline_commensurate) {
        INFO("order " << c.order << " h " << c.h);
        CHECK_THAT(m_value(bspline(c.order), c.h), WithinRel(c.m, 1e-12));
    }
    const auto st = stability_check(bspline(3), 0.5, 1024);
    CHECK_FALSE(st.stable);
}

TEST_CASE("Gaussian and exponential M values match direct sums", "[lattice]") {
    for (const auto& c : oracle::gauss_m) {
        INFO("h " << c.h << " gamma " << c.gamma);
        CHECK_THAT(m_value(dilate(gaussian(), c.gamma), c.h), WithinRel(c.m, 1e-11));
    }
    CHECK_THAT(m_value(two_sided_exp(), 1.0), WithinRel(oracle::exp_m_h1, 1e-10));
    CHECK_THAT(m_value(two_sided_exp(), 2.0), WithinRel(oracle::exp_m_h2, 1e-10));
}

TEST_CASE("closed-form sums agree with direct summation", "[lattice]") {
    // A factor on the two-pole base forces direct log-sum-exp summation; the
    // extra factor can only lower M.
    const auto closed = m_value(two_pole(1.0, 2.0), 1.3);
    const LatticeOptions coarse{.grid_size = 512};
    const auto direct = m_value(type2_two_pole(1.0, 2.0, {0.5}), 1.3, coarse);
    CHECK(std::isfinite(direct));
    CHECK(direct < closed);
    // The Gaussian is its own transform, so both sides agree.
    const auto dual = m_value(dilate(gaussian(), 0.8), 1.3, LatticeOptions{.side = Side::Dual});
    const auto primal = m_value(dilate(gaussian(), 1.25), 1.3);
    CHECK_THAT(dual, WithinRel(primal, 1e-11));
}

TEST_CASE("hopeless tails fail fast", "[lattice]") {
    // A tiny pole inflates the algebraic envelope beyond what the term cap can absorb.
    try {
        m_value(type2_two_pole(1.0, 2.0, {1e-9}), 1.3);
        FAIL("no exception");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::TailNotCertifiable);
    }
}

TEST_CASE("two-pole confluent limit is continuous", "[lattice]") {
    const double u = 0.3;
    const auto a = detail::two_pole_sums(1.0, 1.0, u);
    const auto lo = detail::two_pole_sums(1.0, 1.0 - 2e-5, u);
    const auto hi = detail::two_pole_sums(1.0, 1.0 + 2e-5, u);
    // The neighbours sit outside the confluent band; their mean is O(delta^2) away.
    CHECK_THAT(a.H / a.F, WithinRel(0.5 * (lo.H / lo.F + hi.H / hi.F), 1e-8));
}

TEST_CASE("M is invariant under the periodization symmetry", "[lattice]") {
    // B(w) = B(1/h - w): the argmax is reported in [0, 1/h].
    const auto r = m_value_detail(gaussian(), 1.0);
    CHECK(r.argmax_w >= 0.0);
    CHECK(r.argmax_w <= 1.0);
    CHECK_THAT(r.argmax_w, WithinAbs(0.5, 1e-6));
}

TEST_CASE("periodization profile is consistent", "[lattice]") {
    const auto p = periodize(bspline(3), 1.0, 256, 1e-13);
    REQUIRE(p.grid.size() == p.b_vals.size());
    for (std::size_t j = 0; j < p.grid.size(); ++j)
        CHECK_THAT(p.b_vals[j], WithinRel(p.weighted_vals[j] / p.phi_vals[j], 1e-14));
    // Phi_1 of a B-spline at w = 0 is 1 (partition of unity).
    CHECK_THAT(p.phi_vals.front(), WithinAbs(1.0, 1e-14));
}

TEST_CASE("constant regime of Q2 is reached quickly", "[lattice]") {
    const auto t0 = std::chrono::steady_clock::now();
    for (double beta : {0.1, 0.3, 0.5})
        CHECK_THAT(m_value(bspline(2), 1.0 / beta), WithinRel(3.0 / (4.0 * pi * pi), 1e-10));
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 1.0);
}

TEST_CASE("lattice errors", "[lattice]") {
    CHECK_THROWS_AS(m_value(bspline(1), 1.0), Error);
    try {
        m_value(bspline(1), 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::TailNotCertifiable);
    }
    CHECK_THROWS_AS(m_value(gaussian(), 1.0, LatticeOptions{.grid_size = 4}), Error);
    CHECK_THROWS_AS(m_value(gaussian(), -1.0), Error);
}
