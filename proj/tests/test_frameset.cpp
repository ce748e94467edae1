#include <cmath>
#include <cstdlib>

#include "catch_amalgamated.hpp"

#include "gabor/certify.hpp"
#include "gabor/frameset.hpp"
#include "gabor/io.hpp"

using namespace gabor;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ScanOptions small_scan(int res) {
    ScanOptions o;
    o.alpha_res = res;
    o.beta_res = res;
    o.lattice.grid_size = 512;
    return o;
}

bool is_frame(Verdict v) { return v == Verdict::FramePrimal || v == Verdict::FrameDual; }

} // namespace

TEST_CASE("painless region is strict", "[frameset]") {
    CHECK(painless_region(1.0, 1.5, 0.4));
    CHECK_FALSE(painless_region(1.0, 1.5, 0.6));
    CHECK_FALSE(painless_region(1.0, 1.5, 0.5));
    CHECK_FALSE(painless_region(1.0, 2.0, 0.1));
}

TEST_CASE("cited overlays", "[frameset]") {
    const auto ofsb = parse_overlay("ofsb_q2");
    CHECK(cited_overlay(ofsb, 0.25, 1.5));
    CHECK_FALSE(cited_overlay(ofsb, 0.3, 1.5));
    const auto sign = parse_overlay("sign_region_q2");
    CHECK(sign.m == 2);
    CHECK(cited_overlay(sign, 1.2, 0.7));
    CHECK(sign.name() == "sign_region_q2");
    CHECK_THROWS_AS(parse_overlay("sign_region_qx"), Error);
    CHECK_THROWS_AS(parse_overlay("other"), Error);
}

TEST_CASE("frame bounds", "[frameset]") {
    const auto fb = frame_bounds(gaussian(), 0.25, 1.0);
    CHECK(fb.delta < 1.0);
    CHECK(fb.A > 0.0);
    CHECK(fb.B > 0.0);
    CHECK(fb.esssup >= fb.essinf);
    // Printed pairing: A with esssup, B with essinf.
    CHECK_THAT(fb.A, WithinRel(std::pow(1 - fb.delta, 2) * fb.esssup / 0.25, 1e-14));
    CHECK_THAT(fb.B, WithinRel(std::pow(1 + fb.delta, 2) * fb.essinf / 0.25, 1e-14));
    CHECK_THAT(fb.A_swapped, WithinRel(std::pow(1 - fb.delta, 2) * fb.essinf / 0.25, 1e-14));
    try {
        frame_bounds(gaussian(), 1.5, 1.0);
        FAIL("no exception");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ConditionNotMet);
    }
}

TEST_CASE("Hermite deltas are symmetric", "[frameset]") {
    const auto [p, d] = hermite_delta(1, 0.6, 0.9);
    const auto [p2, d2] = hermite_delta(1, 0.9, 0.6);
    CHECK(p == d2);
    CHECK(d == p2);
    const auto [g, gd] = hermite_delta(0, 0.5, 0.7);
    CHECK_THAT(g, WithinRel(2 * 0.5 * std::sqrt(m_value(gaussian(), 1 / 0.7)), 1e-12));
    CHECK_THROWS_AS(hermite_delta(9, 0.5, 0.5), Error);
}

TEST_CASE("Q2 scan verdict pattern", "[frameset]") {
    auto o = small_scan(20);
    const auto g = scan(bspline(2), o);
    REQUIRE(g.cells.size() == 400);
    for (const auto& c : g.cells) {
        if (c.alpha * c.beta >= 1.0) {
            CHECK(c.verdict == Verdict::Excluded);
            CHECK(c.note == "density theorem");
        }
        if (is_frame(c.verdict)) {
            CHECK(c.alpha * c.beta < 1.0);
            CHECK(std::min(c.delta_primal, c.delta_dual) < 1.0);
        }
    }
    // beta = 2 is the last column.
    for (std::size_t i = 0; i < g.alpha_axis.size(); ++i) {
        CHECK(g.at(i, g.beta_axis.size() - 1).verdict == Verdict::Excluded);
    }
    // Column M agrees with the closed form.
    for (std::size_t j = 0; j + 1 < g.beta_axis.size(); ++j) {
        const double beta = g.beta_axis[j];
        if (std::abs(beta - 1.0) < 1e-3 || std::abs(beta - 1.5) < 1e-3) continue;
        CHECK_THAT(g.primal_columns[j].m, WithinRel(mq2_closed_form(beta), 1e-8));
    }
}

TEST_CASE("primal band for Q2 at beta = 0.4", "[frameset]") {
    ScanOptions o = small_scan(50);
    const auto g = scan(bspline(2), o);
    const std::size_t j = 9;  // beta = 0.4
    REQUIRE_THAT(g.beta_axis[j], WithinAbs(0.4, 1e-15));
    const double edge = pi / std::sqrt(3.0);
    for (std::size_t i = 0; i < g.alpha_axis.size(); ++i) {
        const auto& c = g.at(i, j);
        if (c.alpha < edge - 1e-9) CHECK(c.verdict == Verdict::FramePrimal);
        if (c.alpha > edge + 1e-9) CHECK(c.verdict != Verdict::FramePrimal);
    }
}

TEST_CASE("Gaussian scan is self-dual", "[frameset]") {
    const auto g = scan(gaussian(), small_scan(10));
    for (std::size_t i = 0; i < g.alpha_axis.size(); ++i)
        for (std::size_t j = 0; j < g.beta_axis.size(); ++j) {
            const auto& c = g.at(i, j);
            const auto& t = g.at(j, i);
            CHECK_THAT(c.delta_dual, WithinRel(t.delta_primal, 1e-12));
        }
    CHECK(g.at(1, 1).verdict == Verdict::FramePrimal);  // (0.4, 0.4)
    CHECK(g.at(4, 4).verdict == Verdict::Excluded);     // (1, 1)
}

TEST_CASE("scan is deterministic across thread counts", "[frameset]") {
    auto o = small_scan(24);
    o.threads = 1;
    const auto a = region_csv(scan(bspline(3), o));
    o.threads = 3;
    const auto b = region_csv(scan(bspline(3), o));
    CHECK(a == b);
}

TEST_CASE("delta is increasing in alpha", "[frameset]") {
    const auto g = scan(bspline(3), small_scan(16));
    for (std::size_t j = 0; j < g.beta_axis.size(); ++j)
        for (std::size_t i = 1; i < g.alpha_axis.size(); ++i) {
            const double a = g.at(i - 1, j).delta_primal, b = g.at(i, j).delta_primal;
            if (std::isfinite(a) && std::isfinite(b)) CHECK(b > a);
        }
}

TEST_CASE("windows without a time-domain form leave the dual side unknown", "[frameset]") {
    const auto g = scan(type1({0.5}), small_scan(6));
    for (const auto& c : g.cells) CHECK(c.verdict != Verdict::FrameDual);
    CHECK_FALSE(g.dual_columns.front().available);
}

TEST_CASE("gamma search", "[frameset]") {
    const auto r = gamma_search(gaussian(), 0.9, 1.0, Direction::ToZero);
    CHECK(r.found);
    CHECK(r.delta < 1.0);
    const auto e = gamma_search(two_sided_exp(), 0.9, 1.0, Direction::ToInfinity);
    CHECK(e.found);
    // Dilating the two-pole window outward only raises its primal delta.
    const auto none = gamma_search(two_pole(1.0, 2.0), 0.95, 1.0, Direction::ToInfinity, 3);
    CHECK_FALSE(none.found);
    CHECK(none.trace.size() == 4);
}

TEST_CASE("thread count honours the environment", "[frameset]") {
    CHECK(thread_count(3) == 3);
    ::setenv("GABOR_THREADS", "2", 1);
    CHECK(thread_count(0) == 2);
    ::unsetenv("GABOR_THREADS");
    CHECK(thread_count(0) == 1);
}
