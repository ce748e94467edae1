#include <algorithm>

#include "catch_amalgamated.hpp"

#include "gabor/certify.hpp"

using namespace gabor;

namespace {

Rational R(long p, long q = 1) { return Rational(p) / Rational(q); }

RationalPoly poly(std::initializer_list<long> constant_first) {
    std::vector<Rational> c;
    for (long v : constant_first) c.emplace_back(v);
    return RationalPoly(std::move(c));
}

// Highest degree first, as printed.
RationalPoly desc(std::vector<Rational> c) {
    std::reverse(c.begin(), c.end());
    return RationalPoly(std::move(c));
}

} // namespace

TEST_CASE("rational parsing is exact", "[certify]") {
    CHECK(parse_rational("7/4") == R(7, 4));
    CHECK(parse_rational("-3/6") == R(-1, 2));
    CHECK(parse_rational("1.5") == R(3, 2));
    CHECK(parse_rational("16.6875") == R(267, 16));
    CHECK(parse_rational("-2") == R(-2));
    for (const char* bad : {"", "1/0", "a/b", "1.2.3", "3/", "0.1e3"}) {
        INFO(bad);
        CHECK_THROWS_AS(parse_rational(bad), Error);
    }
}

TEST_CASE("polynomial arithmetic", "[certify]") {
    const auto p = poly({-1, 0, 1});  // x^2 - 1
    const auto q = poly({1, 1});      // x + 1
    auto [quot, rem] = p.divmod(q);
    CHECK(quot == poly({-1, 1}));
    CHECK(rem == RationalPoly{});
    CHECK(p.derivative() == poly({0, 2}));
    CHECK(p(R(3)) == R(8));
    CHECK((p * q).degree() == 3);
    CHECK((p - p) == RationalPoly{});
    CHECK(RationalPoly::from_descending({1, 0, -1}) == p);
}

TEST_CASE("Budan-Fourier bound", "[certify]") {
    // (x - 1/2)(x - 1/3) has two roots in (0, 1].
    const auto p = poly({1, -5, 6});
    const auto c = budan_fourier(p, R(0), R(1));
    CHECK(c.zero_count_bound == 2);
    CHECK(c.v_left - c.v_right == 2);
    CHECK(budan_fourier(p, R(1), R(2)).zero_count_bound == 0);
}

TEST_CASE("Sturm count is exact", "[certify]") {
    // x^2 + 1: BF on [-1, 1] gives 2, Sturm gives 0.
    const auto p = poly({1, 0, 1});
    CHECK(budan_fourier(p, R(-1), R(1)).zero_count_bound == 2);
    CHECK(sturm(p, R(-1), R(1)).zero_count_bound == 0);
    // (x - 1/2)(x + 1/2)(x - 3): two roots in [-1, 1].
    const auto q = poly({3, -1, -12, 4});
    CHECK(sturm(q, R(-1), R(1)).zero_count_bound == 2);
    CHECK(sturm(q, R(-1), R(4)).zero_count_bound == 3);
}

TEST_CASE("Sturm refuses an endpoint root", "[certify]") {
    try {
        sturm(poly({-1, 1}), R(1), R(2));
        FAIL("no exception");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EndpointZero);
        CHECK(is_certification_failure(e.code()));
    }
}

TEST_CASE("Sturm chain uses negated remainders", "[certify]") {
    const auto p = RationalPoly::from_descending({-30, 152, -254, 141});
    const auto c = sturm(p, R(3, 2), R(2));
    REQUIRE(c.chain.size() == 4);
    CHECK(c.chain[2] == desc({R(-244, 135), R(269, 135)}));
    CHECK(c.chain[3] == desc({R(840645, 29768)}));
    CHECK(c.left_seq == std::vector<Rational>{R(3, 4), R(-1, 2), R(-97, 135), R(840645, 29768)});
    CHECK(c.right_seq == std::vector<Rational>{R(1), R(-6), R(-73, 45), R(840645, 29768)});
    CHECK(c.zero_count_bound == 0);
}

TEST_CASE("trigonometric reduction", "[certify]") {
    // cos 3t = 4 cos^3 t - 3 cos t.
    const auto p = trig_reduce({R(0), R(0), R(0), R(1)});
    CHECK(p == poly({0, -3, 0, 4}));
    const double t = 0.7;
    CHECK(std::abs(p.eval_double(std::cos(t)) - std::cos(3 * t)) < 1e-14);
}

TEST_CASE("case polynomials respect their beta ranges", "[certify]") {
    CHECK_NOTHROW(case_polys(CaseId::Case2, R(5, 4)));
    CHECK_NOTHROW(case_polys(CaseId::Case3, R(7, 4)));
    try {
        case_polys(CaseId::Case2, R(7, 4));
        FAIL("no exception");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::OutOfRange);
    }
    CHECK_THROWS_AS(case_polys(CaseId::Case3, R(1)), Error);
}

TEST_CASE("case 3 certificate at beta = 7/4", "[certify]") {
    const auto k = case_polys(CaseId::Case3, R(7, 4));
    const auto s = sturm(k, R(-1), R(1));
    CHECK(s.zero_count_bound == 0);
    CHECK(k(R(-1)) > 0);
    const auto j = certificate_json(s);
    CHECK(j["kind"] == "sturm");
    CHECK(j["interval"]["a"]["num"] == "-1");
}

TEST_CASE("closed form is defined only on (0, 2)", "[certify]") {
    CHECK_THROWS_AS(mq2_closed_form(2.0), Error);
    CHECK_THROWS_AS(mq2_closed_form(0.0), Error);
    CHECK(std::abs(mq2_closed_form(0.5) - 3.0 / (4.0 * pi * pi)) < 1e-15);
}

TEST_CASE("certificate text layout", "[certify]") {
    const auto p = poly({1, 0, 1});
    const auto bf = certificate_text(budan_fourier(p, R(-1), R(1)));
    CHECK(bf.find("VFB(a):") != std::string::npos);
    CHECK(bf.find("N(a,b] <= 2") != std::string::npos);
    const auto st = certificate_text(sturm(p, R(-1), R(1)));
    CHECK(st.find("VS(a):") != std::string::npos);
    CHECK(st.find("N[a,b] = 0") != std::string::npos);
}
