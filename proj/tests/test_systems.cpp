#include <catch2/catch_amalgamated.hpp>

#include "chronoreach/format.hpp"
#include "chronoreach/parse.hpp"
#include "chronoreach/random_systems.hpp"

using namespace chronoreach;

namespace {

const char* kBrockettDoc = R"(# canonical test system
system brockett
dim 3
controls 2
X0 = [0, 0, 0]
X1 = [1, 0, -x2]
X2 = [0, 1, x1]
)";

}  // namespace

TEST_CASE("parse_poly matches hand parse", "[sysparse]") {
    const Poly p = parse_poly("3/2*x1^2*x2 - x3", 3);
    REQUIRE(p.term_count() == 2);
    CHECK(p.coeff({2, 1, 0}) == Rational(3, 2));
    CHECK(p.coeff({0, 0, 1}) == Rational(-1));

    CHECK(parse_poly("0", 2).is_zero());
    CHECK(parse_poly("0.25", 1) == Poly::constant(1, Rational(1, 4)));
    CHECK(parse_poly("(x1 + 1)^2 - x1^2 - 2*x1", 1) == Poly::constant(1, 1));
    CHECK(parse_poly("-x1", 1) == -Poly::variable(1, 0));
    CHECK(parse_poly("2 - -1", 1) == Poly::constant(1, 3));  // binary minus then signed term
}

TEST_CASE("parse_poly rejects malformed input with positions", "[sysparse]") {
    auto check_fail = [](const std::string& text, int dim) {
        try {
            parse_poly(text, dim);
            FAIL("expected ParseError for: " << text);
        } catch (const ParseError& e) {
            CHECK(e.line >= 1);
            CHECK(e.col >= 1);
        }
    };
    check_fail("x4", 3);          // unknown variable
    check_fail("x0", 3);          // reserved for the basepoint
    check_fail("x1^-2", 3);       // negative exponent
    check_fail("x1^0.5", 3);      // fractional exponent
    check_fail("(x1 + x2", 3);    // unbalanced parenthesis
    check_fail("1e3", 1);         // scientific notation not in the grammar
    check_fail("x1 x2", 3);       // missing operator
    check_fail("2x1", 3);         // implicit multiplication
    check_fail("", 1);
    check_fail("3//2", 1);
}

TEST_CASE("parse_system reads the block format", "[sysparse]") {
    const ControlSystem sys = parse_system(kBrockettDoc);
    CHECK(sys.name == "brockett");
    CHECK(sys.dim == 3);
    CHECK(sys.m == 2);
    REQUIRE(sys.fields.size() == 3);
    CHECK(sys.fields[0].is_zero());
    CHECK(sys.fields[1].comp[2] == -Poly::variable(3, 1));
    CHECK_FALSE(sys.basepoint_explicit);
    CHECK(sys.basepoint == std::vector<Rational>{0, 0, 0});
    CHECK(validate(sys).empty());
}

TEST_CASE("parse_system structural errors carry positions", "[sysparse]") {
    auto check_fail = [](const std::string& text) {
        try {
            parse_system(text);
            FAIL("expected ParseError for document:\n" << text);
        } catch (const ParseError& e) {
            CHECK(e.line >= 1);
            CHECK(e.col >= 1);
        }
    };
    check_fail("dim 2\ncontrols 0\nX0 = [0, 0]\n");                         // missing system
    check_fail("system a\ncontrols 0\nX0 = [0]\n");                         // missing dim
    check_fail("system a\ndim 1\nX0 = [0]\n");                              // controls after field
    check_fail("system a\ndim 1\ncontrols 1\nX0 = [0]\n");                  // missing X1
    check_fail("system a\ndim 2\ncontrols 0\nX0 = [0]\n");                  // bad component count
    check_fail("system a\ndim 1\ncontrols 0\nX0 = [0]\nX0 = [0]\n");        // duplicate field
    check_fail("system a\ndim 1\ncontrols 0\nX0 = [x2]\n");                 // unknown variable
    check_fail("system a\ndim 1\ncontrols 0\nX1 = [0]\n");                  // X1 exceeds controls + missing X0
    check_fail("system a\ndim 1\ndim 1\ncontrols 0\nX0 = [0]\n");           // duplicate dim
    check_fail("system a\ndim 1\ncontrols 0\nx0 = [1, 2]\nX0 = [0]\n");     // bad basepoint length
    check_fail("flub\n");                                                   // unknown keyword
}

TEST_CASE("serialize round-trips exactly", "[sysparse]") {
    const ControlSystem sys = parse_system(kBrockettDoc);
    const std::string text = serialize(sys);
    const ControlSystem again = parse_system(text);
    CHECK(again.name == sys.name);
    CHECK(again.dim == sys.dim);
    CHECK(again.m == sys.m);
    CHECK(again.fields == sys.fields);
    CHECK(again.basepoint == sys.basepoint);
    CHECK(serialize(again) == text);

    const ControlSystem frac = parse_system("system f\ndim 1\ncontrols 0\nx0 = [1/3]\nX0 = [1/3*x1]\n");
    const std::string ft = serialize(frac);
    CHECK(ft.find("1/3") != std::string::npos);
    CHECK(serialize(parse_system(ft)) == ft);
}

TEST_CASE("round trip on 200 randomized systems", "[sysparse][property]") {
    Rng rng(4242);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = static_cast<int>(rng.uniform_int(1, 4));
        const int m = static_cast<int>(rng.uniform_int(0, 3));
        ControlSystem sys = random_system(rng, dim, m, 4, 4);
        sys.name = "rand" + std::to_string(trial);
        if (rng.unit() < 0.5) {
            sys.basepoint_explicit = true;
            for (auto& b : sys.basepoint) b = random_unit_rational(rng);
        }
        const std::string text = serialize(sys);
        const ControlSystem again = parse_system(text);
        REQUIRE(again.fields == sys.fields);
        REQUIRE(again.basepoint == sys.basepoint);
        REQUIRE(again.basepoint_explicit == sys.basepoint_explicit);
        REQUIRE(serialize(again) == text);
    }
}

TEST_CASE("control_vf combines fields", "[system]") {
    const ControlSystem sys = parse_system(kBrockettDoc);

    const std::vector<Rational> zero{0, 0};
    CHECK(control_vf(sys, zero) == sys.fields[0]);

    const std::vector<Rational> e1{1, 0};
    CHECK(control_vf(sys, e1) == sys.fields[1]);  // X0 is zero for Brockett

    const std::vector<Rational> bad{Rational(3, 2), 0};
    CHECK_THROWS_AS(control_vf(sys, bad), InputError);

    // affine in u
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Rational> u{random_unit_rational(rng), random_unit_rational(rng)};
        std::vector<Rational> v{random_unit_rational(rng), random_unit_rational(rng)};
        std::vector<Rational> mid{(u[0] + v[0]) / 2, (u[1] + v[1]) / 2};
        auto lhs = control_vf(sys, mid);
        auto rhs = (control_vf(sys, u) + control_vf(sys, v)) * Rational(1, 2);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("validate reports shape violations", "[system]") {
    ControlSystem sys = parse_system(kBrockettDoc);
    CHECK(validate(sys).empty());

    ControlSystem bad = sys;
    bad.fields.pop_back();
    const auto issues = validate(bad);
    REQUIRE_FALSE(issues.empty());
    CHECK(issues.front().find("m+1") != std::string::npos);

    ControlSystem wrongdim = sys;
    wrongdim.fields[1] = PolyVectorField(2);
    CHECK_FALSE(validate(wrongdim).empty());
}

TEST_CASE("schedule literal parses chronologically", "[system]") {
    const RationalSchedule rs = parse_schedule_literal("(1,0):0.1;(0,1):0.2", 2);
    REQUIRE(rs.size() == 2);
    CHECK(rs.controls[0] == std::vector<Rational>{1, 0});
    CHECK(rs.controls[1] == std::vector<Rational>{0, 1});
    CHECK(rs.durations[0] == Rational(1, 10));
    CHECK(rs.durations[1] == Rational(1, 5));

    const Schedule sched = rs.to_schedule();
    CHECK(sched.total() == Catch::Approx(0.3));

    CHECK(parse_schedule_literal("():0.5", 0).size() == 1);
    CHECK(parse_schedule_literal("(1/2,-1):1e-3", 2).durations[0] == Rational(1, 1000));
    CHECK_THROWS_AS(parse_schedule_literal("(2,0):0.1", 2), ParseError);   // control out of box
    CHECK_THROWS_AS(parse_schedule_literal("(1,0):-0.1", 2), ParseError);  // negative duration
    CHECK_THROWS_AS(parse_schedule_literal("(1):0.1", 2), ParseError);     // arity mismatch
}

TEST_CASE("format_schedule round-trips through the literal parser", "[system]") {
    Schedule s;
    s.segments.push_back({{1.0, 0.0}, 0.1});
    s.segments.push_back({{-0.25, 0.75}, 1.25e-5});
    const std::string lit = format_schedule(s);
    const RationalSchedule rs = parse_schedule_literal(lit, 2);
    const Schedule back = rs.to_schedule();
    REQUIRE(back.segments.size() == s.segments.size());
    for (std::size_t j = 0; j < s.segments.size(); ++j) {
        CHECK(back.segments[j].duration == s.segments[j].duration);
        CHECK(back.segments[j].control == s.segments[j].control);
    }
}
