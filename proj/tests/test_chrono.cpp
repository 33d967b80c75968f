#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chronoreach/parse.hpp"
#include "chronoreach/picard_fit.hpp"
#include "chronoreach/picard_oracle.hpp"
#include "chronoreach/random_systems.hpp"
#include "chronoreach/seminorm.hpp"

using namespace chronoreach;

namespace {

ControlSystem exp1d() {
    return parse_system("system exp1d\ndim 1\ncontrols 0\nx0 = [1]\nX0 = [x1]\n");
}

ControlSystem double_integrator() {
    return parse_system("system dint\ndim 2\ncontrols 1\nX0 = [0, x1]\nX1 = [1, 0]\n");
}

ControlSystem brockett() {
    return parse_system(
        "system brockett\ndim 3\ncontrols 2\n"
        "X0 = [0, 0, 0]\nX1 = [1, 0, -x2]\nX2 = [0, 1, x1]\n");
}

std::vector<double> flow_endpoint(const ControlSystem& sys, const Schedule& sched,
                                  std::vector<double> x0, double step = 1e-3) {
    FlowOptions opt;
    opt.step = step;
    return flow_numeric(sys, sched, std::move(x0), opt).endpoint;
}

}  // namespace

TEST_CASE("chrono_power iterates the derivation", "[chrono]") {
    const ControlSystem dint = double_integrator();
    const PolyVectorField V = control_vf(dint, std::vector<Rational>{1});  // (1, x1)
    const Poly x2 = Poly::variable(2, 1);

    CHECK(chrono_power(V, x2, 0) == x2);
    CHECK(chrono_power(V, x2, 1) == Poly::variable(2, 0));
    CHECK(chrono_power(V, x2, 2) == Poly::constant(2, 1));
    CHECK(chrono_power(V, x2, 3).is_zero());  // strictly-triangular nilpotency
    CHECK(chrono_power(V, x2, 7).is_zero());

    CHECK_THROWS_AS(chrono_power(V, Poly::variable(3, 0), 1), InputError);
}

TEST_CASE("truncated flow of the double integrator", "[chrono]") {
    const ControlSystem dint = double_integrator();
    const std::vector<std::vector<Rational>> controls = {{Rational(1)}};
    const std::vector<Rational> x0 = {0, 0};
    const FlowPolynomial fp = truncated_flow(dint, controls, 2, x0);

    REQUIRE(fp.coord.size() == 2);
    CHECK(fp.coord[0] == Poly::variable(1, 0));                          // s1
    CHECK(fp.coord[1] == Poly::monomial(1, {2}, Rational(1, 2)));           // s1^2/2
    CHECK(fp.to_string() == "x1(s) = s1\nx2(s) = 1/2*s1^2\n");
}

TEST_CASE("order zero flow is the basepoint", "[chrono]") {
    const ControlSystem sys = brockett();
    const std::vector<std::vector<Rational>> controls = {{1, 0}, {0, 1}};
    const std::vector<Rational> x0 = {Rational(1, 3), Rational(-2, 7), 5};
    const FlowPolynomial fp = truncated_flow(sys, controls, 0, x0);
    for (int i = 0; i < 3; ++i)
        CHECK(fp.coord[static_cast<std::size_t>(i)] ==
              Poly::constant(2, x0[static_cast<std::size_t>(i)]));
}

TEST_CASE("Brockett two-segment flow", "[chrono]") {
    const ControlSystem sys = brockett();
    const std::vector<std::vector<Rational>> controls = {{1, 0}, {0, 1}};
    const std::vector<Rational> x0 = {0, 0, 0};
    const FlowPolynomial fp = truncated_flow(sys, controls, 2, x0);

    CHECK(fp.coord[0] == Poly::variable(2, 0));            // s1
    CHECK(fp.coord[1] == Poly::variable(2, 1));            // s2
    CHECK(fp.coord[2] == Poly::monomial(2, {1, 1}, 1));       // s1*s2
}

TEST_CASE("flow polynomial at s=0 is the basepoint", "[chrono][property]") {
    Rng rng(97);
    for (int trial = 0; trial < 10; ++trial) {
        const int dim = static_cast<int>(rng.uniform_int(1, 3));
        const int m = static_cast<int>(rng.uniform_int(1, 2));
        const ControlSystem sys = random_system(rng, dim, m, 2, 2);
        std::vector<Rational> x0(static_cast<std::size_t>(dim));
        for (auto& c : x0) c = random_unit_rational(rng);
        const auto controls = random_rational_controls(rng, m, 2);
        const FlowPolynomial fp = truncated_flow(sys, controls, 3, x0);
        const std::vector<Rational> zero(2, Rational(0));
        CHECK(fp.eval_exact(zero) == x0);
    }
}

TEST_CASE("truncation consistency across orders", "[chrono][property]") {
    Rng rng(203);
    for (int trial = 0; trial < 8; ++trial) {
        const int dim = static_cast<int>(rng.uniform_int(1, 3));
        const int m = static_cast<int>(rng.uniform_int(0, 2));
        const ControlSystem sys = random_system(rng, dim, m, 2, 2);
        std::vector<Rational> x0(static_cast<std::size_t>(dim));
        for (auto& c : x0) c = random_unit_rational(rng);
        const auto controls = random_rational_controls(rng, m, 2);
        const int k = static_cast<int>(rng.uniform_int(1, 3));
        const FlowPolynomial lo = truncated_flow(sys, controls, k, x0);
        const FlowPolynomial hi = truncated_flow(sys, controls, k + 2, x0);
        for (int i = 0; i < dim; ++i)
            CHECK(hi.coord[static_cast<std::size_t>(i)].truncate_total(k) ==
                  lo.coord[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("direct iterated-integral oracle agrees exactly", "[chrono][oracle]") {
    Rng rng(311);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = static_cast<int>(rng.uniform_int(1, 3));
        const int m = static_cast<int>(rng.uniform_int(0, 2));
        const ControlSystem sys = random_system(rng, dim, m, 2, 2);
        std::vector<Rational> x0(static_cast<std::size_t>(dim));
        for (auto& c : x0) c = random_unit_rational(rng);
        const int p = static_cast<int>(rng.uniform_int(1, 3));
        const int k = static_cast<int>(rng.uniform_int(0, 4));
        const auto controls = random_rational_controls(rng, m, p);
        const auto durations = random_rational_durations(rng, p, Rational(1, 2));

        const FlowPolynomial fp = truncated_flow(sys, controls, k, x0);
        const std::vector<Rational> direct = picard_direct_oracle(sys, controls, k, x0, durations);
        REQUIRE(fp.eval_exact(durations) == direct);
    }
}

TEST_CASE("oracle rejects inputs beyond its limits", "[chrono][oracle]") {
    const ControlSystem sys = brockett();
    const std::vector<Rational> x0 = {0, 0, 0};
    const std::vector<std::vector<Rational>> controls4 = {{1, 0}, {0, 1}, {1, 0}, {0, 1}};
    const std::vector<Rational> dur4(4, Rational(1, 10));
    CHECK_THROWS_AS(picard_direct_oracle(sys, controls4, 2, x0, dur4), InputError);

    const std::vector<std::vector<Rational>> controls1 = {{1, 0}};
    const std::vector<Rational> dur1 = {Rational(1, 10)};
    CHECK_THROWS_AS(picard_direct_oracle(sys, controls1, 5, x0, dur1), InputError);
}

TEST_CASE("numeric flow reproduces the exponential", "[flow]") {
    const ControlSystem sys = exp1d();
    Schedule sched;
    sched.segments.push_back({{}, 1.0});
    const auto end = flow_endpoint(sys, sched, {1.0});
    CHECK(std::abs(end[0] - std::exp(1.0)) < 1e-8);
}

TEST_CASE("zero field holds the basepoint", "[flow]") {
    const ControlSystem sys = parse_system("system z\ndim 2\ncontrols 0\nX0 = [0, 0]\n");
    Schedule sched;
    sched.segments.push_back({{}, 0.7});
    sched.segments.push_back({{}, 1.3});
    const auto end = flow_endpoint(sys, sched, {2.5, -1.0});
    CHECK(end[0] == 2.5);
    CHECK(end[1] == -1.0);
}

TEST_CASE("Brockett numeric endpoint", "[flow]") {
    const ControlSystem sys = brockett();
    Schedule sched;
    sched.segments.push_back({{1.0, 0.0}, 0.3});
    sched.segments.push_back({{0.0, 1.0}, 0.4});
    const auto end = flow_endpoint(sys, sched, {0.0, 0.0, 0.0});
    CHECK(std::abs(end[0] - 0.3) < 1e-10);
    CHECK(std::abs(end[1] - 0.4) < 1e-10);
    CHECK(std::abs(end[2] - 0.12) < 1e-10);
}

TEST_CASE("semigroup property of the numeric flow", "[flow][property]") {
    const ControlSystem sys = brockett();
    Schedule full;
    full.segments.push_back({{1.0, 0.0}, 0.3});
    full.segments.push_back({{0.0, 1.0}, 0.4});
    const auto direct = flow_endpoint(sys, full, {0.1, -0.2, 0.05});

    Schedule first, second;
    first.segments.push_back(full.segments[0]);
    second.segments.push_back(full.segments[1]);
    const auto mid = flow_endpoint(sys, first, {0.1, -0.2, 0.05});
    const auto chained = flow_endpoint(sys, second, mid);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(direct[static_cast<std::size_t>(i)] - chained[static_cast<std::size_t>(i)]) < 1e-9);
}

TEST_CASE("blow-up raises a positioned error", "[flow]") {
    const ControlSystem sys = parse_system("system q\ndim 1\ncontrols 0\nX0 = [x1^2]\n");
    Schedule sched;
    sched.segments.push_back({{}, 0.2});
    sched.segments.push_back({{}, 1.8});
    try {
        flow_endpoint(sys, sched, {1.0});
        FAIL("expected blow-up");
    } catch (const BlowupError& e) {
        CHECK(e.segment == 1);       // x(t) = 1/(1-t) escapes inside the second segment
        CHECK(e.time > 0.9);
        CHECK(e.time < 1.1);
    }
}

TEST_CASE("flow determinism and trace shape", "[flow]") {
    const ControlSystem sys = brockett();
    Schedule sched;
    sched.segments.push_back({{1.0, 0.0}, 0.05});
    FlowOptions opt;
    opt.trace = true;
    const FlowResult a = flow_numeric(sys, sched, {0.0, 0.0, 0.0}, opt);
    const FlowResult b = flow_numeric(sys, sched, {0.0, 0.0, 0.0}, opt);
    CHECK(a.endpoint == b.endpoint);  // bitwise repeatability
    REQUIRE(a.trajectory.size() == 51);
    CHECK(a.trajectory.front().first == 0.0);
    CHECK(a.trajectory.back().second == a.endpoint);
}

TEST_CASE("truncation error against the analytic exponential", "[chrono][fit]") {
    const ControlSystem sys = exp1d();
    const std::vector<std::vector<Rational>> controls = {{}};
    const std::vector<Rational> x0 = {1};
    const std::vector<Rational> t01 = {Rational(1, 10)};

    const double err = picard_error(sys, controls, t01, x0, 2);
    CHECK(err == Catch::Approx(1.70918e-4).margin(1e-7));

    // order 0: distance from the basepoint to the endpoint
    const double err0 = picard_error(sys, controls, t01, x0, 0);
    CHECK(err0 == Catch::Approx(std::exp(0.1) - 1.0).margin(1e-8));
}

TEST_CASE("nilpotent truncation error reaches the integrator floor", "[chrono][fit]") {
    const ControlSystem dint = double_integrator();
    const std::vector<std::vector<Rational>> controls = {{Rational(1)}};
    const std::vector<Rational> x0 = {0, 0};
    for (int k = 2; k <= 4; ++k) {
        const double err = picard_error(dint, controls, {Rational(1, 2)}, x0, k);
        CHECK(err <= 1e-8);
    }
}

TEST_CASE("log-log slopes recover order k+1", "[chrono][fit]") {
    const ControlSystem sys = exp1d();
    const std::vector<std::vector<Rational>> controls = {{}};
    const std::vector<Rational> x0 = {1};
    const std::vector<int> orders = {1, 2, 3};
    const std::vector<Rational> times = {Rational(1, 10), Rational(1, 20), Rational(1, 40)};

    const PicardFitReport rep = picard_fit(sys, controls, x0, orders, times);
    REQUIRE(rep.slopes.size() == 3);
    for (const auto& s : rep.slopes) {
        CHECK(s.usable_points == 3);
        CHECK(s.slope == Catch::Approx(s.k + 1).margin(0.15));
    }
    CHECK(rep.M > 0);
    CHECK(rep.L > 0);
    CHECK(rep.dominated);
    CHECK_FALSE(rep.degenerate);
    for (const auto& pt : rep.points) CHECK(pt.error <= pt.bound * (1 + 1e-9));
    CHECK(rep.to_csv().rfind("k,t,error,bound\n", 0) == 0);
}

TEST_CASE("degenerate fit is flagged on a nilpotent system", "[chrono][fit]") {
    const ControlSystem dint = double_integrator();
    const std::vector<std::vector<Rational>> controls = {{Rational(1)}};
    const std::vector<Rational> x0 = {0, 0};
    const PicardFitReport rep = picard_fit(dint, controls, x0, {3, 4},
                                           {Rational(1, 10), Rational(1, 20)});
    CHECK(rep.degenerate);
    CHECK_FALSE(rep.diagnostic.empty());
}

TEST_CASE("seminorm hand values", "[seminorm]") {
    SeminormSpec spec;
    spec.box = {{Rational(-1), Rational(1)}};
    spec.weights = {Rational(1), Rational(1, 2)};

    const PolyVectorField V{{Poly::variable(1, 0)}};
    const Poly f = Poly::variable(1, 0);
    CHECK(seminorm_exact(V, f, spec) == Rational(1));

    const PolyVectorField zero(1);
    CHECK(seminorm_exact(zero, f, spec) == Rational(0));
}

TEST_CASE("seminorm homogeneity is exact", "[seminorm][property]") {
    Rng rng(555);
    for (int trial = 0; trial < 10; ++trial) {
        const int dim = 2;
        const PolyVectorField V = random_field(rng, dim, 3, 3);
        const Poly f = random_poly(rng, dim, 2, 2);
        SeminormSpec spec = default_seminorm_spec(dim, 8);
        spec.grid = 5;
        const Rational c = random_unit_rational(rng);
        const Rational lhs = seminorm_exact(V * c, f, spec);
        Rational ac = c < 0 ? -c : c;
        CHECK(lhs == ac * seminorm_exact(V, f, spec));
    }
}

TEST_CASE("seminorm input errors", "[seminorm]") {
    const PolyVectorField V{{Poly::monomial(1, {5}, 1)}};  // x1^5, degree-5 derivative chain
    const Poly f = Poly::variable(1, 0);
    SeminormSpec spec;
    spec.box = {{Rational(-1), Rational(1)}};
    spec.weights = {Rational(1), Rational(1, 2)};  // too short for degree 5
    CHECK_THROWS_AS(seminorm_exact(V, f, spec), InputError);

    SeminormSpec degenerate = spec;
    degenerate.box = {{Rational(1), Rational(1)}};
    CHECK_THROWS_AS(seminorm_exact(V, f, degenerate), InputError);

    SeminormSpec rising = default_seminorm_spec(1, 6);
    rising.weights[2] = Rational(2);  // breaks monotonicity
    CHECK_THROWS_AS(seminorm_exact(V, f, rising), InputError);
}
