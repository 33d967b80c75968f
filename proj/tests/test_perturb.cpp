#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chronoreach/parse.hpp"
#include "chronoreach/perturb.hpp"
#include "chronoreach/random_systems.hpp"

using namespace chronoreach;

namespace {

ControlSystem brockett() {
    return parse_system(
        "system brockett\ndim 3\ncontrols 2\n"
        "X0 = [0, 0, 0]\nX1 = [1, 0, -x2]\nX2 = [0, 1, x1]\n");
}

ControlSystem brockett_cubic() {
    return parse_system(
        "system brockett_cubic\ndim 3\ncontrols 2\n"
        "X0 = [0, 0, x1^3]\nX1 = [1, 0, -x2]\nX2 = [0, 1, x1]\n");
}

const std::vector<Rational> origin3{0, 0, 0};

}  // namespace

TEST_CASE("flows of second-order-contact systems agree through order three", "[perturb]") {
    const auto X = brockett();
    const auto Y = brockett_cubic();
    const std::vector<std::vector<Rational>> one_seg{{Rational(1), Rational(0)}};

    for (int k = 1; k <= 3; ++k) {
        const auto rep = contact_flow_identity(X, Y, origin3, k, one_seg);
        INFO("k = " << k << ": " << rep.witness());
        REQUIRE(rep.equal);
    }

    // the cubic drift first feeds the flow at total degree four
    const auto diff = contact_flow_identity(X, Y, origin3, 4, one_seg);
    REQUIRE_FALSE(diff.equal);
    REQUIRE(diff.witness() == "x3 @ s1^4: 0 != 1/4");

    const std::vector<std::vector<Rational>> two_seg{{Rational(1), Rational(1)},
                                                     {Rational(-1, 3), Rational(1, 2)}};
    const auto diff2 = contact_flow_identity(X, Y, origin3, 4, two_seg);
    REQUIRE_FALSE(diff2.equal);
    REQUIRE(diff2.witness() == "x3 @ s2^4: 0 != -1/108");
}

TEST_CASE("flow identity validates shapes and controls", "[perturb]") {
    const auto X = brockett();
    auto Y = X;
    Y.fields.pop_back();
    Y.m -= 1;
    const std::vector<std::vector<Rational>> ctl{{Rational(1), Rational(0)}};
    REQUIRE_THROWS_AS(contact_flow_identity(X, Y, origin3, 2, ctl), InputError);

    const std::vector<std::vector<Rational>> wrong{{Rational(1)}};
    REQUIRE_THROWS_AS(contact_flow_identity(X, X, origin3, 2, wrong), InputError);
}

TEST_CASE("constructed contact forces exact flow agreement", "[perturb][property]") {
    Rng rng(5150);
    for (int trial = 0; trial < 25; ++trial) {
        const int k = static_cast<int>(rng.uniform_int(1, 3));
        const int p = static_cast<int>(rng.uniform_int(1, 3));
        ControlSystem X = random_system(rng, 3, 1, 3);
        ControlSystem Y = X;
        const auto pert = random_contact_perturbation(rng, 3, k + 1, k + 3, origin3);
        Y.fields[static_cast<std::size_t>(rng.uniform_int(0, 1))] += pert;
        const auto ctl = random_rational_controls(rng, 1, p);

        const auto rep = contact_flow_identity(X, Y, origin3, k, ctl);
        INFO("trial " << trial << " k=" << k << ": " << rep.witness());
        REQUIRE(rep.equal);
    }
}

TEST_CASE("an order-k field difference surfaces at truncation k+1", "[perturb][property]") {
    // Perturbing a drift component with a degree-k monomial keeps the flows
    // identical through truncation k; one more order exposes it generically.
    Rng rng(6021);
    int exposed = 0;
    const int trials = 20;
    for (int trial = 0; trial < trials; ++trial) {
        const int k = static_cast<int>(rng.uniform_int(1, 3));
        ControlSystem X = random_system(rng, 3, 1, 3, 5);
        ControlSystem Y = X;
        PolyVectorField pert = random_contact_perturbation(rng, 3, k, k, origin3, 1);
        while (pert.is_zero()) pert = random_contact_perturbation(rng, 3, k, k, origin3, 1);
        Y.fields[0] += pert;
        const auto ctl = random_rational_controls(rng, 1, 2);

        REQUIRE(contact_flow_identity(X, Y, origin3, k, ctl).equal);
        if (!contact_flow_identity(X, Y, origin3, k + 1, ctl).equal) ++exposed;
    }
    REQUIRE(exposed >= 18);
}

TEST_CASE("replaying a schedule under an agreeing perturbation lands nearby", "[perturb]") {
    const auto X = brockett();
    const auto Y = brockett_cubic();
    SteerConfig cfg;
    cfg.seed = 5;
    const std::vector<double> target{0.05, 0.03, 0.001};
    const PerturbMapResult pm = perturbation_map(X, Y, {0, 0, 0}, target, 0.4, cfg);
    REQUIRE(pm.steer_residual < 1e-6);
    REQUIRE(pm.distance > 0.0);
    REQUIRE(pm.distance < 1e-4);

    // identical dynamics replay to the identical endpoint
    const PerturbMapResult same = perturbation_map(X, X, {0, 0, 0}, target, 0.4, cfg);
    REQUIRE(same.distance == 0.0);
}

TEST_CASE("replay gap scales with the agreement order", "[perturb][scaling]") {
    const auto X = brockett();
    const auto Y = brockett_cubic();
    PerturbScalingConfig cfg;
    cfg.seed = 424242;
    const PerturbReport rep =
        perturb_scaling_experiment(X, Y, origin3, 2, 0.129, {0.4, 0.2, 0.1}, 8, cfg);
    REQUIRE_FALSE(rep.degenerate);
    REQUIRE(rep.entries.size() == 3);
    REQUIRE(rep.slope >= 2.0);  // one order beyond the radius exponent, loosely
    REQUIRE(rep.alpha > 0.0);

    const PerturbReport again =
        perturb_scaling_experiment(X, Y, origin3, 2, 0.129, {0.4, 0.2, 0.1}, 8, cfg);
    REQUIRE(rep.slope == again.slope);
    for (std::size_t i = 0; i < rep.trials.size(); ++i)
        REQUIRE(rep.trials[i].replay_dist == again.trials[i].replay_dist);
}

TEST_CASE("identical systems yield a degenerate scaling law", "[perturb][scaling]") {
    const auto X = brockett();
    PerturbScalingConfig cfg;
    cfg.seed = 7;
    const PerturbReport rep =
        perturb_scaling_experiment(X, X, origin3, 2, 0.129, {0.4, 0.2}, 3, cfg);
    REQUIRE(rep.degenerate);
    REQUIRE_FALSE(rep.diagnostic.empty());
    for (const PerturbTrial& tr : rep.trials) REQUIRE(tr.replay_dist == 0.0);
}

TEST_CASE("scaling experiment refuses systems without the required agreement", "[perturb]") {
    const auto X = brockett();
    auto Y = X;
    Poly lin(3);
    lin.add_term({1, 0, 0}, 1);
    Y.fields[0].comp[0] += lin;  // degree-1 difference: no first-order contact
    PerturbScalingConfig cfg;
    REQUIRE_THROWS_AS(perturb_scaling_experiment(X, Y, origin3, 2, 0.1, {0.4, 0.2}, 3, cfg),
                      InputError);
}

TEST_CASE("growth transfers from the base system to its perturbation", "[perturb][growth]") {
    const auto X = brockett();
    const auto Y = brockett_cubic();
    GrowthConfig cfg;
    cfg.sampler.count = 3000;
    cfg.sampler.p = 4;
    cfg.directions = 40;
    cfg.seed = 909;
    const GrowthReport rep = main_theorem_experiment(X, Y, origin3, 2, 0.129, {0.5, 0.25}, cfg);
    REQUIRE(rep.C == Catch::Approx(0.0645).margin(1e-12));
    REQUIRE(rep.passes(0.90));

    // an absurd constant fails the base-system precondition
    REQUIRE_THROWS_AS(main_theorem_experiment(X, Y, origin3, 2, 10.0, {0.5}, cfg), InputError);
}
