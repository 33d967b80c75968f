#pragma once

// Perturbation experiments: exact flow-identity comparison for systems that
// agree to a given derivative order at the basepoint, steer-then-replay maps
// between a system and its perturbation, the scaling law of the replay gap,
// and transfer of the ball-coverage growth property at half the constant.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "chronoreach/chrono.hpp"
#include "chronoreach/contact.hpp"
#include "chronoreach/growth.hpp"
#include "chronoreach/picard_fit.hpp"
#include "chronoreach/random_systems.hpp"

namespace chronoreach {

struct FlowIdentityReport {
    bool equal = true;
    // witness of the lowest-degree differing coefficient, set when !equal
    int component = -1;
    MultiIndex monomial;  // in the segment-duration variables s1..sp
    Rational lhs, rhs;

    std::string witness() const {
        if (equal) return "EXACT-EQUAL";
        const auto mono =
            Poly::monomial(static_cast<int>(monomial.size()), monomial, Rational(1));
        return "x" + std::to_string(component + 1) + " @ " + mono.to_string("s") + ": " +
               rational_str(lhs) + " != " + rational_str(rhs);
    }
};

// Compares the truncated flow expansions of two same-shape systems coefficient
// by coefficient in exact arithmetic.  When the systems' fields agree to order
// k at x0, every coefficient up to total degree k agrees; the witness, when
// present, is the lowest-degree monomial where they differ.
inline FlowIdentityReport contact_flow_identity(const ControlSystem& X, const ControlSystem& Y,
                                                std::span<const Rational> x0, int k,
                                                const std::vector<std::vector<Rational>>& controls) {
    if (X.dim != Y.dim || X.m != Y.m)
        throw InputError("contact_flow_identity: systems differ in shape");
    const FlowPolynomial fx = truncated_flow(X, controls, k, x0);
    const FlowPolynomial fy = truncated_flow(Y, controls, k, x0);
    FlowIdentityReport rep;
    for (int i = 0; i < X.dim; ++i) {
        const Poly& px = fx.coord[static_cast<std::size_t>(i)];
        const Poly& py = fy.coord[static_cast<std::size_t>(i)];
        // terms are kept in descending graded-lex order, so the last differing
        // entry seen is the lowest-degree witness for this coordinate
        auto record = [&](const MultiIndex& r, const Rational& a, const Rational& b) {
            rep.equal = false;
            rep.component = i;
            rep.monomial = r;
            rep.lhs = a;
            rep.rhs = b;
        };
        auto ix = px.terms().begin();
        auto iy = py.terms().begin();
        bool found = false;
        while (ix != px.terms().end() || iy != py.terms().end()) {
            if (iy == py.terms().end() ||
                (ix != px.terms().end() && GradedLexGreater{}(ix->first, iy->first))) {
                record(ix->first, ix->second, Rational(0));
                found = true;
                ++ix;
            } else if (ix == px.terms().end() || GradedLexGreater{}(iy->first, ix->first)) {
                record(iy->first, Rational(0), iy->second);
                found = true;
                ++iy;
            } else {
                if (ix->second != iy->second) {
                    record(ix->first, ix->second, iy->second);
                    found = true;
                }
                ++ix;
                ++iy;
            }
        }
        if (found) return rep;  // lowest-degree witness within the first differing coordinate
    }
    return rep;
}

struct PerturbMapResult {
    std::vector<double> x_endpoint, y_endpoint;
    Schedule schedule;
    double distance = 0.0;        // ||y_endpoint - x_endpoint||
    double steer_residual = 0.0;  // ||x_endpoint - requested target||
    bool steer_ok = true;         // residual within the steer target_tol when one is set
    bool inside_hint = true;      // target within the advertised ball when radius_hint > 0
};

// Steers the first system toward the target, then replays the found schedule
// under the second system; the reported gap uses the achieved endpoint, not
// the requested target, so imperfect steering does not contaminate it.
inline PerturbMapResult perturbation_map(const ControlSystem& X, const ControlSystem& Y,
                                         const std::vector<double>& x0,
                                         const std::vector<double>& target, double t,
                                         const SteerConfig& steer_cfg, double radius_hint = 0.0) {
    if (X.dim != Y.dim || X.m != Y.m) throw InputError("perturbation_map: systems differ in shape");
    PerturbMapResult res;
    if (radius_hint > 0.0) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < x0.size(); ++i)
            d2 += (target[i] - x0[i]) * (target[i] - x0[i]);
        res.inside_hint = d2 <= radius_hint * radius_hint * (1.0 + 1e-12);
    }
    SteerResult sr = steer_to(X, x0, target, t, steer_cfg);
    res.schedule = std::move(sr.schedule);
    res.x_endpoint = std::move(sr.endpoint);
    res.steer_residual = sr.distance;
    res.steer_ok = steer_cfg.target_tol <= 0.0 || sr.distance <= steer_cfg.target_tol;
    FlowOptions fopt;
    fopt.step = steer_cfg.step;
    res.y_endpoint = flow_numeric(Y, res.schedule, x0, fopt).endpoint;
    double d2 = 0.0;
    for (std::size_t i = 0; i < x0.size(); ++i)
        d2 += (res.y_endpoint[i] - res.x_endpoint[i]) * (res.y_endpoint[i] - res.x_endpoint[i]);
    res.distance = std::sqrt(d2);
    return res;
}

struct PerturbTrial {
    double t = 0.0;
    int target_idx = 0;
    double steer_residual = 0.0;
    double replay_dist = 0.0;
};

struct PerturbEntry {
    double t = 0.0;
    double max_dist = 0.0;
    double median_dist = 0.0;
    bool used_in_fit = false;  // false when max_dist sits below the noise floor
};

struct PerturbReport {
    int N = 0;
    double C = 0.0;
    std::vector<PerturbEntry> entries;
    std::vector<PerturbTrial> trials;
    double slope = 0.0;         // log-log slope of max replay gap vs t
    double fit_residual = 0.0;  // rms of the log fit
    double alpha = 0.0;         // smallest prefactor with gap <= alpha * t^(N+1) on used entries
    double t_min = 0.0;         // largest horizon participating in the fit
    bool degenerate = false;    // fewer than two entries above the noise floor
    double noise_floor = 0.0;
    std::string diagnostic;

    std::string to_csv() const {
        std::string out = "t,target_idx,steer_residual,replay_dist\n";
        for (const PerturbTrial& tr : trials) {
            out += fmt_double(tr.t);
            out += ',';
            out += std::to_string(tr.target_idx);
            out += ',';
            out += fmt_double(tr.steer_residual);
            out += ',';
            out += fmt_double(tr.replay_dist);
            out += '\n';
        }
        return out;
    }
};

struct PerturbScalingConfig {
    SteerConfig steer;
    double noise_floor = 1e-11;  // integrator-noise cut for the log fit
    std::uint64_t seed = 0;
    int jobs = 1;
};

// Replay-gap scaling law: at each horizon t, steer toward seeded targets in
// the ball of radius C*t^N/2 and measure how far the same schedule drifts
// under the perturbed system.  Requires the two systems to agree to order N
// at the basepoint — without that the gap has no reason to shrink like
// t^(N+1), so the mismatch is a hard error naming the witness derivative.
inline PerturbReport perturb_scaling_experiment(const ControlSystem& X, const ControlSystem& Y,
                                                const std::vector<Rational>& x0_exact, int N,
                                                double C, const std::vector<double>& times,
                                                int targets_per_t,
                                                const PerturbScalingConfig& cfg = {}) {
    if (N < 1) throw InputError("perturb_scaling_experiment: N must be >= 1");
    if (C <= 0) throw InputError("perturb_scaling_experiment: C must be > 0");
    if (targets_per_t < 1) throw InputError("perturb_scaling_experiment: need targets");
    const ContactReport contact = kth_contact(X, Y, x0_exact, N);
    if (!contact.equal)
        throw InputError(
            "perturb_scaling_experiment: systems differ at order <= " + std::to_string(N) +
            ": field " + std::to_string(contact.field) + " component " +
            std::to_string(contact.component) + " derivative " +
            Poly::monomial(static_cast<int>(contact.r.size()), contact.r, Rational(1)).to_string("x") +
            " (" + rational_str(contact.lhs) + " != " + rational_str(contact.rhs) + ")");

    const int n = X.dim;
    std::vector<double> x0(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x0[static_cast<std::size_t>(i)] = to_double(x0_exact[static_cast<std::size_t>(i)]);

    PerturbReport rep;
    rep.N = N;
    rep.C = C;
    rep.noise_floor = cfg.noise_floor;
    std::vector<double> log_t, log_d;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const double t = times[ti];
        const double radius = 0.5 * C * std::pow(t, N);
        std::vector<PerturbTrial> trials(static_cast<std::size_t>(targets_per_t));
        parallel_for(trials.size(), cfg.jobs, [&](std::size_t tj) {
            Rng rng(derive_seed(cfg.seed, 0xd12 + ti, tj));
            // uniform draw from the ball: gaussian direction, radius by cdf inversion
            std::vector<double> target(static_cast<std::size_t>(n));
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (double& c : target) {
                    c = rng.gaussian();
                    norm2 += c * c;
                }
            } while (norm2 < 1e-12);
            const double scale =
                radius * std::pow(rng.unit(), 1.0 / n) / std::sqrt(norm2);
            for (int i = 0; i < n; ++i)
                target[static_cast<std::size_t>(i)] = x0[static_cast<std::size_t>(i)] +
                                                      scale * target[static_cast<std::size_t>(i)];
            SteerConfig stc = cfg.steer;
            stc.seed = derive_seed(cfg.seed, 0x5107 + ti, tj);
            stc.target_tol = stc.target_tol > 0 ? stc.target_tol : 0.05 * radius;
            const PerturbMapResult pm = perturbation_map(X, Y, x0, target, t, stc, radius);
            trials[tj] = {t, static_cast<int>(tj), pm.steer_residual, pm.distance};
        });

        PerturbEntry entry;
        entry.t = t;
        std::vector<double> dists;
        dists.reserve(trials.size());
        for (const PerturbTrial& tr : trials) {
            entry.max_dist = std::max(entry.max_dist, tr.replay_dist);
            dists.push_back(tr.replay_dist);
        }
        std::sort(dists.begin(), dists.end());
        entry.median_dist = dists.size() % 2 ? dists[dists.size() / 2]
                                             : 0.5 * (dists[dists.size() / 2 - 1] + dists[dists.size() / 2]);
        entry.used_in_fit = entry.max_dist > cfg.noise_floor;
        if (entry.used_in_fit) {
            log_t.push_back(std::log(t));
            log_d.push_back(std::log(entry.max_dist));
            rep.t_min = std::max(rep.t_min, t);
            rep.alpha = std::max(rep.alpha, entry.max_dist / std::pow(t, N + 1));
        }
        rep.entries.push_back(entry);
        rep.trials.insert(rep.trials.end(), trials.begin(), trials.end());
    }

    if (log_t.size() < 2) {
        rep.degenerate = true;
        rep.diagnostic = "replay gaps at integrator noise on " +
                         std::to_string(times.size() - log_t.size()) +
                         " of " + std::to_string(times.size()) +
                         " horizons; slope not identifiable";
        return rep;
    }
    const detail::LineFit fit = detail::fit_line(log_t, log_d);
    rep.slope = fit.slope;
    rep.fit_residual = fit.rms;
    return rep;
}

// Growth transfer protocol: verify the unperturbed system passes ball
// coverage at (N, C) and the perturbation agrees to order N, then run the
// perturbed system at the halved constant and report its coverage.
inline GrowthReport main_theorem_experiment(const ControlSystem& X, const ControlSystem& Y,
                                            const std::vector<Rational>& x0_exact, int N, double C,
                                            const std::vector<double>& times,
                                            const GrowthConfig& cfg, double pass_threshold = 0.95) {
    const ContactReport contact = kth_contact(X, Y, x0_exact, N);
    if (!contact.equal)
        throw InputError("main_theorem_experiment: systems differ at order <= " + std::to_string(N));
    std::vector<double> x0(x0_exact.size());
    for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = to_double(x0_exact[i]);
    const GrowthReport base = growth_rate_test(X, x0, N, C, times, cfg);
    if (!base.passes(pass_threshold)) {
        std::string cov;
        for (const GrowthEntry& e : base.entries) cov += " " + fmt_double(e.coverage);
        throw InputError("main_theorem_experiment: base system fails coverage at (N=" +
                         std::to_string(N) + ", C=" + fmt_double(C) + "):" + cov);
    }
    return growth_rate_test(Y, x0, N, 0.5 * C, times, cfg);
}

}  // namespace chronoreach
