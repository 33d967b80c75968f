#pragma once

// Derivative-free steering: minimizes endpoint distance to a target over
// p-segment schedules by Nelder-Mead simplex descent with seeded restarts and
// shrinking-simplex polish rounds.  Parametrization: per-segment controls
// (clamped to [-1,1]), non-negative duration weights, and a total-time factor
// sigma in (0, sigma_max], so every candidate schedule is admissible with
// total duration strictly below the horizon by construction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "chronoreach/flow.hpp"
#include "chronoreach/rng.hpp"

namespace chronoreach {

struct SteerConfig {
    int p = 4;                // schedule segments
    int restarts = 8;         // optimizer starts (first one canonical, rest seeded)
    int max_iters = 250;      // simplex iterations per start
    int polish_rounds = 2;    // re-descents from the best point with shrunken simplex
    double step = 1e-3;       // integrator step
    double sigma_max = 0.99;  // total duration <= sigma_max * horizon
    double target_tol = 0.0;  // stop restarting once distance <= target_tol
    std::uint64_t seed = 0;
    std::vector<double> warm;  // optional parameter-vector start tried before all restarts
};

struct SteerResult {
    std::vector<double> target;
    std::vector<double> endpoint;
    double distance = 0.0;
    Schedule schedule;
    long iterations = 0;        // objective evaluations across all restarts
    std::vector<double> theta;  // best parameter vector (reusable as warm start)
};

namespace detail {

// Decodes a parameter vector into an admissible schedule.
inline Schedule decode_schedule(const std::vector<double>& theta, int m, int p, double horizon,
                                double sigma_max) {
    Schedule sched;
    double wsum = 0.0;
    for (int j = 0; j < p; ++j) wsum += std::abs(theta[static_cast<std::size_t>(m * p + j)]) + 1e-12;
    const double raw = std::abs(theta[static_cast<std::size_t>(m * p + p)]);
    const double sigma = sigma_max * std::clamp(raw, 1e-12, 1.0);
    for (int j = 0; j < p; ++j) {
        Segment seg;
        seg.control.resize(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i)
            seg.control[static_cast<std::size_t>(i)] =
                std::clamp(theta[static_cast<std::size_t>(j * m + i)], -1.0, 1.0);
        const double w = std::abs(theta[static_cast<std::size_t>(m * p + j)]) + 1e-12;
        seg.duration = sigma * horizon * w / wsum;
        sched.segments.push_back(std::move(seg));
    }
    return sched;
}

}  // namespace detail

// Parameter vector that decode_schedule maps back to `sched`: controls are
// copied, duration weights are the durations themselves, sigma is recovered
// from the total.  Schedules shorter than p are padded with zero-weight
// segments.  Lets a sampled schedule warm-start the optimizer.
inline std::vector<double> theta_from_schedule(const Schedule& sched, int m, int p, double horizon,
                                               double sigma_max) {
    if (p < 1 || m < 0 || !(horizon > 0)) throw InputError("theta_from_schedule: bad arguments");
    std::vector<double> theta(static_cast<std::size_t>(m * p + p + 1), 0.0);
    const int q = std::min(p, static_cast<int>(sched.segments.size()));
    double total = 0.0;
    for (const Segment& s : sched.segments) total += s.duration;
    for (int j = 0; j < q; ++j) {
        const Segment& s = sched.segments[static_cast<std::size_t>(j)];
        for (int i = 0; i < m; ++i)
            theta[static_cast<std::size_t>(j * m + i)] = s.control[static_cast<std::size_t>(i)];
        theta[static_cast<std::size_t>(m * p + j)] =
            total > 0.0 ? s.duration / total : 1.0 / static_cast<double>(p);
    }
    theta[static_cast<std::size_t>(m * p + p)] =
        std::clamp(total / (sigma_max * horizon), 1e-9, 1.0);
    return theta;
}

namespace detail {

// Standard Nelder-Mead descent from `start`; returns the best point found.
template <typename Objective>
std::pair<std::vector<double>, double> nelder_mead(const Objective& objective,
                                                   const std::vector<double>& start,
                                                   double init_step, int max_iters) {
    const int dim = static_cast<int>(start.size());
    std::vector<std::vector<double>> simplex(static_cast<std::size_t>(dim) + 1, start);
    std::vector<double> fvals(static_cast<std::size_t>(dim) + 1);
    for (int i = 0; i < dim; ++i)
        simplex[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(i)] += init_step;
    for (std::size_t i = 0; i < simplex.size(); ++i) fvals[i] = objective(simplex[i]);

    std::vector<std::size_t> order(simplex.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto sort_order = [&] {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
    };

    for (int iter = 0; iter < max_iters; ++iter) {
        sort_order();
        const std::size_t lo = order.front(), hi = order.back();
        const std::size_t second_hi = order[order.size() - 2];
        if (fvals[hi] - fvals[lo] < 1e-16 * (1.0 + std::abs(fvals[lo]))) break;

        std::vector<double> centroid(static_cast<std::size_t>(dim), 0.0);
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (order[i] == hi) continue;
            for (int d = 0; d < dim; ++d)
                centroid[static_cast<std::size_t>(d)] += simplex[order[i]][static_cast<std::size_t>(d)];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        const auto blend = [&](double coef) {
            std::vector<double> out(static_cast<std::size_t>(dim));
            for (int d = 0; d < dim; ++d)
                out[static_cast<std::size_t>(d)] =
                    centroid[static_cast<std::size_t>(d)] +
                    coef * (centroid[static_cast<std::size_t>(d)] -
                            simplex[hi][static_cast<std::size_t>(d)]);
            return out;
        };

        std::vector<double> refl = blend(1.0);
        const double f_refl = objective(refl);
        if (f_refl < fvals[lo]) {
            std::vector<double> expd = blend(2.0);
            const double f_expd = objective(expd);
            if (f_expd < f_refl) {
                simplex[hi] = std::move(expd);
                fvals[hi] = f_expd;
            } else {
                simplex[hi] = std::move(refl);
                fvals[hi] = f_refl;
            }
        } else if (f_refl < fvals[second_hi]) {
            simplex[hi] = std::move(refl);
            fvals[hi] = f_refl;
        } else {
            const bool outside = f_refl < fvals[hi];
            std::vector<double> contr = blend(outside ? 0.5 : -0.5);
            const double f_contr = objective(contr);
            if (f_contr < std::min(f_refl, fvals[hi])) {
                simplex[hi] = std::move(contr);
                fvals[hi] = f_contr;
            } else {
                for (std::size_t i = 0; i < simplex.size(); ++i) {
                    if (i == lo) continue;
                    for (int d = 0; d < dim; ++d)
                        simplex[i][static_cast<std::size_t>(d)] =
                            simplex[lo][static_cast<std::size_t>(d)] +
                            0.5 * (simplex[i][static_cast<std::size_t>(d)] -
                                   simplex[lo][static_cast<std::size_t>(d)]);
                    fvals[i] = objective(simplex[i]);
                }
            }
        }
    }
    sort_order();
    return {simplex[order.front()], fvals[order.front()]};
}

}  // namespace detail

inline SteerResult steer_to(const CompiledSystem& csys, const std::vector<double>& x0,
                            const std::vector<double>& target, double horizon,
                            const SteerConfig& cfg = {}) {
    if (!(horizon > 0)) throw InputError("steer_to: horizon must be > 0");
    if (static_cast<int>(x0.size()) != csys.dim || static_cast<int>(target.size()) != csys.dim)
        throw InputError("steer_to: dimension mismatch");
    const int m = csys.m;
    const int p = cfg.p;
    const int dim = m * p + p + 1;

    FlowOptions fopt;
    fopt.step = cfg.step;

    long evals = 0;
    const auto objective = [&](const std::vector<double>& theta) -> double {
        ++evals;
        const Schedule sched = detail::decode_schedule(theta, m, p, horizon, cfg.sigma_max);
        try {
            const FlowResult r = flow_numeric(csys, sched, x0, fopt);
            double sq = 0.0;
            for (int i = 0; i < csys.dim; ++i) {
                const double d =
                    r.endpoint[static_cast<std::size_t>(i)] - target[static_cast<std::size_t>(i)];
                sq += d * d;
            }
            return std::sqrt(sq);
        } catch (const BlowupError&) {
            return 1e18;  // inadmissible region; steer away
        }
    };

    std::vector<double> best_theta(static_cast<std::size_t>(dim), 0.0);
    double best_f = std::numeric_limits<double>::infinity();

    if (static_cast<int>(cfg.warm.size()) == dim) {
        auto [theta, f] = detail::nelder_mead(objective, cfg.warm, 0.02, cfg.max_iters);
        best_f = f;
        best_theta = std::move(theta);
    }

    for (int restart = 0; restart < cfg.restarts; ++restart) {
        if (cfg.target_tol > 0.0 && best_f <= cfg.target_tol) break;
        std::vector<double> start(static_cast<std::size_t>(dim));
        if (restart == 0) {
            for (int j = 0; j < p; ++j) start[static_cast<std::size_t>(m * p + j)] = 1.0;
            start[static_cast<std::size_t>(m * p + p)] = 0.5;
        } else {
            Rng rng(derive_seed(cfg.seed, 0x57ee7u, static_cast<std::uint64_t>(restart)));
            for (int i = 0; i < m * p; ++i) start[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
            for (int j = 0; j < p; ++j) start[static_cast<std::size_t>(m * p + j)] = rng.uniform(0.1, 1.0);
            start[static_cast<std::size_t>(m * p + p)] = rng.uniform(0.05, 1.0);
        }
        auto [theta, f] = detail::nelder_mead(objective, start, 0.25, cfg.max_iters);
        if (f < best_f) {
            best_f = f;
            best_theta = std::move(theta);
        }
        if (cfg.target_tol > 0.0 && best_f <= cfg.target_tol) break;
    }

    // Shrinking-simplex polish from the best point for high-precision landings.
    double polish_step = 0.02;
    const bool already_good = cfg.target_tol > 0.0 && best_f <= cfg.target_tol;
    for (int round = 0; round < cfg.polish_rounds && best_f < 1e17 && !already_good; ++round) {
        auto [theta, f] = detail::nelder_mead(objective, best_theta, polish_step, cfg.max_iters);
        if (f < best_f) {
            best_f = f;
            best_theta = std::move(theta);
        }
        polish_step *= 0.1;
    }

    SteerResult res;
    res.target = target;
    res.schedule = detail::decode_schedule(best_theta, m, p, horizon, cfg.sigma_max);
    try {
        res.endpoint = flow_numeric(csys, res.schedule, x0, fopt).endpoint;
    } catch (const BlowupError&) {
        res.endpoint = x0;  // every start blew up; report the failure distance honestly
    }
    res.distance = best_f;
    res.iterations = evals;
    res.theta = std::move(best_theta);
    return res;
}

inline SteerResult steer_to(const ControlSystem& sys, const std::vector<double>& x0,
                            const std::vector<double>& target, double horizon,
                            const SteerConfig& cfg = {}) {
    return steer_to(CompiledSystem(sys), x0, target, horizon, cfg);
}

}  // namespace chronoreach
