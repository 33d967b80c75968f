#pragma once

// Ball-coverage growth test: at each horizon t the ball of radius C*t^N
// around the basepoint must be covered by reachable endpoints, with steering
// refinement for directions the raw sample misses.

#include <string>
#include <vector>

#include "chronoreach/reach.hpp"

namespace chronoreach {

struct GrowthConfig {
    SampleConfig sampler;
    int directions = 150;
    double delta = 0.05;     // relative coverage tolerance
    bool refine = true;      // steer toward uncovered targets
    SteerConfig steer;
    std::uint64_t seed = 0;  // master seed; sampler/steer seeds derive from it
    int jobs = 1;
};

struct GrowthEntry {
    double t = 0.0;
    double radius = 0.0;
    double coverage = 0.0;
    int sample_covered = 0;  // directions covered before refinement
    int steer_covered = 0;   // recovered by steering
};

struct GrowthReport {
    int N = 0;
    double C = 0.0;
    double delta = 0.0;
    int directions = 0;
    std::vector<GrowthEntry> entries;

    bool passes(double threshold) const {
        for (const GrowthEntry& e : entries)
            if (e.coverage < threshold) return false;
        return !entries.empty();
    }

    std::string to_csv() const {
        std::string out = "t,radius,coverage\n";
        for (const GrowthEntry& e : entries) {
            out += fmt_double(e.t);
            out += ',';
            out += fmt_double(e.radius);
            out += ',';
            out += fmt_double(e.coverage);
            out += '\n';
        }
        return out;
    }
};

inline GrowthReport growth_rate_test(const ControlSystem& sys, const std::vector<double>& x0,
                                     int N, double C, const std::vector<double>& times,
                                     const GrowthConfig& cfg) {
    if (N < 1) throw InputError("growth_rate_test: N must be >= 1");
    if (C < 0) throw InputError("growth_rate_test: C must be >= 0");
    const CompiledSystem csys(sys);

    GrowthReport rep;
    rep.N = N;
    rep.C = C;
    rep.delta = cfg.delta;
    rep.directions = cfg.directions;

    // One direction set for the whole grid so each direction can reuse its
    // best steering parameters from the previous (larger) horizon: durations
    // are horizon-relative, so a carried vector lands near the rescaled
    // target, which is what makes small-t refinement converge.
    const auto directions =
        unit_directions(static_cast<int>(x0.size()), cfg.directions, derive_seed(cfg.seed, 2, 0));
    std::vector<std::vector<double>> carry(directions.size());

    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const double t = times[ti];
        GrowthEntry entry;
        entry.t = t;
        entry.radius = C * std::pow(t, N);

        SampleConfig scfg = cfg.sampler;
        scfg.seed = derive_seed(cfg.seed, 1, ti);
        scfg.jobs = cfg.jobs;
        const ReachSample sample = sample_reachable(csys, x0, t, scfg);
        const CoverageResult cov = ball_coverage(sample, x0, entry.radius, directions, cfg.delta);
        entry.sample_covered = cfg.directions - static_cast<int>(cov.uncovered.size());

        int recovered = 0;
        if (cfg.refine && entry.radius > 0.0 && !cov.uncovered.empty()) {
            std::vector<int> hit(cov.uncovered.size(), 0);
            std::vector<std::vector<double>> found(cov.uncovered.size());
            parallel_for(cov.uncovered.size(), cfg.jobs, [&](std::size_t ui) {
                const int di = cov.uncovered[ui];
                const auto& d = directions[static_cast<std::size_t>(di)];
                std::vector<double> target(x0.size());
                for (std::size_t i = 0; i < x0.size(); ++i)
                    target[i] = x0[i] + entry.radius * d[i];
                SteerConfig stc = cfg.steer;
                stc.step = cfg.sampler.step;
                stc.target_tol = cfg.delta * entry.radius;
                stc.seed = derive_seed(cfg.seed, 3, ti * 100003 + static_cast<std::uint64_t>(di));
                stc.warm = carry[static_cast<std::size_t>(di)];
                const SteerResult sr = steer_to(csys, x0, target, t, stc);
                hit[ui] = sr.distance <= cfg.delta * entry.radius ? 1 : 0;
                found[ui] = sr.theta;
            });
            for (std::size_t ui = 0; ui < cov.uncovered.size(); ++ui) {
                recovered += hit[ui];
                carry[static_cast<std::size_t>(cov.uncovered[ui])] = std::move(found[ui]);
            }
        }
        entry.steer_covered = recovered;
        entry.coverage = (static_cast<double>(entry.sample_covered) + static_cast<double>(recovered)) /
                         static_cast<double>(cfg.directions);
        rep.entries.push_back(entry);
    }
    return rep;
}

}  // namespace chronoreach
