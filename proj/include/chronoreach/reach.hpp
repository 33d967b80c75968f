#pragma once

// Empirical reachable sets: seeded schedule sampling, direction grids,
// ball-coverage measurement, and support-function calibration of growth
// constants.  Every draw derives its own seed from (base seed, index), so
// samples are reproducible and prefixes are stable as counts grow.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "chronoreach/format.hpp"
#include "chronoreach/parallel.hpp"
#include "chronoreach/steer.hpp"

namespace chronoreach {

enum class SampleMode { BangBang, Uniform };

struct SampleConfig {
    int count = 1000;
    int p = 3;  // segments per schedule
    std::uint64_t seed = 0;
    SampleMode mode = SampleMode::BangBang;
    double step = 1e-3;
    double sigma_max = 0.99;  // total duration <= sigma_max * horizon (strictly < t)
    int jobs = 1;
};

struct ReachPoint {
    std::vector<double> endpoint;
    Schedule schedule;
};

struct ReachSample {
    std::vector<double> x0;
    double t = 0.0;
    SampleConfig config;
    std::vector<ReachPoint> points;

    std::string to_csv(int dim) const {
        std::string out = "idx";
        for (int i = 1; i <= dim; ++i) out += ",x_" + std::to_string(i);
        out += ",schedule\n";
        for (std::size_t idx = 0; idx < points.size(); ++idx) {
            out += std::to_string(idx);
            for (double v : points[idx].endpoint) {
                out += ',';
                out += fmt_double(v);
            }
            out += ",\"" + format_schedule(points[idx].schedule) + "\"\n";
        }
        return out;
    }
};

namespace detail {

inline Schedule draw_schedule(Rng& rng, int m, int p, double t, SampleMode mode, double sigma_max) {
    Schedule sched;
    std::vector<double> w(static_cast<std::size_t>(p));
    double wsum = 0.0;
    for (double& x : w) {
        x = rng.unit() + 1e-12;
        wsum += x;
    }
    const double sigma = rng.uniform(0.01, sigma_max);
    for (int j = 0; j < p; ++j) {
        Segment seg;
        seg.control.resize(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i)
            seg.control[static_cast<std::size_t>(i)] =
                mode == SampleMode::BangBang
                    ? static_cast<double>(static_cast<long>(rng.uniform_int(0, 2)) - 1)
                    : rng.uniform(-1.0, 1.0);
        seg.duration = sigma * t * w[static_cast<std::size_t>(j)] / wsum;
        sched.segments.push_back(std::move(seg));
    }
    return sched;
}

}  // namespace detail

inline ReachSample sample_reachable(const CompiledSystem& csys, const std::vector<double>& x0,
                                    double t, const SampleConfig& cfg) {
    if (!(t > 0)) throw InputError("sample_reachable: horizon must be > 0");
    if (cfg.count < 1 || cfg.p < 1) throw InputError("sample_reachable: count and p must be >= 1");
    if (static_cast<int>(x0.size()) != csys.dim)
        throw InputError("sample_reachable: basepoint dimension mismatch");

    ReachSample sample;
    sample.x0 = x0;
    sample.t = t;
    sample.config = cfg;
    sample.points.resize(static_cast<std::size_t>(cfg.count));

    FlowOptions fopt;
    fopt.step = cfg.step;
    parallel_for(static_cast<std::size_t>(cfg.count), cfg.jobs, [&](std::size_t idx) {
        // One seed per (index, attempt); draws that blow up are redrawn.
        for (std::uint64_t attempt = 0;; ++attempt) {
            Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(idx), attempt));
            Schedule sched = detail::draw_schedule(rng, csys.m, cfg.p, t, cfg.mode, cfg.sigma_max);
            try {
                FlowResult r = flow_numeric(csys, sched, x0, fopt);
                sample.points[idx] = {std::move(r.endpoint), std::move(sched)};
                return;
            } catch (const BlowupError&) {
                if (attempt >= 32) {
                    Schedule zero;  // give up: hold the basepoint
                    sample.points[idx] = {x0, std::move(zero)};
                    return;
                }
            }
        }
    });
    return sample;
}

inline ReachSample sample_reachable(const ControlSystem& sys, const std::vector<double>& x0,
                                    double t, const SampleConfig& cfg) {
    return sample_reachable(CompiledSystem(sys), x0, t, cfg);
}

// D unit directions: exhaustive signs in 1-D, uniform circle in 2-D, Fibonacci
// sphere in 3-D, seeded gaussian draws above.
inline std::vector<std::vector<double>> unit_directions(int n, int count, std::uint64_t seed) {
    if (n < 1 || count < 1) throw InputError("unit_directions: bad arguments");
    std::vector<std::vector<double>> dirs;
    dirs.reserve(static_cast<std::size_t>(count));
    if (n == 1) {
        for (int i = 0; i < count; ++i) dirs.push_back({i % 2 == 0 ? 1.0 : -1.0});
    } else if (n == 2) {
        for (int i = 0; i < count; ++i) {
            const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(count);
            dirs.push_back({std::cos(a), std::sin(a)});
        }
    } else if (n == 3) {
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double a = golden * static_cast<double>(i);
            dirs.push_back({r * std::cos(a), r * std::sin(a), z});
        }
    } else {
        Rng rng(derive_seed(seed, 0xd12u, 0));
        for (int i = 0; i < count; ++i) {
            std::vector<double> d(static_cast<std::size_t>(n));
            double norm = 0.0;
            do {
                norm = 0.0;
                for (double& x : d) {
                    x = rng.gaussian();
                    norm += x * x;
                }
            } while (norm < 1e-12);
            norm = std::sqrt(norm);
            for (double& x : d) x /= norm;
            dirs.push_back(std::move(d));
        }
    }
    return dirs;
}

struct CoverageResult {
    double fraction = 0.0;
    std::vector<std::vector<double>> directions;
    std::vector<int> uncovered;  // indices into directions
};

// A direction d is covered when some endpoint lies within delta*radius of
// x0 + radius*d.  radius 0 is covered by the zero-duration schedule at x0.
inline CoverageResult ball_coverage(const ReachSample& sample, const std::vector<double>& x0,
                                    double radius, std::vector<std::vector<double>> directions,
                                    double delta) {
    if (radius < 0) throw InputError("ball_coverage: radius must be >= 0");
    if (sample.points.empty()) throw InputError("ball_coverage: empty sample");
    const int n = static_cast<int>(x0.size());
    CoverageResult res;
    res.directions = std::move(directions);
    if (radius == 0.0) {
        res.fraction = 1.0;
        return res;
    }
    const double tol2 = delta * radius * delta * radius;
    int covered = 0;
    for (std::size_t di = 0; di < res.directions.size(); ++di) {
        const auto& d = res.directions[di];
        bool hit = false;
        for (const ReachPoint& pt : sample.points) {
            double sq = 0.0;
            for (int i = 0; i < n; ++i) {
                const double diff = pt.endpoint[static_cast<std::size_t>(i)] -
                                    (x0[static_cast<std::size_t>(i)] +
                                     radius * d[static_cast<std::size_t>(i)]);
                sq += diff * diff;
                if (sq > tol2) break;
            }
            if (sq <= tol2) {
                hit = true;
                break;
            }
        }
        if (hit)
            ++covered;
        else
            res.uncovered.push_back(static_cast<int>(di));
    }
    res.fraction = static_cast<double>(covered) / static_cast<double>(res.directions.size());
    return res;
}

inline CoverageResult ball_coverage(const ReachSample& sample, const std::vector<double>& x0,
                                    double radius, int direction_count, double delta,
                                    std::uint64_t seed) {
    return ball_coverage(sample, x0, radius,
                         unit_directions(static_cast<int>(x0.size()), direction_count, seed), delta);
}

// Largest directional advance of the sample: max over endpoints of <e-x0, d>.
inline double directional_support(const ReachSample& sample, const std::vector<double>& x0,
                                  const std::vector<double>& d) {
    double best = -std::numeric_limits<double>::infinity();
    for (const ReachPoint& pt : sample.points) {
        double dot = 0.0;
        for (std::size_t i = 0; i < x0.size(); ++i)
            dot += (pt.endpoint[i] - x0[i]) * d[i];
        best = std::max(best, dot);
    }
    return best;
}

// Largest radius covered by the sample in direction d: max over endpoints of
// the biggest c with ||e - (x0 + c*d)|| <= delta*c (the same tolerance cone
// ball_coverage uses).  0 when no endpoint lands in the direction's cone.
inline double directional_covered_radius(const ReachSample& sample, const std::vector<double>& x0,
                                         const std::vector<double>& d, double delta) {
    double best = 0.0;
    const double one_minus_d2 = 1.0 - delta * delta;
    for (const ReachPoint& pt : sample.points) {
        double along = 0.0, norm2 = 0.0;
        for (std::size_t i = 0; i < x0.size(); ++i) {
            const double diff = pt.endpoint[i] - x0[i];
            along += diff * d[i];
            norm2 += diff * diff;
        }
        if (along <= 0.0) continue;
        const double perp2 = std::max(0.0, norm2 - along * along);
        const double disc = delta * delta * along * along - one_minus_d2 * perp2;
        if (disc < 0.0) continue;
        best = std::max(best, (along + std::sqrt(disc)) / one_minus_d2);
    }
    return best;
}

struct CalibrationConfig {
    std::size_t budget = 100000;  // schedules integrated (grid strata + seeded fill)
    int p_max = 4;
    double delta = 0.05;     // cone tolerance, matches ball_coverage
    double sigma_max = 0.99;
    double step = 1e-3;
    std::uint64_t seed = 0;
    int jobs = 1;
};

struct GrowthCalibration {
    double C = 0.0;                   // 0.5 * min_axis covered_radius / t^N
    double min_ratio = 0.0;
    int worst_axis = -1;              // 2*i is +e_{i+1}, 2*i+1 is -e_{i+1}
    std::vector<double> axis_radius;  // cone-covered radius per signed axis
    std::size_t evaluated = 0;        // endpoints integrated (blow-ups excluded)
    bool degenerate = false;          // some axis cone never reached
    std::string diagnostic;
};

namespace detail {

// Grid cell of the calibration oracle: p segments, per-segment controls from
// {-1,0,+1}^m encoded base-3 in pattern, durations sigma_max*t*w/sum(w) with
// dyadic weights w in {1,2}^p encoded bitwise in wmask.
inline Schedule decode_calibration_schedule(int m, int p, std::uint64_t pattern,
                                            std::uint64_t wmask, double t, double sigma_max) {
    Schedule sched;
    sched.segments.resize(static_cast<std::size_t>(p));
    double wsum = 0.0;
    for (int j = 0; j < p; ++j) wsum += (wmask >> j & 1u) ? 2.0 : 1.0;
    for (int j = 0; j < p; ++j) {
        Segment& seg = sched.segments[static_cast<std::size_t>(j)];
        seg.control.resize(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            seg.control[static_cast<std::size_t>(i)] = static_cast<double>(pattern % 3) - 1.0;
            pattern /= 3;
        }
        seg.duration = sigma_max * t * ((wmask >> j & 1u) ? 2.0 : 1.0) / wsum;
    }
    return sched;
}

}  // namespace detail

// Empirical growth constant at a reference horizon: brute-force the bang-bang
// schedule grid (all control patterns, dyadic duration splits; equal-duration
// strata exhaustively, the rest seeded-sampled up to the budget), take per
// signed axis the largest cone-covered radius, and set C to half the worst
// axis ratio r/t^N.  Random endpoint clouds systematically miss thin cones
// around axes that need closed-loop maneuvers, so the grid — which contains
// every canonical loop pattern — is what makes the worst axis measurable.
inline GrowthCalibration calibrate_growth_constant(const ControlSystem& sys,
                                                   const std::vector<double>& x0, int N, double t,
                                                   const CalibrationConfig& cfg = {}) {
    if (N < 1) throw InputError("calibrate_growth_constant: N must be >= 1");
    if (!(t > 0)) throw InputError("calibrate_growth_constant: t must be > 0");
    if (cfg.p_max < 1 || cfg.budget == 0) throw InputError("calibrate_growth_constant: empty budget");
    const CompiledSystem csys(sys);
    const int n = csys.dim, m = csys.m;
    if (static_cast<int>(x0.size()) != n) throw InputError("calibrate_growth_constant: basepoint dim");
    if (m < 1) throw InputError("calibrate_growth_constant: system has no controls");
    if (m * cfg.p_max > 30 || cfg.p_max > 12)
        throw InputError("calibrate_growth_constant: control pattern space too large");

    // Strata in fill order: equal-duration cells for each p, then dyadic-split
    // cells.  A stratum that no longer fits the budget is sampled, not cut.
    struct Stratum {
        int p;
        bool weighted;
        std::uint64_t size;
    };
    std::vector<Stratum> strata;
    for (int phase = 0; phase < 2; ++phase)
        for (int p = 1; p <= cfg.p_max; ++p) {
            std::uint64_t patterns = 1;
            for (int i = 0; i < m * p; ++i) patterns *= 3;
            const std::uint64_t wcount = phase == 0 ? 1 : (std::uint64_t{1} << p) - 1;
            strata.push_back({p, phase == 1, patterns * wcount});
        }

    struct Candidate {
        int p;
        std::uint64_t pattern, wmask;
    };
    std::vector<Candidate> cand;
    cand.reserve(cfg.budget);
    Rng fill_rng(derive_seed(cfg.seed, 0xca11b, 0));
    for (const Stratum& st : strata) {
        if (cand.size() >= cfg.budget) break;
        const std::uint64_t room = cfg.budget - cand.size();
        std::uint64_t patterns = 1;
        for (int i = 0; i < m * st.p; ++i) patterns *= 3;
        if (st.size <= room) {
            for (std::uint64_t idx = 0; idx < st.size; ++idx)
                cand.push_back({st.p, idx % patterns, st.weighted ? 1 + idx / patterns : 0});
        } else {
            for (std::uint64_t d = 0; d < room; ++d) {
                const std::uint64_t idx = fill_rng.uniform_int(0, st.size - 1);
                cand.push_back({st.p, idx % patterns, st.weighted ? 1 + idx / patterns : 0});
            }
        }
    }

    // Integrate in parallel, reduce serially: endpoint order is fixed by the
    // candidate list, so the result is independent of the job count.
    std::vector<std::vector<double>> endpoints(cand.size());
    FlowOptions fopt;
    fopt.step = cfg.step;
    parallel_for(cand.size(), cfg.jobs, [&](std::size_t ci) {
        const Candidate& c = cand[ci];
        Schedule sched =
            detail::decode_calibration_schedule(m, c.p, c.pattern, c.wmask, t, cfg.sigma_max);
        try {
            endpoints[ci] = flow_numeric(csys, sched, x0, fopt).endpoint;
        } catch (const BlowupError&) {
        }
    });

    GrowthCalibration cal;
    cal.axis_radius.assign(static_cast<std::size_t>(2 * n), 0.0);
    const double one_minus_d2 = 1.0 - cfg.delta * cfg.delta;
    for (const std::vector<double>& e : endpoints) {
        if (e.empty()) continue;
        ++cal.evaluated;
        double norm2 = 0.0;
        for (int i = 0; i < n; ++i) norm2 += (e[i] - x0[i]) * (e[i] - x0[i]);
        for (int ax = 0; ax < 2 * n; ++ax) {
            const double diff = e[static_cast<std::size_t>(ax / 2)] - x0[static_cast<std::size_t>(ax / 2)];
            const double along = ax % 2 ? -diff : diff;
            if (along <= 0.0) continue;
            const double perp2 = std::max(0.0, norm2 - along * along);
            const double disc = cfg.delta * cfg.delta * along * along - one_minus_d2 * perp2;
            if (disc < 0.0) continue;
            double& best = cal.axis_radius[static_cast<std::size_t>(ax)];
            best = std::max(best, (along + std::sqrt(disc)) / one_minus_d2);
        }
    }
    double worst = std::numeric_limits<double>::infinity();
    for (int ax = 0; ax < 2 * n; ++ax)
        if (cal.axis_radius[static_cast<std::size_t>(ax)] < worst) {
            worst = cal.axis_radius[static_cast<std::size_t>(ax)];
            cal.worst_axis = ax;
        }
    cal.min_ratio = worst / std::pow(t, N);
    cal.C = 0.5 * cal.min_ratio;
    if (worst <= 0.0) {
        cal.degenerate = true;
        std::string axes;
        for (int ax = 0; ax < 2 * n; ++ax)
            if (cal.axis_radius[static_cast<std::size_t>(ax)] <= 0.0)
                axes += std::string(axes.empty() ? "" : ",") + (ax % 2 ? "-e" : "+e") +
                        std::to_string(ax / 2 + 1);
        cal.diagnostic = "no schedule reached the tolerance cone of axis " + axes +
                         "; constant calibrated to 0";
    }
    return cal;
}

}  // namespace chronoreach
