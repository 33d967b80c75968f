#pragma once

// Truncation-error measurement: distance between the numeric flow and the
// truncated symbolic flow, log-log order fits, and a dominating (M, L) fit
// to the bound form L*M*t^(k+1)/(1 - M*t).

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "chronoreach/chrono.hpp"
#include "chronoreach/flow.hpp"
#include "chronoreach/format.hpp"

namespace chronoreach {

// Euclidean distance between the numeric endpoint and the order-k symbolic
// flow evaluated at the given durations.
inline double picard_error(const ControlSystem& sys,
                           const std::vector<std::vector<Rational>>& controls,
                           const std::vector<Rational>& durations,
                           const std::vector<Rational>& x0, int k,
                           double step = 1e-3) {
    if (durations.size() != controls.size())
        throw InputError("controls/durations length mismatch");
    const FlowPolynomial fp = truncated_flow(sys, controls, k, x0);
    const std::vector<Rational> sym = fp.eval_exact(durations);

    Schedule sched;
    for (std::size_t j = 0; j < controls.size(); ++j) {
        Segment seg;
        for (const Rational& u : controls[j]) seg.control.push_back(to_double(u));
        seg.duration = to_double(durations[j]);
        sched.segments.push_back(std::move(seg));
    }
    std::vector<double> start(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) start[i] = to_double(x0[i]);
    FlowOptions opt;
    opt.step = step;
    const FlowResult num = flow_numeric(sys, sched, start, opt);

    double sq = 0.0;
    for (int i = 0; i < sys.dim; ++i) {
        const double d = num.endpoint[static_cast<std::size_t>(i)] -
                         to_double(sym[static_cast<std::size_t>(i)]);
        sq += d * d;
    }
    return std::sqrt(sq);
}

// Bound form from the fit: L * M * t^(k+1) / (1 - M*t); +inf once M*t >= 1.
inline double picard_bound(double M, double L, int k, double t) {
    const double denom = 1.0 - M * t;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return L * M * std::pow(t, k + 1) / denom;
}

struct PicardFitPoint {
    int k = 0;
    double t = 0.0;
    double error = 0.0;
    double bound = 0.0;
};

struct PicardFitSlope {
    int k = 0;
    double slope = 0.0;
    double residual = 0.0;  // RMS of log-log fit residuals
    int usable_points = 0;  // points above the noise floor
};

struct PicardFitReport {
    std::vector<PicardFitPoint> points;  // ordered by (k asc, t asc)
    std::vector<PicardFitSlope> slopes;
    double M = 0.0;
    double L = 0.0;
    bool degenerate = false;  // no errors above the noise floor
    bool dominated = false;   // every usable error <= fitted bound
    double noise_floor = 0.0;
    std::string diagnostic;

    std::string to_csv() const {
        std::string out = "k,t,error,bound\n";
        for (const PicardFitPoint& p : points) {
            out += std::to_string(p.k);
            out += ',';
            out += fmt_double(p.t);
            out += ',';
            out += fmt_double(p.error);
            out += ',';
            out += fmt_double(p.bound);
            out += '\n';
        }
        return out;
    }
};

namespace detail {

// Least-squares line through (xs, ys); returns {slope, intercept, rms}.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    LineFit out;
    const std::size_t n = xs.size();
    if (n < 2) return out;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) return out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (out.intercept + out.slope * xs[i]);
        sq += r * r;
    }
    out.rms = std::sqrt(sq / static_cast<double>(n));
    return out;
}

}  // namespace detail

// Measures picard_error over orders x times (total time split equally across
// the segments), fits per-order log-log slopes, and fits a single (M, L)
// minimizing squared log-residuals subject to bound >= error on every point
// above the noise floor (L is the smallest dominating value for each M).
inline PicardFitReport picard_fit(const ControlSystem& sys,
                                  const std::vector<std::vector<Rational>>& controls,
                                  const std::vector<Rational>& x0,
                                  const std::vector<int>& orders,
                                  const std::vector<Rational>& times,
                                  double step = 1e-3,
                                  double noise_floor = 1e-11) {
    if (orders.empty() || times.empty()) throw InputError("picard_fit needs orders and times");
    PicardFitReport rep;
    rep.noise_floor = noise_floor;

    const std::size_t p = controls.size();
    double max_t = 0.0;
    for (const int k : orders) {
        PicardFitSlope sl;
        sl.k = k;
        std::vector<double> lx, ly;
        for (const Rational& t : times) {
            std::vector<Rational> durations(p, t / static_cast<long>(p));
            PicardFitPoint pt;
            pt.k = k;
            pt.t = to_double(t);
            pt.error = picard_error(sys, controls, durations, x0, k, step);
            max_t = std::max(max_t, pt.t);
            rep.points.push_back(pt);
            if (pt.error > noise_floor) {
                ++sl.usable_points;
                lx.push_back(std::log(pt.t));
                ly.push_back(std::log(pt.error));
            }
        }
        const detail::LineFit lf = detail::fit_line(lx, ly);
        sl.slope = lf.slope;
        sl.residual = lf.rms;
        rep.slopes.push_back(sl);
    }

    // Usable points for the joint (M, L) fit.
    std::vector<int> uk;
    std::vector<double> ut, ulerr;
    for (const PicardFitPoint& pt : rep.points) {
        if (pt.error > noise_floor) {
            uk.push_back(pt.k);
            ut.push_back(pt.t);
            ulerr.push_back(std::log(pt.error));
        }
    }
    if (uk.empty()) {
        rep.degenerate = true;
        rep.diagnostic = "all errors at or below the noise floor; bound fit skipped";
        return rep;
    }

    // For fixed M the log-bound is base_i(M) + log L; the smallest dominating
    // L has log L = max_i(log err_i - base_i).  Scan M geometrically, refine.
    const auto objective = [&](double M, double& logL) {
        double mx = -std::numeric_limits<double>::infinity();
        std::vector<double> base(uk.size());
        for (std::size_t i = 0; i < uk.size(); ++i) {
            const double denom = 1.0 - M * ut[i];
            if (denom <= 0.0) return std::numeric_limits<double>::infinity();
            base[i] = std::log(M) + (uk[i] + 1) * std::log(ut[i]) - std::log(denom);
            mx = std::max(mx, ulerr[i] - base[i]);
        }
        logL = mx;
        double sq = 0.0;
        for (std::size_t i = 0; i < uk.size(); ++i) {
            const double r = (mx + base[i]) - ulerr[i];
            sq += r * r;
        }
        return sq;
    };

    double m_lo = 1e-3, m_hi = 0.99 / max_t;
    double best_m = m_lo, best_logl = 0.0;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < 2; ++pass) {
        const int steps = 400;
        const double ratio = std::pow(m_hi / m_lo, 1.0 / steps);
        double prev_m = best_m, next_m = best_m;
        for (int i = 0; i <= steps; ++i) {
            const double M = m_lo * std::pow(ratio, i);
            double logL = 0.0;
            const double obj = objective(M, logL);
            if (obj < best_obj) {
                best_obj = obj;
                best_m = M;
                best_logl = logL;
                prev_m = m_lo * std::pow(ratio, std::max(0, i - 1));
                next_m = m_lo * std::pow(ratio, std::min(steps, i + 1));
            }
        }
        m_lo = prev_m;
        m_hi = next_m;
    }
    rep.M = best_m;
    rep.L = std::exp(best_logl);

    rep.dominated = true;
    for (PicardFitPoint& pt : rep.points) {
        pt.bound = picard_bound(rep.M, rep.L, pt.k, pt.t);
        if (pt.error > noise_floor && pt.error > pt.bound * (1.0 + 1e-9))
            rep.dominated = false;
    }
    return rep;
}

}  // namespace chronoreach
