#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chronoreach/system.hpp"

namespace chronoreach {

struct BlowupError : std::runtime_error {
    int segment;
    double time;
    BlowupError(int segment_, double time_)
        : std::runtime_error("state norm exceeded blow-up cap in segment " + std::to_string(segment_) +
                             " at t=" + std::to_string(time_)),
          segment(segment_),
          time(time_) {}
};

// Flattened double-coefficient polynomial for the integrator hot path.
struct CompiledPoly {
    std::vector<double> c;
    std::vector<std::uint32_t> off;  // c.size()+1 offsets into pw
    std::vector<std::pair<std::uint16_t, std::uint16_t>> pw;

    double eval(const double* x) const {
        double acc = 0;
        for (std::size_t t = 0; t < c.size(); ++t) {
            double v = c[t];
            for (std::uint32_t i = off[t]; i < off[t + 1]; ++i) {
                const double b = x[pw[i].first];
                for (std::uint16_t e = pw[i].second; e != 0; --e) v *= b;
            }
            acc += v;
        }
        return acc;
    }
};

inline CompiledPoly compile_poly(const Poly& p) {
    CompiledPoly out;
    out.off.push_back(0);
    for (const auto& [r, coeff] : p.terms()) {
        out.c.push_back(to_double(coeff));
        for (std::size_t a = 0; a < r.size(); ++a)
            if (r[a] != 0) out.pw.emplace_back(static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(r[a]));
        out.off.push_back(static_cast<std::uint32_t>(out.pw.size()));
    }
    return out;
}

struct CompiledField {
    std::vector<CompiledPoly> comp;

    void eval(const double* x, double* out) const {
        for (std::size_t i = 0; i < comp.size(); ++i) out[i] = comp[i].eval(x);
    }
};

inline CompiledField compile_field(const PolyVectorField& V) {
    CompiledField f;
    f.comp.reserve(V.comp.size());
    for (const auto& p : V.comp) f.comp.push_back(compile_poly(p));
    return f;
}

// System compiled once; per-segment combinations are cheap term-list merges.
struct CompiledSystem {
    int dim = 0;
    int m = 0;
    std::vector<CompiledField> fields;  // X_0..X_m

    explicit CompiledSystem(const ControlSystem& sys) : dim(sys.dim), m(sys.m) {
        fields.reserve(sys.fields.size());
        for (const auto& f : sys.fields) fields.push_back(compile_field(f));
    }

    // X_0 + sum u_i X_i with double coefficients (duplicate monomials left unmerged).
    CompiledField combine(const std::vector<double>& u) const {
        if (static_cast<int>(u.size()) != m) throw InputError("combine: control length mismatch");
        CompiledField out = fields[0];
        for (int i = 0; i < m; ++i) {
            if (u[static_cast<std::size_t>(i)] == 0.0) continue;
            const auto& g = fields[static_cast<std::size_t>(i) + 1];
            for (std::size_t c = 0; c < out.comp.size(); ++c) {
                auto& dst = out.comp[c];
                const auto& src = g.comp[c];
                const auto base = static_cast<std::uint32_t>(dst.pw.size());
                for (std::size_t t = 0; t < src.c.size(); ++t)
                    dst.c.push_back(src.c[t] * u[static_cast<std::size_t>(i)]);
                dst.pw.insert(dst.pw.end(), src.pw.begin(), src.pw.end());
                for (std::size_t t = 1; t < src.off.size(); ++t) dst.off.push_back(base + src.off[t]);
            }
        }
        return out;
    }
};

struct FlowOptions {
    double step = 1e-3;
    double blowup_cap = 1e6;
    bool trace = false;
};

struct FlowResult {
    std::vector<double> endpoint;
    std::vector<std::pair<double, std::vector<double>>> trajectory;  // filled when trace enabled
};

namespace detail {

// Classical fixed-step 4th-order integration of one constant-control segment.
// Throws as soon as the state norm cap is exceeded.
inline void rk4_segment(const CompiledField& F, std::vector<double>& x, double duration, double step,
                        double cap, int segment, double t0,
                        std::vector<std::pair<double, std::vector<double>>>* trace) {
    if (duration <= 0.0) return;
    const int n = static_cast<int>(x.size());
    const auto steps = static_cast<long>(std::ceil(duration / step));
    const double h = duration / static_cast<double>(steps);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (long s = 0; s < steps; ++s) {
        F.eval(x.data(), k1.data());
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        F.eval(tmp.data(), k2.data());
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        F.eval(tmp.data(), k3.data());
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
        F.eval(tmp.data(), k4.data());
        for (int i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        for (int i = 0; i < n; ++i)
            if (!std::isfinite(x[i]) || std::abs(x[i]) > cap)
                throw BlowupError(segment, t0 + h * static_cast<double>(s + 1));
        if (trace) trace->emplace_back(t0 + h * static_cast<double>(s + 1), x);
    }
}

}  // namespace detail

// Deterministic fixed-step integration of a chronological schedule.
inline FlowResult flow_numeric(const CompiledSystem& csys, const Schedule& sched, std::vector<double> x0,
                               const FlowOptions& opts = {}) {
    if (!(opts.step > 0)) throw InputError("flow_numeric: step must be > 0");
    if (static_cast<int>(x0.size()) != csys.dim) throw InputError("flow_numeric: state length mismatch");
    FlowResult res;
    if (opts.trace) res.trajectory.emplace_back(0.0, x0);
    double t = 0.0;
    for (std::size_t j = 0; j < sched.segments.size(); ++j) {
        const auto& seg = sched.segments[j];
        if (seg.duration == 0.0) continue;
        const CompiledField F = csys.combine(seg.control);
        detail::rk4_segment(F, x0, seg.duration, opts.step, opts.blowup_cap, static_cast<int>(j), t,
                            opts.trace ? &res.trajectory : nullptr);
        t += seg.duration;
    }
    res.endpoint = std::move(x0);
    return res;
}

inline FlowResult flow_numeric(const ControlSystem& sys, const Schedule& sched, std::vector<double> x0,
                               const FlowOptions& opts = {}) {
    const auto issues = validate_schedule(sys, sched);
    if (!issues.empty()) throw InputError("flow_numeric: " + issues.front());
    return flow_numeric(CompiledSystem(sys), sched, std::move(x0), opts);
}

}  // namespace chronoreach
