#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "chronoreach/vector_field.hpp"

namespace chronoreach {

// Control-affine family X_0 + sum u_i X_i with controls in the fixed box [-1,1]^m.
struct ControlSystem {
    std::string name;
    int dim = 0;
    int m = 0;
    std::vector<PolyVectorField> fields;  // X_0..X_m
    std::vector<Rational> basepoint;      // default origin
    bool basepoint_explicit = false;

    ControlSystem() = default;
    ControlSystem(std::string name_, int dim_, int m_, std::vector<PolyVectorField> fields_)
        : name(std::move(name_)),
          dim(dim_),
          m(m_),
          fields(std::move(fields_)),
          basepoint(static_cast<std::size_t>(dim_), Rational(0)) {}

    std::vector<double> basepoint_double() const {
        std::vector<double> x(basepoint.size());
        for (std::size_t i = 0; i < basepoint.size(); ++i) x[i] = to_double(basepoint[i]);
        return x;
    }
};

inline std::vector<std::string> validate(const ControlSystem& sys) {
    std::vector<std::string> issues;
    if (sys.dim < 1) issues.push_back("dim must be >= 1");
    if (sys.m < 0) issues.push_back("controls must be >= 0");
    if (static_cast<int>(sys.fields.size()) != sys.m + 1)
        issues.push_back("expected m+1 fields (X0..X" + std::to_string(sys.m) + "), got " +
                         std::to_string(sys.fields.size()));
    for (std::size_t i = 0; i < sys.fields.size(); ++i) {
        if (sys.fields[i].dim() != sys.dim)
            issues.push_back("field X" + std::to_string(i) + " has dimension " +
                             std::to_string(sys.fields[i].dim()) + ", expected " + std::to_string(sys.dim));
    }
    if (!sys.basepoint.empty() && static_cast<int>(sys.basepoint.size()) != sys.dim)
        issues.push_back("basepoint length " + std::to_string(sys.basepoint.size()) + ", expected " +
                         std::to_string(sys.dim));
    return issues;
}

// X_u = X_0 + sum u_i X_i for a rational control in [-1,1]^m.
inline PolyVectorField control_vf(const ControlSystem& sys, std::span<const Rational> u) {
    if (static_cast<int>(u.size()) != sys.m) throw InputError("control_vf: control length mismatch");
    for (const auto& ui : u)
        if (ui < -1 || ui > 1) throw InputError("control_vf: control outside [-1,1]");
    PolyVectorField out = sys.fields.at(0);
    for (int i = 0; i < sys.m; ++i) {
        if (u[static_cast<std::size_t>(i)] == 0) continue;
        out += sys.fields.at(static_cast<std::size_t>(i) + 1) * u[static_cast<std::size_t>(i)];
    }
    return out;
}

// One piecewise-constant leg: constant control held for a duration.
struct Segment {
    std::vector<double> control;
    double duration = 0.0;
};

// Chronological list of segments: segments[0] executes first.
struct Schedule {
    std::vector<Segment> segments;

    double total() const {
        double s = 0;
        for (const auto& seg : segments) s += seg.duration;
        return s;
    }
};

inline std::vector<std::string> validate_schedule(const ControlSystem& sys, const Schedule& sched) {
    std::vector<std::string> issues;
    for (std::size_t j = 0; j < sched.segments.size(); ++j) {
        const auto& seg = sched.segments[j];
        if (static_cast<int>(seg.control.size()) != sys.m)
            issues.push_back("segment " + std::to_string(j) + ": control length " +
                             std::to_string(seg.control.size()) + ", expected " + std::to_string(sys.m));
        for (double c : seg.control)
            if (!(c >= -1.0 && c <= 1.0))
                issues.push_back("segment " + std::to_string(j) + ": control outside [-1,1]");
        if (!(seg.duration >= 0.0) || !std::isfinite(seg.duration))
            issues.push_back("segment " + std::to_string(j) + ": duration must be >= 0 and finite");
    }
    return issues;
}

// Exact-control schedule used by the symbolic path (controls and durations rational).
struct RationalSchedule {
    std::vector<std::vector<Rational>> controls;
    std::vector<Rational> durations;

    std::size_t size() const { return controls.size(); }

    Schedule to_schedule() const {
        Schedule s;
        s.segments.reserve(controls.size());
        for (std::size_t j = 0; j < controls.size(); ++j) {
            Segment seg;
            seg.control.reserve(controls[j].size());
            for (const auto& c : controls[j]) seg.control.push_back(to_double(c));
            seg.duration = to_double(durations[j]);
            s.segments.push_back(std::move(seg));
        }
        return s;
    }
};

}  // namespace chronoreach
