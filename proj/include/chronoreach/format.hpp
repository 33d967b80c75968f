#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "chronoreach/system.hpp"

namespace chronoreach {

// Shortest-round-trip decimal form; deterministic for a given binary.
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // prefer the shortest representation that round-trips
    for (int prec = 1; prec <= 16; ++prec) {
        char cand[64];
        std::snprintf(cand, sizeof(cand), "%.*g", prec, v);
        double back = 0;
        std::sscanf(cand, "%lf", &back);
        if (back == v) return cand;
    }
    return buf;
}

inline std::string fmt_vector(const std::vector<double>& v, const std::string& sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += fmt_double(v[i]);
    }
    return out;
}

// Schedule literal matching the parser: "(u1,u2):dur;...".
inline std::string format_schedule(const Schedule& sched) {
    std::string out;
    for (std::size_t j = 0; j < sched.segments.size(); ++j) {
        if (j) out += ";";
        out += "(";
        const auto& seg = sched.segments[j];
        for (std::size_t i = 0; i < seg.control.size(); ++i) {
            if (i) out += ",";
            out += fmt_double(seg.control[i]);
        }
        out += "):" + fmt_double(seg.duration);
    }
    return out;
}

}  // namespace chronoreach
