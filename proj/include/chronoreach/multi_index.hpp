#pragma once

#include <cstdint>
#include <vector>

#include "chronoreach/rational.hpp"

namespace chronoreach {

// Exponent vector of a monomial; length equals the ambient dimension.
using MultiIndex = std::vector<std::uint32_t>;

inline std::uint64_t mi_order(const MultiIndex& r) {
    std::uint64_t s = 0;
    for (auto e : r) s += e;
    return s;
}

inline BigInt mi_factorial(const MultiIndex& r) {
    BigInt f = 1;
    for (auto e : r) f *= factorial(e);
    return f;
}

// Graded lexicographic, highest first: total degree decides, then lex on entries.
// Used as the map comparator so iteration yields the canonical rendering order.
struct GradedLexGreater {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
        const auto oa = mi_order(a), ob = mi_order(b);
        if (oa != ob) return oa > ob;
        return a > b;  // lexicographic on exponents
    }
};

// All multi-indices of length n with order <= k, ascending by (degree, lex).
inline std::vector<MultiIndex> multi_indices_up_to(int n, int k) {
    std::vector<MultiIndex> out;
    MultiIndex cur(static_cast<std::size_t>(n), 0);
    for (int deg = 0; deg <= k; ++deg) {
        // enumerate compositions of deg into n parts, lexicographically ascending
        auto rec = [&](auto&& self, int pos, int rem) -> void {
            if (pos == n - 1) {
                cur[static_cast<std::size_t>(pos)] = static_cast<std::uint32_t>(rem);
                out.push_back(cur);
                return;
            }
            for (int e = 0; e <= rem; ++e) {
                cur[static_cast<std::size_t>(pos)] = static_cast<std::uint32_t>(e);
                self(self, pos + 1, rem - e);
            }
        };
        if (n == 0) {
            if (deg == 0) out.push_back(cur);
        } else {
            rec(rec, 0, deg);
        }
    }
    return out;
}

}  // namespace chronoreach
