#pragma once

// Weighted-derivative seminorm of a vector field acting on a polynomial:
// max over a box grid and all derivative multi-indices of
// (a_0*...*a_|r|)/|r|! * |D^r (Vf)|.  The grid makes this a lower bound of
// the sup over the box; the multi-index range is finite for polynomials.

#include <utility>
#include <vector>

#include "chronoreach/vector_field.hpp"

namespace chronoreach {

struct SeminormSpec {
    // Per-axis closed intervals [lo, hi]; must be non-degenerate.
    std::vector<std::pair<Rational, Rational>> box;
    // Strictly positive, non-increasing weight prefix a_0, a_1, ...
    std::vector<Rational> weights;
    int grid = 11;  // evaluation points per axis
};

// Box [-1,1]^dim, weights a_i = 2^-i for i = 0..max_order.
inline SeminormSpec default_seminorm_spec(int dim, int max_order) {
    SeminormSpec spec;
    spec.box.assign(static_cast<std::size_t>(dim), {Rational(-1), Rational(1)});
    for (int i = 0; i <= max_order; ++i)
        spec.weights.push_back(rational_pow(Rational(1, 2), static_cast<std::uint32_t>(i)));
    return spec;
}

inline void validate_spec(const SeminormSpec& spec, int dim) {
    if (static_cast<int>(spec.box.size()) != dim)
        throw InputError("seminorm box dimension mismatch");
    for (const auto& [lo, hi] : spec.box)
        if (!(lo < hi)) throw InputError("seminorm box has a degenerate axis");
    if (spec.weights.empty()) throw InputError("seminorm weights empty");
    for (std::size_t i = 0; i < spec.weights.size(); ++i) {
        if (spec.weights[i] <= 0) throw InputError("seminorm weights must be positive");
        if (i > 0 && spec.weights[i] > spec.weights[i - 1])
            throw InputError("seminorm weights must be non-increasing");
    }
    if (spec.grid < 1) throw InputError("seminorm grid must be >= 1");
}

// Exact arithmetic throughout so that scaling identities hold on the nose.
inline Rational seminorm_exact(const PolyVectorField& V, const Poly& f,
                               const SeminormSpec& spec) {
    if (V.dim() != f.dim()) throw InputError("seminorm dimension mismatch");
    validate_spec(spec, V.dim());
    const Poly g = lie_derivative(V, f);
    const int deg = g.total_degree();
    if (deg < 0) return Rational(0);
    if (static_cast<int>(spec.weights.size()) < deg + 1)
        throw InputError("seminorm weight sequence too short for derivative order " +
                         std::to_string(deg));

    const int n = V.dim();
    // Grid coordinates per axis.
    std::vector<std::vector<Rational>> axes(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        const auto& [lo, hi] = spec.box[static_cast<std::size_t>(a)];
        if (spec.grid == 1) {
            axes[static_cast<std::size_t>(a)].push_back((lo + hi) / 2);
        } else {
            for (int j = 0; j < spec.grid; ++j)
                axes[static_cast<std::size_t>(a)].push_back(
                    lo + (hi - lo) * j / (spec.grid - 1));
        }
    }

    // Prefix products a_0*...*a_m.
    std::vector<Rational> prefix(static_cast<std::size_t>(deg) + 1);
    Rational acc = 1;
    for (int m = 0; m <= deg; ++m) {
        acc *= spec.weights[static_cast<std::size_t>(m)];
        prefix[static_cast<std::size_t>(m)] = acc;
    }

    Rational best = 0;
    std::vector<Rational> pt(static_cast<std::size_t>(n));
    for (const MultiIndex& r : multi_indices_up_to(n, deg)) {
        const Poly d = g.dpow(r);
        if (d.is_zero()) continue;
        const Rational w =
            prefix[mi_order(r)] / Rational(factorial(static_cast<unsigned>(mi_order(r))));
        // Odometer over the grid.
        std::vector<int> idx(static_cast<std::size_t>(n), 0);
        while (true) {
            for (int a = 0; a < n; ++a)
                pt[static_cast<std::size_t>(a)] =
                    axes[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
            Rational v = d.eval_rational(pt) * w;
            if (v < 0) v = -v;
            if (v > best) best = v;
            int a = 0;
            while (a < n && ++idx[static_cast<std::size_t>(a)] == spec.grid) {
                idx[static_cast<std::size_t>(a)] = 0;
                ++a;
            }
            if (a == n) break;
        }
    }
    return best;
}

inline double seminorm(const PolyVectorField& V, const Poly& f, const SeminormSpec& spec) {
    return to_double(seminorm_exact(V, f, spec));
}

}  // namespace chronoreach
