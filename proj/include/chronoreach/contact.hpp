#pragma once

#include <optional>

#include "chronoreach/system.hpp"

namespace chronoreach {

struct ContactReport {
    bool equal = true;
    int order = 0;
    // witness of the minimal-order differing derivative, set when !equal
    int field = -1;
    int component = -1;
    MultiIndex r;
    Rational lhs, rhs;
};

// True iff D^r X_i(x0) = D^r Y_i(x0) for all |r| <= k and all fields i in 0..m.
// Equality of all derivatives up to order k at x0 is equality of all terms of
// degree <= k of the difference expanded around x0, so the check reduces to the
// minimal total degree of (X_i - Y_i)(x + x0); the witness derivative itself is
// recomputed by exact differentiation.
inline ContactReport kth_contact(const ControlSystem& X, const ControlSystem& Y,
                                 std::span<const Rational> x0, int k) {
    if (X.dim != Y.dim || X.m != Y.m) throw InputError("kth_contact: systems have different shape");
    if (static_cast<int>(x0.size()) != X.dim) throw InputError("kth_contact: basepoint length mismatch");
    if (k < 0) throw InputError("kth_contact: negative order");

    ContactReport rep;
    rep.order = k;
    int best_deg = -1;
    for (std::size_t i = 0; i < X.fields.size(); ++i) {
        for (std::size_t c = 0; c < X.fields[i].comp.size(); ++c) {
            Poly diff = X.fields[i].comp[c] - Y.fields[i].comp[c];
            if (diff.is_zero()) continue;
            diff = diff.shift(x0);  // expand around x0; no-op at the origin
            const int md = diff.min_total_degree();
            if (md > k) continue;
            if (best_deg == -1 || md < best_deg) {
                best_deg = md;
                // minimal-degree, graded-lex-smallest exponent: last matching term
                MultiIndex witness;
                for (auto it = diff.terms().rbegin(); it != diff.terms().rend(); ++it) {
                    if (static_cast<int>(mi_order(it->first)) == md) {
                        witness = it->first;
                        break;
                    }
                }
                rep.equal = false;
                rep.field = static_cast<int>(i);
                rep.component = static_cast<int>(c);
                rep.r = witness;
                rep.lhs = X.fields[i].comp[c].dpow(witness).eval_rational(x0);
                rep.rhs = Y.fields[i].comp[c].dpow(witness).eval_rational(x0);
            }
        }
    }
    return rep;
}

}  // namespace chronoreach
