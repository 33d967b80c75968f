#pragma once

#include <string>
#include <vector>

#include "chronoreach/system.hpp"

namespace chronoreach {

// V^^l f: l-fold Lie derivative (the iterated derivation applied to f).
inline Poly chrono_power(const PolyVectorField& V, const Poly& f, int l) {
    if (l < 0) throw InputError("chrono_power: negative iteration count");
    if (V.dim() != f.dim()) throw InputError("chrono_power: dimension mismatch");
    Poly g = f;
    for (int i = 0; i < l; ++i) {
        if (g.is_zero()) break;
        g = lie_derivative(V, g);
    }
    return g;
}

// Truncated flow expansion of a p-segment schedule with formal durations s1..sp:
// one polynomial per coordinate, every term of total s-degree <= order, constant
// term equal to the basepoint coordinate.
struct FlowPolynomial {
    int state_dim = 0;
    int segments = 0;
    int order = 0;
    std::vector<Rational> basepoint;
    std::vector<Poly> coord;  // each of dimension `segments` (variables s1..sp)

    std::vector<Rational> eval_exact(std::span<const Rational> durations) const {
        if (static_cast<int>(durations.size()) != segments)
            throw InputError("FlowPolynomial::eval_exact: duration count mismatch");
        std::vector<Rational> out;
        out.reserve(coord.size());
        for (const auto& p : coord) out.push_back(p.eval_rational(durations));
        return out;
    }

    std::vector<double> eval(std::span<const double> durations) const {
        if (static_cast<int>(durations.size()) != segments)
            throw InputError("FlowPolynomial::eval: duration count mismatch");
        std::vector<double> out;
        out.reserve(coord.size());
        for (const auto& p : coord) out.push_back(p.eval_double(durations));
        return out;
    }

    std::string to_string() const {
        std::string out;
        for (std::size_t i = 0; i < coord.size(); ++i) {
            out += "x" + std::to_string(i + 1) + "(s) = " + coord[i].to_string("s") + "\n";
        }
        return out;
    }
};

namespace detail {

// Total degree held in the trailing `p` axes (the formal duration variables).
inline std::uint64_t s_degree(const MultiIndex& r, int n) {
    std::uint64_t d = 0;
    for (std::size_t i = static_cast<std::size_t>(n); i < r.size(); ++i) d += r[i];
    return d;
}

inline Poly drop_s_degree_above(const Poly& p, int n, int k) {
    Poly out(p.dim());
    for (const auto& [r, c] : p.terms())
        if (s_degree(r, n) <= static_cast<std::uint64_t>(k)) out.add_term(r, c);
    return out;
}

// Lie derivation acting only on the state axes 0..n-1 of the combined (x,s) ring.
inline Poly lie_derivative_state(const std::vector<Poly>& field_embedded, const Poly& g, int n) {
    Poly out(g.dim());
    for (int j = 0; j < n; ++j) {
        const Poly dg = g.derivative(j);
        if (dg.is_zero() || field_embedded[static_cast<std::size_t>(j)].is_zero()) continue;
        out += field_embedded[static_cast<std::size_t>(j)] * dg;
    }
    return out;
}

inline Poly embed(const Poly& p, int new_dim) {
    Poly out(new_dim);
    for (const auto& [r, c] : p.terms()) {
        MultiIndex q(static_cast<std::size_t>(new_dim), 0);
        std::copy(r.begin(), r.end(), q.begin());
        out.add_term(std::move(q), c);
    }
    return out;
}

// Apply the per-segment exponential sum_{l<=k} (s_j^l / l!) V^^l to g, dropping
// every term whose total s-degree exceeds k.
inline Poly apply_segment_exponential(Poly g, const std::vector<Poly>& field_embedded, int n, int p, int j,
                                      int k) {
    Poly res = g;
    Poly cur = std::move(g);
    Rational inv_factorial = 1;
    const auto s_axis = static_cast<std::size_t>(n + j);
    for (int l = 1; l <= k; ++l) {
        // terms of cur with s-degree > k - l cannot contribute at this level or deeper
        cur = drop_s_degree_above(cur, n, k - l);
        if (cur.is_zero()) break;
        cur = lie_derivative_state(field_embedded, cur, n);
        if (cur.is_zero()) break;
        inv_factorial /= l;
        for (const auto& [r, c] : cur.terms()) {
            if (s_degree(r, n) + static_cast<std::uint64_t>(l) > static_cast<std::uint64_t>(k)) continue;
            MultiIndex q(r);
            q[s_axis] += static_cast<std::uint32_t>(l);
            res.add_term(std::move(q), c * inv_factorial);
        }
    }
    return res;
}

}  // namespace detail

// Truncated chronological expansion of the piecewise-constant flow: composes the
// per-segment operator exponentials in chronological order (the last segment acts
// innermost on the coordinate function), truncates at total s-degree `order`, and
// evaluates the state variables at the basepoint. All arithmetic exact.
inline FlowPolynomial truncated_flow(const ControlSystem& sys,
                                     const std::vector<std::vector<Rational>>& controls, int order,
                                     std::span<const Rational> x0) {
    if (order < 0) throw InputError("truncated_flow: negative order");
    if (static_cast<int>(x0.size()) != sys.dim) throw InputError("truncated_flow: basepoint length mismatch");
    const int n = sys.dim;
    const int p = static_cast<int>(controls.size());
    const int combined = n + p;

    // per-segment combined fields X_u embedded into the (x,s) ring
    std::vector<std::vector<Poly>> seg_fields;
    seg_fields.reserve(controls.size());
    for (const auto& u : controls) {
        const PolyVectorField vf = control_vf(sys, u);
        std::vector<Poly> embedded;
        embedded.reserve(vf.comp.size());
        for (const auto& c : vf.comp) embedded.push_back(detail::embed(c, combined));
        seg_fields.push_back(std::move(embedded));
    }

    FlowPolynomial out;
    out.state_dim = n;
    out.segments = p;
    out.order = order;
    out.basepoint.assign(x0.begin(), x0.end());
    out.coord.reserve(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
        Poly g = Poly::variable(combined, i);
        for (int j = p - 1; j >= 0; --j)
            g = detail::apply_segment_exponential(std::move(g), seg_fields[static_cast<std::size_t>(j)], n, p,
                                                  j, order);
        // evaluate the state part at x0, keep the duration part
        Poly coord(p);
        for (const auto& [r, c] : g.terms()) {
            Rational v = c;
            bool dead = false;
            for (int a = 0; a < n; ++a) {
                const auto e = r[static_cast<std::size_t>(a)];
                if (e == 0) continue;
                if (x0[static_cast<std::size_t>(a)] == 0) {
                    dead = true;
                    break;
                }
                v *= rational_pow(x0[static_cast<std::size_t>(a)], e);
            }
            if (dead) continue;
            MultiIndex q(r.begin() + n, r.end());
            coord.add_term(std::move(q), std::move(v));
        }
        out.coord.push_back(std::move(coord));
    }
    return out;
}

}  // namespace chronoreach
