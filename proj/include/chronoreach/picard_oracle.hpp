#pragma once

#include <vector>

#include "chronoreach/chrono.hpp"

namespace chronoreach {

// Literal Picard recursion for the piecewise-constant derivation path, evaluated by
// exact segment-by-segment polynomial integration. Deliberately brute-force: the
// recursion branches once per segment per level, so limits are enforced (k <= 4,
// p <= 3). Serves as the independent oracle for truncated_flow.
inline std::vector<Rational> picard_direct_oracle(const ControlSystem& sys,
                                                  const std::vector<std::vector<Rational>>& controls, int k,
                                                  std::span<const Rational> x0,
                                                  std::span<const Rational> durations) {
    if (k < 0 || k > 4) throw InputError("picard_direct_oracle: order must be in 0..4");
    if (controls.size() > 3) throw InputError("picard_direct_oracle: at most 3 segments");
    if (controls.size() != durations.size())
        throw InputError("picard_direct_oracle: controls/durations length mismatch");
    if (static_cast<int>(x0.size()) != sys.dim)
        throw InputError("picard_direct_oracle: basepoint length mismatch");
    for (const auto& d : durations)
        if (d < 0) throw InputError("picard_direct_oracle: negative duration");

    const int n = sys.dim;
    const int q = static_cast<int>(controls.size());
    const int ext = n + 1;  // state axes plus local-time axis
    const int taxis = n;

    std::vector<std::vector<Poly>> seg_fields;  // embedded per-segment combined fields
    seg_fields.reserve(controls.size());
    for (const auto& u : controls) {
        const PolyVectorField vf = control_vf(sys, u);
        std::vector<Poly> embedded;
        embedded.reserve(vf.comp.size());
        for (const auto& c : vf.comp) embedded.push_back(detail::embed(c, ext));
        seg_fields.push_back(std::move(embedded));
    }

    // Curve of the l-th iterate applied to f, one polynomial piece per segment in
    // the local segment time. Piece j at local time d is the value at global time
    // (duration of segments before j) + d.
    auto curve = [&](auto&& self, int l, const Poly& f) -> std::vector<Poly> {
        if (l == 0) return std::vector<Poly>(static_cast<std::size_t>(q), f);
        std::vector<std::vector<Poly>> sub;  // per segment: curve of the (l-1)-iterate of W_j f
        sub.reserve(static_cast<std::size_t>(q));
        for (int j = 0; j < q; ++j)
            sub.push_back(self(self, l - 1, detail::lie_derivative_state(seg_fields[static_cast<std::size_t>(j)], f, n)));

        std::vector<Poly> out;
        out.reserve(static_cast<std::size_t>(q));
        Poly acc = f;  // f plus the integral over all completed segments
        for (int j = 0; j < q; ++j) {
            const Poly anti = sub[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)].integrate(taxis);
            out.push_back(acc + anti);
            acc += anti.substitute(taxis, durations[static_cast<std::size_t>(j)]);
        }
        return out;
    };

    std::vector<Rational> point(x0.begin(), x0.end());
    point.push_back(0);  // slot for the (already substituted) time axis
    std::vector<Rational> endpoint;
    endpoint.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto pieces = curve(curve, k, Poly::variable(ext, i));
        if (q == 0) {
            endpoint.push_back(x0[static_cast<std::size_t>(i)]);
            continue;
        }
        const Poly last = pieces.back().substitute(taxis, durations[static_cast<std::size_t>(q) - 1]);
        endpoint.push_back(last.eval_rational(point));
    }
    return endpoint;
}

}  // namespace chronoreach
