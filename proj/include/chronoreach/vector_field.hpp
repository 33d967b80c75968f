#pragma once

#include <map>
#include <span>
#include <vector>

#include "chronoreach/poly.hpp"

namespace chronoreach {

// Polynomial vector field on R^n: one component polynomial per coordinate.
struct PolyVectorField {
    std::vector<Poly> comp;

    PolyVectorField() = default;
    explicit PolyVectorField(int dim) : comp(static_cast<std::size_t>(dim), Poly(dim)) {}
    explicit PolyVectorField(std::vector<Poly> components) : comp(std::move(components)) {
        for (const auto& p : comp)
            if (p.dim() != dim()) throw InputError("PolyVectorField: component dimension mismatch");
    }

    int dim() const { return static_cast<int>(comp.size()); }
    bool is_zero() const {
        for (const auto& p : comp)
            if (!p.is_zero()) return false;
        return true;
    }

    friend bool operator==(const PolyVectorField& a, const PolyVectorField& b) { return a.comp == b.comp; }

    PolyVectorField& operator+=(const PolyVectorField& o) {
        if (dim() != o.dim()) throw InputError("PolyVectorField: dimension mismatch");
        for (std::size_t i = 0; i < comp.size(); ++i) comp[i] += o.comp[i];
        return *this;
    }
    friend PolyVectorField operator+(PolyVectorField a, const PolyVectorField& b) { return a += b; }

    PolyVectorField& operator*=(const Rational& c) {
        for (auto& p : comp) p *= c;
        return *this;
    }
    friend PolyVectorField operator*(PolyVectorField v, const Rational& c) { return v *= c; }
    friend PolyVectorField operator*(const Rational& c, PolyVectorField v) { return v *= c; }
};

// L_V f = sum_j V^j * df/dx_j, exact.
inline Poly lie_derivative(const PolyVectorField& V, const Poly& f) {
    if (V.dim() != f.dim()) throw InputError("lie_derivative: dimension mismatch");
    Poly out(f.dim());
    for (int j = 0; j < f.dim(); ++j) {
        const Poly df = f.derivative(j);
        if (df.is_zero() || V.comp[static_cast<std::size_t>(j)].is_zero()) continue;
        out += V.comp[static_cast<std::size_t>(j)] * df;
    }
    return out;
}

// [V,W]^i = L_V W^i - L_W V^i, exact and antisymmetric.
inline PolyVectorField lie_bracket(const PolyVectorField& V, const PolyVectorField& W) {
    if (V.dim() != W.dim()) throw InputError("lie_bracket: dimension mismatch");
    std::vector<Poly> comp;
    comp.reserve(V.comp.size());
    for (std::size_t i = 0; i < V.comp.size(); ++i)
        comp.push_back(lie_derivative(V, W.comp[i]) - lie_derivative(W, V.comp[i]));
    return PolyVectorField(std::move(comp));
}

// All D^r V^i(x0) for |r| <= k: per multi-index, one value per component.
// Derivatives are taken exactly and then evaluated at x0 (no polynomial shifting).
using TaylorTable = std::map<MultiIndex, std::vector<Rational>, GradedLexGreater>;

inline TaylorTable taylor_coefficients(const PolyVectorField& V, std::span<const Rational> x0, int k) {
    if (V.dim() != static_cast<int>(x0.size())) throw InputError("taylor_coefficients: basepoint length mismatch");
    if (k < 0) throw InputError("taylor_coefficients: negative order");
    TaylorTable table;
    for (const auto& r : multi_indices_up_to(V.dim(), k)) {
        std::vector<Rational> row;
        row.reserve(V.comp.size());
        for (const auto& p : V.comp) row.push_back(p.dpow(r).eval_rational(x0));
        table.emplace(r, std::move(row));
    }
    return table;
}

}  // namespace chronoreach
