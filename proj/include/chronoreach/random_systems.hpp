#pragma once

#include <string>
#include <vector>

#include "chronoreach/rng.hpp"
#include "chronoreach/system.hpp"

namespace chronoreach {

// Rational in [-1,1] with a small denominator (keeps exact arithmetic light).
inline Rational random_unit_rational(Rng& rng, int max_den = 8) {
    const long den = rng.uniform_int(1, max_den);
    const long num = rng.uniform_int(-den, den);
    return Rational(num, den);
}

inline Poly random_poly(Rng& rng, int dim, int max_degree, int term_count, int max_den = 8) {
    Poly p(dim);
    for (int t = 0; t < term_count; ++t) {
        const auto deg = static_cast<int>(rng.uniform_int(0, max_degree));
        MultiIndex r(static_cast<std::size_t>(dim), 0);
        for (int d = 0; d < deg; ++d) r[static_cast<std::size_t>(rng.uniform_int(0, dim - 1))] += 1;
        p.add_term(std::move(r), random_unit_rational(rng, max_den));
    }
    return p;
}

inline PolyVectorField random_field(Rng& rng, int dim, int max_degree, int terms_per_component,
                                    int max_den = 8) {
    std::vector<Poly> comp;
    comp.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) comp.push_back(random_poly(rng, dim, max_degree, terms_per_component, max_den));
    return PolyVectorField(std::move(comp));
}

// Random polynomial control system (degree <= max_degree per component).
inline ControlSystem random_system(Rng& rng, int dim, int m, int max_degree, int terms_per_component = 3) {
    std::vector<PolyVectorField> fields;
    fields.reserve(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) fields.push_back(random_field(rng, dim, max_degree, terms_per_component));
    return ControlSystem("random", dim, m, std::move(fields));
}

// Perturbation field whose monomials (in x - x0) all have total degree in
// [min_degree, max_degree]; adding it to any field preserves (min_degree-1)-contact.
inline PolyVectorField random_contact_perturbation(Rng& rng, int dim, int min_degree, int max_degree,
                                                   std::span<const Rational> x0, int terms_per_component = 2,
                                                   int max_den = 8) {
    std::vector<Poly> comp;
    comp.reserve(static_cast<std::size_t>(dim));
    std::vector<Rational> shift(x0.begin(), x0.end());
    for (auto& v : shift) v = -v;
    for (int i = 0; i < dim; ++i) {
        Poly p(dim);
        for (int t = 0; t < terms_per_component; ++t) {
            const auto deg = static_cast<int>(rng.uniform_int(min_degree, max_degree));
            MultiIndex r(static_cast<std::size_t>(dim), 0);
            for (int d = 0; d < deg; ++d) r[static_cast<std::size_t>(rng.uniform_int(0, dim - 1))] += 1;
            p.add_term(std::move(r), random_unit_rational(rng, max_den));
        }
        // monomials are in (x - x0): substitute x -> x - x0
        bool origin = true;
        for (const auto& v : shift)
            if (v != 0) origin = false;
        comp.push_back(origin ? std::move(p) : p.shift(shift));
    }
    return PolyVectorField(std::move(comp));
}

// Random exact controls in [-1,1]^m and positive durations summing below `horizon`.
inline std::vector<std::vector<Rational>> random_rational_controls(Rng& rng, int m, int p, int max_den = 8) {
    std::vector<std::vector<Rational>> out;
    out.reserve(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        std::vector<Rational> u;
        u.reserve(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) u.push_back(random_unit_rational(rng, max_den));
        out.push_back(std::move(u));
    }
    return out;
}

inline std::vector<Rational> random_rational_durations(Rng& rng, int p, const Rational& horizon,
                                                       int max_den = 16) {
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        const long den = rng.uniform_int(4, max_den);
        const long num = rng.uniform_int(0, den);
        out.push_back(horizon * Rational(num, den) / p);
    }
    return out;
}

}  // namespace chronoreach
