#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chronoreach/multi_index.hpp"
#include "chronoreach/rational.hpp"

namespace chronoreach {

// Multivariate polynomial over Q in canonical form: no zero coefficients stored,
// terms kept in graded-lex order (highest first). All arithmetic is exact.
class Poly {
public:
    using TermMap = std::map<MultiIndex, Rational, GradedLexGreater>;

    explicit Poly(int dim = 1) : dim_(dim) {
        if (dim < 0) throw InputError("Poly: dimension must be >= 0");
    }

    static Poly constant(int dim, Rational c) {
        Poly p(dim);
        p.add_term(MultiIndex(static_cast<std::size_t>(dim), 0), std::move(c));
        return p;
    }

    static Poly variable(int dim, int axis) {
        if (axis < 0 || axis >= dim) throw InputError("Poly::variable: axis out of range");
        Poly p(dim);
        MultiIndex r(static_cast<std::size_t>(dim), 0);
        r[static_cast<std::size_t>(axis)] = 1;
        p.add_term(std::move(r), 1);
        return p;
    }

    static Poly monomial(int dim, MultiIndex r, Rational c) {
        if (static_cast<int>(r.size()) != dim) throw InputError("Poly::monomial: exponent length mismatch");
        Poly p(dim);
        p.add_term(std::move(r), std::move(c));
        return p;
    }

    int dim() const { return dim_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    // -1 for the zero polynomial.
    int total_degree() const {
        int d = -1;
        for (const auto& [r, c] : terms_) d = std::max(d, static_cast<int>(mi_order(r)));
        return d;
    }

    int min_total_degree() const {
        if (terms_.empty()) return -1;
        // terms are ordered degree-descending; the last entry has minimal degree in its
        // degree class but ties share the degree, so the last term's order is the minimum
        return static_cast<int>(mi_order(terms_.rbegin()->first));
    }

    void add_term(MultiIndex r, Rational c) {
        if (static_cast<int>(r.size()) != dim_) throw InputError("Poly::add_term: exponent length mismatch");
        if (c == 0) return;
        auto it = terms_.find(r);
        if (it == terms_.end()) {
            terms_.emplace(std::move(r), std::move(c));
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Rational coeff(const MultiIndex& r) const {
        auto it = terms_.find(r);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Poly& operator+=(const Poly& o) {
        check_dim(o);
        for (const auto& [r, c] : o.terms_) add_term(r, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        check_dim(o);
        for (const auto& [r, c] : o.terms_) add_term(r, -c);
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    Poly operator-() const {
        Poly p(dim_);
        for (const auto& [r, c] : terms_) p.terms_.emplace(r, -c);
        return p;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check_dim(b);
        Poly p(a.dim_);
        for (const auto& [ra, ca] : a.terms_) {
            for (const auto& [rb, cb] : b.terms_) {
                MultiIndex r(ra);
                for (std::size_t i = 0; i < r.size(); ++i) r[i] += rb[i];
                p.add_term(std::move(r), ca * cb);
            }
        }
        return p;
    }

    Poly& operator*=(const Rational& c) {
        if (c == 0) {
            terms_.clear();
        } else {
            for (auto& [r, v] : terms_) v *= c;
        }
        return *this;
    }
    friend Poly operator*(Poly p, const Rational& c) { return p *= c; }
    friend Poly operator*(const Rational& c, Poly p) { return p *= c; }

    friend bool operator==(const Poly& a, const Poly& b) {
        return a.dim_ == b.dim_ && a.terms_ == b.terms_;
    }

    Rational eval_rational(std::span<const Rational> x) const {
        if (static_cast<int>(x.size()) != dim_) throw InputError("Poly::eval_rational: point length mismatch");
        Rational acc = 0;
        for (const auto& [r, c] : terms_) {
            Rational t = c;
            for (std::size_t i = 0; i < r.size(); ++i)
                if (r[i] != 0) t *= rational_pow(x[i], r[i]);
            acc += t;
        }
        return acc;
    }

    double eval_double(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim_) throw InputError("Poly::eval_double: point length mismatch");
        double acc = 0;
        for (const auto& [r, c] : terms_) {
            double t = to_double(c);
            for (std::size_t i = 0; i < r.size(); ++i) {
                double b = x[i];
                for (std::uint32_t e = 0; e < r[i]; ++e) t *= b;
            }
            acc += t;
        }
        return acc;
    }

    Poly derivative(int axis) const {
        if (axis < 0 || axis >= dim_) throw InputError("Poly::derivative: axis out of range");
        Poly p(dim_);
        const auto a = static_cast<std::size_t>(axis);
        for (const auto& [r, c] : terms_) {
            if (r[a] == 0) continue;
            MultiIndex q(r);
            q[a] -= 1;
            p.add_term(std::move(q), c * r[a]);
        }
        return p;
    }

    // D^r p (iterated exact partial derivatives).
    Poly dpow(const MultiIndex& r) const {
        if (static_cast<int>(r.size()) != dim_) throw InputError("Poly::dpow: exponent length mismatch");
        Poly p = *this;
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::uint32_t e = 0; e < r[i]; ++e) p = p.derivative(static_cast<int>(i));
        return p;
    }

    // Antiderivative in one axis (integration constant 0).
    Poly integrate(int axis) const {
        if (axis < 0 || axis >= dim_) throw InputError("Poly::integrate: axis out of range");
        Poly p(dim_);
        const auto a = static_cast<std::size_t>(axis);
        for (const auto& [r, c] : terms_) {
            MultiIndex q(r);
            q[a] += 1;
            p.add_term(std::move(q), c / q[a]);
        }
        return p;
    }

    // Substitute x_axis := value; dimension is preserved, the axis just no longer occurs.
    Poly substitute(int axis, const Rational& value) const {
        if (axis < 0 || axis >= dim_) throw InputError("Poly::substitute: axis out of range");
        Poly p(dim_);
        const auto a = static_cast<std::size_t>(axis);
        for (const auto& [r, c] : terms_) {
            MultiIndex q(r);
            const auto e = q[a];
            q[a] = 0;
            p.add_term(std::move(q), c * rational_pow(value, e));
        }
        return p;
    }

    // p(x + a), expanded exactly via binomials. Axes with a_i = 0 are untouched.
    Poly shift(std::span<const Rational> a) const {
        if (static_cast<int>(a.size()) != dim_) throw InputError("Poly::shift: offset length mismatch");
        bool all_zero = true;
        for (const auto& v : a)
            if (v != 0) all_zero = false;
        if (all_zero) return *this;

        Poly out(dim_);
        for (const auto& [r, c] : terms_) {
            // expand c * prod_i (x_i + a_i)^{r_i}
            std::vector<std::pair<MultiIndex, Rational>> partial{{MultiIndex(r.size(), 0), c}};
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (r[i] == 0) continue;
                if (a[i] == 0) {
                    for (auto& [q, v] : partial) q[i] += r[i];
                    continue;
                }
                std::vector<std::pair<MultiIndex, Rational>> next;
                // binomial row for (x + a_i)^{r_i}
                BigInt binom = 1;
                std::vector<Rational> row(r[i] + 1);
                Rational apow = 1;
                for (std::uint32_t b = 0; b <= r[i]; ++b) {
                    // coefficient of x^{r_i - b}: C(r_i, b) * a^b  (b counts the a-powers)
                    row[b] = Rational(binom) * apow;
                    binom = binom * (r[i] - b) / (b + 1);
                    apow *= a[i];
                }
                for (const auto& [q, v] : partial) {
                    for (std::uint32_t b = 0; b <= r[i]; ++b) {
                        MultiIndex q2(q);
                        q2[i] += r[i] - b;
                        next.emplace_back(std::move(q2), v * row[b]);
                    }
                }
                partial = std::move(next);
            }
            for (auto& [q, v] : partial) out.add_term(std::move(q), std::move(v));
        }
        return out;
    }

    // Drop every term of total degree > k.
    Poly truncate_total(int k) const {
        Poly p(dim_);
        for (const auto& [r, c] : terms_) {
            if (static_cast<int>(mi_order(r)) <= k) p.terms_.emplace(r, c);
        }
        return p;
    }

    // Canonical rendering: graded-lex order, "a/b" rationals, e.g. "3/2*x1^2*x2 - x3".
    std::string to_string(const std::string& var_prefix = "x") const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [r, c] : terms_) {
            const bool neg = c < 0;
            const Rational mag = neg ? Rational(-c) : c;
            if (first) {
                if (neg) out += "-";
                first = false;
            } else {
                out += neg ? " - " : " + ";
            }
            std::string mono;
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (r[i] == 0) continue;
                if (!mono.empty()) mono += "*";
                mono += var_prefix + std::to_string(i + 1);
                if (r[i] > 1) mono += "^" + std::to_string(r[i]);
            }
            if (mono.empty()) {
                out += rational_str(mag);
            } else if (mag == 1) {
                out += mono;
            } else {
                out += rational_str(mag) + "*" + mono;
            }
        }
        return out;
    }

private:
    void check_dim(const Poly& o) const {
        if (dim_ != o.dim_) throw InputError("Poly: dimension mismatch");
    }

    int dim_;
    TermMap terms_;
};

}  // namespace chronoreach
