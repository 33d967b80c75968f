#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace chronoreach {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline BigInt factorial(unsigned n) {
    BigInt r = 1;
    for (unsigned i = 2; i <= n; ++i) r *= i;
    return r;
}

inline Rational rational_pow(const Rational& q, std::uint32_t e) {
    Rational r = 1;
    for (std::uint32_t i = 0; i < e; ++i) r *= q;
    return r;
}

inline double to_double(const Rational& q) { return q.template convert_to<double>(); }

// Canonical text: "n" for integers, "n/d" otherwise (d > 0, gcd-reduced by the type).
inline std::string rational_str(const Rational& q) {
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

// Exact finite-decimal conversion: "0.25" -> 1/4. Digits only; sign handled by caller.
inline Rational rational_from_decimal(const std::string& int_digits, const std::string& frac_digits) {
    BigInt num = int_digits.empty() ? BigInt(0) : BigInt(int_digits);
    BigInt den = 1;
    for (char c : frac_digits) {
        (void)c;
        num *= 10;
        den *= 10;
    }
    if (!frac_digits.empty()) num += BigInt(frac_digits);
    return Rational(num, den);
}

}  // namespace chronoreach
