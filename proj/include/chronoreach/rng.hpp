#pragma once

#include <cstdint>
#include <random>

namespace chronoreach {

// mt19937_64 with hand-rolled mappings: the engine's output sequence is fixed by
// the standard, while std distributions are not; this keeps seeded runs identical
// across platforms and toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }  // [0,1)

    double uniform(double a, double b) { return a + (b - a) * unit(); }

    // inclusive bounds
    long uniform_int(long a, long b) {
        const auto span = static_cast<std::uint64_t>(b - a) + 1;
        return a + static_cast<long>(mul_shift(eng_(), span));
    }

    double gaussian() {
        // Box-Muller on explicit uniforms, deterministic
        double u1 = unit();
        while (u1 <= 0.0) u1 = unit();
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    static std::uint64_t mul_shift(std::uint64_t x, std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * n) >> 64);
    }

    std::mt19937_64 eng_;
};

// Stable per-task seed derivation (splitmix64 finalizer over mixed words).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t z = base ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xbf58476d1ce4e5b9ULL);
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace chronoreach
