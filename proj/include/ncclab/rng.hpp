#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace ncclab {

/// splitmix64: tiny, seedable, platform-stable. Used everywhere a test or
/// experiment needs reproducible randomness (std:: distributions are not
/// bit-stable across standard libraries).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// uniform in the closed unit disc (rejection)
    std::complex<double> unit_disc() {
        for (;;) {
            const double x = uniform(-1.0, 1.0);
            const double y = uniform(-1.0, 1.0);
            if (x * x + y * y <= 1.0) return {x, y};
        }
    }

    /// uniform on the unit circle
    std::complex<double> unit_circle() {
        const double t =
            uniform(0.0, 2.0 * 3.141592653589793238462643383279502884);
        return {std::cos(t), std::sin(t)};
    }

private:
    std::uint64_t state_;
};

}  // namespace ncclab
