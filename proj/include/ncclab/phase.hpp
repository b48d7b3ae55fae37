#pragma once

#include <cmath>
#include <complex>

namespace ncclab {

/// Double-double helpers for computing e^{i a b} when the product a*b is far
/// too large for the ~16 significant digits of a plain double to leave any
/// accuracy in the reduced angle. Gap lengths in assembled potentials reach
/// 1e6 and beyond, so the reduction carries ~32 digits.
namespace dd {

struct Double2 {
    double hi{0.0};
    double lo{0.0};
};

inline Double2 two_sum(double a, double b) {
    const double s = a + b;
    const double v = s - a;
    const double e = (a - (s - v)) + (b - v);
    return {s, e};
}

inline Double2 quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

inline Double2 two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline Double2 add(const Double2& a, const Double2& b) {
    Double2 s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline Double2 mul(const Double2& a, const Double2& b) {
    Double2 p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline Double2 mul(const Double2& a, double b) { return mul(a, Double2{b, 0.0}); }

// 2*pi to ~32 significant digits.
inline constexpr double kTwoPiHi = 6.283185307179586476925286766559;
inline constexpr double kTwoPiLo = 2.4492935982947063545446749985077e-16;

}  // namespace dd

/// (a*b) mod 2*pi, computed with an exact two-product and a double-double
/// remainder so the result is accurate even when |a*b| ~ 1e15.
inline double reduce_angle(double a, double b) {
    dd::Double2 prod = dd::two_prod(a, b);
    const dd::Double2 two_pi{dd::kTwoPiHi, dd::kTwoPiLo};
    // One Newton-style pass is enough: n is exact below 2^53 turns.
    const double n = std::floor(prod.hi / dd::kTwoPiHi);
    dd::Double2 corr = dd::mul(two_pi, -n);
    dd::Double2 r = dd::add(prod, corr);
    while (r.hi >= dd::kTwoPiHi) r = dd::add(r, dd::mul(two_pi, -1.0));
    while (r.hi < 0.0) r = dd::add(r, two_pi);
    return r.hi + r.lo;
}

/// e^{i theta}
inline std::complex<double> expi(double theta) {
    return {std::cos(theta), std::sin(theta)};
}

/// e^{i a b} with full-precision angle reduction.
inline std::complex<double> expi_prod(double a, double b) {
    return expi(reduce_angle(a, b));
}

/// e^{i k g} for complex k in the closed upper half-plane and a real gap
/// length g >= 0: the real part of the exponent uses the careful reduction,
/// the decaying factor e^{-Im k * g} is harmless in double.
inline std::complex<double> gap_phase(std::complex<double> k, double g) {
    const double damp = std::exp(-k.imag() * g);
    return damp * expi_prod(k.real(), g);
}

}  // namespace ncclab
