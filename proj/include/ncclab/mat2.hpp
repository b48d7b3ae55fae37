#pragma once

#include <cmath>
#include <complex>

namespace ncclab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Dense 2x2 complex matrix with value semantics. Entry layout:
///   [ m00 m01 ]
///   [ m10 m11 ]
struct Mat2 {
    cplx m00{0.0}, m01{0.0}, m10{0.0}, m11{0.0};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(cplx d0, cplx d1) { return {d0, 0.0, 0.0, d1}; }

    Mat2 operator+(const Mat2& o) const {
        return {m00 + o.m00, m01 + o.m01, m10 + o.m10, m11 + o.m11};
    }
    Mat2 operator-(const Mat2& o) const {
        return {m00 - o.m00, m01 - o.m01, m10 - o.m10, m11 - o.m11};
    }
    Mat2 operator*(const Mat2& o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
                m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
    }
    Mat2 operator*(cplx s) const { return {s * m00, s * m01, s * m10, s * m11}; }

    cplx det() const { return m00 * m11 - m01 * m10; }
    cplx trace() const { return m00 + m11; }
};

inline Mat2 operator*(cplx s, const Mat2& m) { return m * s; }

inline double frobenius_norm(const Mat2& m) {
    return std::sqrt(std::norm(m.m00) + std::norm(m.m01) + std::norm(m.m10) +
                     std::norm(m.m11));
}

/// Operator norm on l2(C^2), via the closed form for the singular values:
/// s_max^2 = (g1 + sqrt(g1^2 - 4 g2)) / 2 with g1 = ||M||_F^2, g2 = |det M|^2.
inline double operator_norm(const Mat2& m) {
    const double g1 = std::norm(m.m00) + std::norm(m.m01) + std::norm(m.m10) +
                      std::norm(m.m11);
    const double g2 = std::norm(m.det());
    double disc = g1 * g1 - 4.0 * g2;
    if (disc < 0.0) disc = 0.0;  // roundoff
    return std::sqrt(0.5 * (g1 + std::sqrt(disc)));
}

/// sinh(s)/s with a series fallback near s = 0.
inline cplx sinhc(cplx s) {
    if (std::abs(s) < 1e-4) {
        const cplx s2 = s * s;
        return 1.0 + s2 / 6.0 * (1.0 + s2 / 20.0);
    }
    return std::sinh(s) / s;
}

/// exp(M) for 2x2 complex M via the trace split M = (tr/2) I + N with N
/// traceless and N^2 = (N00^2 + N01*N10) I:
///   exp(M) = e^{tr/2} (cosh(s) I + sinh(s)/s * N),  s^2 = N00^2 + N01*N10.
inline Mat2 expm(const Mat2& m) {
    const cplx half_tr = 0.5 * m.trace();
    const Mat2 n{m.m00 - half_tr, m.m01, m.m10, m.m11 - half_tr};
    const cplx s = std::sqrt(n.m00 * n.m00 + n.m01 * n.m10);
    const cplx ch = std::cosh(s);
    const cplx shc = sinhc(s);
    const cplx scale = std::exp(half_tr);
    return {scale * (ch + shc * n.m00), scale * (shc * n.m01),
            scale * (shc * n.m10), scale * (ch + shc * n.m11)};
}

}  // namespace ncclab
