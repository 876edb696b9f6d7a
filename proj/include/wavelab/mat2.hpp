#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace wavelab {

using cplx = std::complex<double>;

/// 2x2 complex matrix, the common currency between all frequency-domain
/// objects (propagators, diagonalizers, multiplier symbols).
struct Mat2 {
    cplx a11{}, a12{}, a21{}, a22{};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }
    static Mat2 diag(cplx d1, cplx d2) { return {d1, 0.0, 0.0, d2}; }

    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 operator*(cplx s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    Mat2 operator*(double s) const { return *this * cplx(s); }
    Mat2& operator+=(const Mat2& o) { return *this = *this + o; }
    Mat2& operator-=(const Mat2& o) { return *this = *this - o; }
    Mat2& operator*=(cplx s) { return *this = *this * s; }

    cplx det() const { return a11 * a22 - a12 * a21; }
    cplx trace() const { return a11 + a22; }

    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    Mat2 adjoint() const {
        return {std::conj(a11), std::conj(a21), std::conj(a12), std::conj(a22)};
    }

    Mat2 inverse() const {
        cplx d = det();
        if (std::abs(d) == 0.0)
            throw std::domain_error("Mat2::inverse: singular matrix");
        cplx s = 1.0 / d;
        return {a22 * s, -a12 * s, -a21 * s, a11 * s};
    }

    /// Operator (spectral) norm: largest singular value.
    double norm() const {
        // eigenvalues of A^H A via trace/determinant
        double t = std::norm(a11) + std::norm(a12) + std::norm(a21) + std::norm(a22);
        double d = std::norm(det());
        double disc = t * t - 4.0 * d;
        if (disc < 0.0) disc = 0.0;
        return std::sqrt(0.5 * (t + std::sqrt(disc)));
    }

    double frobenius() const {
        return std::sqrt(std::norm(a11) + std::norm(a12) + std::norm(a21) + std::norm(a22));
    }

    double max_abs() const {
        return std::max(std::max(std::abs(a11), std::abs(a12)),
                        std::max(std::abs(a21), std::abs(a22)));
    }

    std::array<cplx, 2> apply(const std::array<cplx, 2>& v) const {
        return {a11 * v[0] + a12 * v[1], a21 * v[0] + a22 * v[1]};
    }

    bool finite() const {
        auto ok = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
        return ok(a11) && ok(a12) && ok(a21) && ok(a22);
    }
};

inline Mat2 operator*(cplx s, const Mat2& m) { return m * s; }
inline Mat2 operator*(double s, const Mat2& m) { return m * cplx(s); }

inline double vec_norm(const std::array<cplx, 2>& v) {
    return std::sqrt(std::norm(v[0]) + std::norm(v[1]));
}

}  // namespace wavelab
