#pragma once

#include <cmath>

#include "igamix/types.hpp"

namespace igamix {

/// Forward-mode scalar carrying value, gradient and Hessian w.r.t. up to
/// three seed variables. Unused directions stay zero, so the same type
/// serves 2D and 3D expressions.
struct Dual2 {
    double v = 0.0;
    Vec3 g = Vec3::Zero();
    Mat3 h = Mat3::Zero();

    Dual2() = default;
    Dual2(double value) : v(value) {}  // NOLINT: implicit constants are intended

    static Dual2 variable(double value, int axis) {
        Dual2 d(value);
        d.g[axis] = 1.0;
        return d;
    }

    Dual2 operator-() const {
        Dual2 r;
        r.v = -v;
        r.g = -g;
        r.h = -h;
        return r;
    }
};

inline Dual2 operator+(const Dual2& a, const Dual2& b) {
    Dual2 r;
    r.v = a.v + b.v;
    r.g = a.g + b.g;
    r.h = a.h + b.h;
    return r;
}

inline Dual2 operator-(const Dual2& a, const Dual2& b) {
    Dual2 r;
    r.v = a.v - b.v;
    r.g = a.g - b.g;
    r.h = a.h - b.h;
    return r;
}

inline Dual2 operator*(const Dual2& a, const Dual2& b) {
    Dual2 r;
    r.v = a.v * b.v;
    r.g = a.g * b.v + b.g * a.v;
    r.h = a.h * b.v + b.h * a.v + a.g * b.g.transpose() + b.g * a.g.transpose();
    return r;
}

/// Chain rule for a unary map with first and second derivative at a.v.
inline Dual2 unary(const Dual2& a, double f, double df, double ddf) {
    Dual2 r;
    r.v = f;
    r.g = df * a.g;
    r.h = df * a.h + ddf * a.g * a.g.transpose();
    return r;
}

inline Dual2 inv(const Dual2& a) {
    const double iv = 1.0 / a.v;
    return unary(a, iv, -iv * iv, 2.0 * iv * iv * iv);
}

inline Dual2 operator/(const Dual2& a, const Dual2& b) { return a * inv(b); }

inline Dual2 sin(const Dual2& a) { return unary(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Dual2 cos(const Dual2& a) { return unary(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Dual2 exp(const Dual2& a) {
    const double e = std::exp(a.v);
    return unary(a, e, e, e);
}
inline Dual2 sqrt(const Dual2& a) {
    const double s = std::sqrt(a.v);
    return unary(a, s, 0.5 / s, -0.25 / (s * a.v));
}

inline Dual2 pow_int(const Dual2& a, int k) {
    Dual2 r(1.0);
    for (int i = 0; i < k; ++i) r = r * a;
    return r;
}

}  // namespace igamix
