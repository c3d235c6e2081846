#pragma once

#include <cmath>
#include <limits>

#include "igamix/types.hpp"

namespace igamix {

/// Isotropic homogeneous material; the incompressible limit is a
/// distinguished state rather than a large lambda.
struct MaterialParams {
    double mu = 1.0;
    double lambda = 0.0;
    bool lambda_inf = false;
    int n = 2;

    static MaterialParams make(double lambda, double mu, int n) {
        if (mu <= 0.0) throw ConfigError("material: mu must be positive");
        if (lambda < 0.0) throw ConfigError("material: lambda must be nonnegative");
        return {mu, lambda, false, n};
    }
    static MaterialParams incompressible(double mu, int n) {
        if (mu <= 0.0) throw ConfigError("material: mu must be positive");
        return {mu, 0.0, true, n};
    }

    /// lambda/(n lambda + 2 mu); 1/n in the incompressible limit.
    double trace_coefficient() const {
        if (lambda_inf) return 1.0 / n;
        return lambda / (n * lambda + 2.0 * mu);
    }
};

/// Antisymmetric part as a scalar (n=2) or axial 3-vector (n=3).
inline double skew2(const Mat3& m) { return m(1, 0) - m(0, 1); }

inline Vec3 skew3(const Mat3& m) {
    return Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

/// Skew for either dimension, padded into a Vec3 ([s,0,0] for n=2).
inline Vec3 skew(const Mat3& m, int n) {
    if (n == 2) return Vec3(skew2(m), 0.0, 0.0);
    if (n == 3) return skew3(m);
    throw ConfigError("skew: dimension must be 2 or 3");
}

/// Xi M = M^T - tr(M) I (3D only).
inline Mat3 xi(const Mat3& m) { return m.transpose() - m.trace() * Mat3::Identity(); }

/// Inverse of Xi: M^T - tr(M)/2 I.
inline Mat3 xi_inv(const Mat3& m) { return m.transpose() - 0.5 * m.trace() * Mat3::Identity(); }

/// A sigma = (1/2mu)(sigma - lambda/(n lambda + 2 mu) tr(sigma) I).
inline Mat3 compliance_apply(const MaterialParams& mat, const Mat3& sigma) {
    Mat3 out = sigma;
    const double c = mat.trace_coefficient();
    const double tr = sigma.topLeftCorner(mat.n, mat.n).trace();
    for (int i = 0; i < mat.n; ++i) out(i, i) -= c * tr;
    return out / (2.0 * mat.mu);
}

/// C eps = 2 mu eps + lambda tr(eps) I; undefined for the incompressible state.
inline Mat3 stiffness_apply(const MaterialParams& mat, const Mat3& eps) {
    if (mat.lambda_inf)
        throw ConfigError("stiffness_apply: compliance not invertible for the incompressible state");
    Mat3 out = 2.0 * mat.mu * eps;
    const double tr = eps.topLeftCorner(mat.n, mat.n).trace();
    for (int i = 0; i < mat.n; ++i) out(i, i) += mat.lambda * tr;
    return out;
}

inline Mat3 sym_grad(const Mat3& grad_u) { return 0.5 * (grad_u + grad_u.transpose()); }

}  // namespace igamix
