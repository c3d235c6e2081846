#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <stdexcept>
#include <string>

namespace igamix {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

/// Invalid degree/regularity combination, malformed config, nonconforming patches.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// det J <= 0 at an evaluation point.
class DegenerateGeometryError : public std::runtime_error {
public:
    explicit DegenerateGeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Iterative solver exhausted its iteration budget.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& msg, double best_residual)
        : std::runtime_error(msg), best_residual(best_residual) {}
    double best_residual;
};

/// Determinant of the top-left n x n block of a padded 3x3 matrix.
inline double det_n(const Mat3& m, int n) {
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return m.determinant();
}

/// Adjugate of the top-left n x n block, padded back to 3x3 (unused entries zero).
inline Mat3 adj_n(const Mat3& m, int n) {
    Mat3 a = Mat3::Zero();
    if (n == 2) {
        a(0, 0) = m(1, 1);
        a(0, 1) = -m(0, 1);
        a(1, 0) = -m(1, 0);
        a(1, 1) = m(0, 0);
        return a;
    }
    a(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    a(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    a(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    a(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    a(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    a(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    a(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    a(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    a(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return a;
}

}  // namespace igamix
