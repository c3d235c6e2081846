#pragma once

#include <cmath>
#include <vector>

#include "igamix/types.hpp"

namespace igamix {

/// Gauss-Legendre rule on [0,1]; exact for polynomials of degree 2n-1.
struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;

    static QuadratureRule gauss(int n) {
        QuadratureRule q;
        q.points.resize(static_cast<size_t>(n));
        q.weights.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            // Newton on P_n from the Chebyshev initial guess
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            q.points[static_cast<size_t>(n - 1 - i)] = 0.5 * (1.0 + x);
            q.weights[static_cast<size_t>(n - 1 - i)] = 1.0 / ((1.0 - x * x) * pp * pp);
        }
        return q;
    }

    /// Points/weights mapped to [a,b].
    QuadratureRule mapped(double a, double b) const {
        QuadratureRule q = *this;
        for (size_t i = 0; i < points.size(); ++i) {
            q.points[i] = a + (b - a) * points[i];
            q.weights[i] = weights[i] * (b - a);
        }
        return q;
    }
};

}  // namespace igamix
