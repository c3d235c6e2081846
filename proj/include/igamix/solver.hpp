#pragma once

#include <functional>

#include "igamix/assembly.hpp"

namespace igamix {

struct SolveConfig {
    enum class Method { Minres, DirectDense };
    Method method = Method::Minres;
    double tol = 5e-8;   // relative Euclidean residual ||Mx-b||/||b||
    long max_iter = 0;   // 0: 20 * system size

    static SolveConfig minres(double tol = 5e-8, long max_iter = 0) {
        return {Method::Minres, tol, max_iter};
    }
    static SolveConfig direct() { return {Method::DirectDense, 5e-8, 0}; }
};

struct FieldSolution {
    VecX sigma, u, p;
    double rel_residual = 0.0;
    long iterations = 0;
    double trace_shift = 0.0;  // constant c added as c*I by the trace-constrained path
};

struct MinresResult {
    VecX x;
    double rel_residual = 0.0;
    long iterations = 0;
    bool converged = false;
};

/// MINRES from the three-term Lanczos recurrence, no preconditioner.
MinresResult minres_solve(const std::function<void(const VecX&, VecX&)>& apply, const VecX& b, double tol,
                          long max_iter);

/// Dense symmetric-indefinite solve; guarded to test-scale systems.
VecX dense_solve(const SpMat& m, const VecX& b, int max_dim = 2500);

FieldSolution solve(const MixedSystem& sys, const SolveConfig& cfg);

/// Pure-Dirichlet solve on the zero-trace stress subspace via one scalar
/// multiplier. For finite lambda the constant c*I is recovered from
/// <A(sigma+cI), I> = <u_D, I nu>; in the incompressible state the trace
/// integral is pinned to `pinned_trace_integral`.
FieldSolution solve_trace_constrained(const MixedSystem& sys, const SolveConfig& cfg,
                                      const ElasticitySpaces& spaces, const MaterialParams& mat,
                                      const ProblemData& prob, double pinned_trace_integral = 0.0);

}  // namespace igamix
