#include "igamix/solver.hpp"

#include <cmath>

namespace igamix {

MinresResult minres_solve(const std::function<void(const VecX&, VecX&)>& apply, const VecX& b, double tol,
                          long max_iter) {
    const long n = b.size();
    MinresResult res;
    res.x = VecX::Zero(n);
    const double beta1 = b.norm();
    if (beta1 == 0.0) {
        res.converged = true;
        return res;
    }
    if (max_iter <= 0) max_iter = 20 * n;

    VecX r1 = b, r2 = b, y = b;
    VecX v(n), w = VecX::Zero(n), w1 = VecX::Zero(n), w2 = VecX::Zero(n);
    double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
    double cs = -1.0, sn = 0.0;
    double target = tol;

    for (long it = 1; it <= max_iter; ++it) {
        v = y / beta;
        apply(v, y);
        if (it >= 2) y -= (beta / oldb) * r1;
        const double alfa = v.dot(y);
        y -= (alfa / beta) * r2;
        r1 = r2;
        r2 = y;
        oldb = beta;
        beta = r2.norm();

        const double oldeps = epsln;
        const double delta = cs * dbar + sn * alfa;
        double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;

        double gamma = std::hypot(gbar, beta);
        gamma = std::max(gamma, 1e-300);
        cs = gbar / gamma;
        sn = beta / gamma;
        const double phi = cs * phibar;
        phibar = sn * phibar;

        w1 = w2;
        w2 = w;
        w = (v - oldeps * w1 - delta * w2) / gamma;
        res.x += phi * w;
        res.iterations = it;

        if (phibar / beta1 <= target) {
            // verify against the true residual; tighten and continue if needed
            VecX mx(n);
            apply(res.x, mx);
            res.rel_residual = (mx - b).norm() / beta1;
            if (res.rel_residual <= tol) {
                res.converged = true;
                return res;
            }
            target *= 0.25;
        }
        y = r2;
    }
    VecX mx(n);
    apply(res.x, mx);
    res.rel_residual = (mx - b).norm() / beta1;
    res.converged = res.rel_residual <= tol;
    return res;
}

VecX dense_solve(const SpMat& m, const VecX& b, int max_dim) {
    if (m.rows() > max_dim)
        throw ConfigError("dense_solve: system too large for the dense path");
    const MatX dense = MatX(m);
    return dense.partialPivLu().solve(b);
}

namespace {

FieldSolution split_solution(const MixedSystem& sys, const VecX& x, double relres, long iters) {
    FieldSolution f;
    f.sigma = x.head(sys.n_sigma);
    f.u = x.segment(sys.n_sigma, sys.n_disp);
    f.p = x.tail(sys.n_press);
    f.rel_residual = relres;
    f.iterations = iters;
    return f;
}

}  // namespace

FieldSolution solve(const MixedSystem& sys, const SolveConfig& cfg) {
    const VecX b = sys.rhs();
    if (cfg.method == SolveConfig::Method::DirectDense) {
        const VecX x = dense_solve(sys.full_matrix(), b);
        VecX mx(b.size());
        sys.apply(x, mx);
        const double bn = b.norm();
        return split_solution(sys, x, bn > 0 ? (mx - b).norm() / bn : 0.0, 0);
    }
    auto op = [&sys](const VecX& x, VecX& y) { sys.apply(x, y); };
    const MinresResult r = minres_solve(op, b, cfg.tol, cfg.max_iter);
    if (!r.converged)
        throw NonConvergenceError("minres did not reach the requested tolerance", r.rel_residual);
    return split_solution(sys, r.x, r.rel_residual, r.iterations);
}

FieldSolution solve_trace_constrained(const MixedSystem& sys, const SolveConfig& cfg,
                                      const ElasticitySpaces& spaces, const MaterialParams& mat,
                                      const ProblemData& prob, double pinned_trace_integral) {
    if (!prob.bc.traction.empty())
        throw ConfigError("solve_trace_constrained: pure Dirichlet problems only");

    // I must be representable in the stress space
    VecX c_identity;
    {
        const SpMat gram = gram_sigma_l2(spaces);
        const VecX rhs = sigma_inner_with(spaces, [](const Vec3&) { return Mat3::Identity(); });
        Eigen::SimplicialLDLT<SpMat> chol(gram);
        c_identity = chol.solve(rhs);
        const double norm2 = spaces.n * domain_measure(spaces);
        const double res2 = std::max(0.0, norm2 - c_identity.dot(rhs));
        if (std::sqrt(res2) > 1e-8 * std::sqrt(norm2))
            throw ConfigError("solve_trace_constrained: identity tensor not contained in the stress space");
    }

    const VecX t = sigma_trace_integrals(spaces);
    const long n = sys.dim();
    const double pin = mat.lambda_inf ? pinned_trace_integral : 0.0;

    VecX b(n + 1);
    b << sys.rhs(), pin;
    auto op = [&](const VecX& x, VecX& y) {
        y.resize(n + 1);
        VecX core(n);
        sys.apply(x.head(n), core);
        y.head(n) = core;
        y.head(sys.n_sigma) += x[n] * t;
        y[n] = t.dot(x.head(sys.n_sigma));
    };
    const MinresResult r = minres_solve(op, b, cfg.tol, cfg.max_iter);
    if (!r.converged)
        throw NonConvergenceError("minres did not reach the requested tolerance", r.rel_residual);
    FieldSolution f = split_solution(sys, r.x.head(n), r.rel_residual, r.iterations);

    if (!mat.lambda_inf) {
        // <A(sigma + cI), I> = <u_D, I nu>
        const VecX bdry = assemble_boundary_term(spaces, prob);
        const double lhs_sigma = [&] {
            // <A sigma_h, I> via the compliance formula: (1/2mu)(tr sigma - n c tr sigma)
            const double coeff = (1.0 - spaces.n * mat.trace_coefficient()) / (2.0 * mat.mu);
            return coeff * t.dot(f.sigma);
        }();
        const double aII =
            (1.0 - spaces.n * mat.trace_coefficient()) / (2.0 * mat.mu) * spaces.n * domain_measure(spaces);
        const double rhs_val = bdry.dot(c_identity);
        const double c = (rhs_val - lhs_sigma) / aII;
        f.sigma += c * c_identity;
        f.trace_shift = c;
    }
    return f;
}

}  // namespace igamix
