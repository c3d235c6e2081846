#pragma once

#include <functional>
#include <string>

#include "igamix/derham.hpp"
#include "igamix/operators.hpp"
#include "igamix/quadrature.hpp"

namespace igamix {

struct BoundarySpec {
    std::vector<PatchFace> dirichlet;
    std::vector<PatchFace> traction;
};

/// Data functions are evaluated at parametric points of a patch together
/// with the mapped physical point.
struct ProblemData {
    std::function<Vec3(int patch, const Vec3& zeta, const Vec3& x)> body_force;
    std::function<Vec3(int patch, const Vec3& zeta, const Vec3& x)> dirichlet_u;
    std::function<Vec3(int patch, const Vec3& zeta, const Vec3& x, const Vec3& unit_normal)> traction;
    BoundarySpec bc;
};

/// Assembled saddle-point blocks. A is stored upper-triangular (use the
/// self-adjoint view); traction data is imposed strongly, eliminated rows
/// keep a scaled identity diagonal.
struct MixedSystem {
    int n_sigma = 0, n_disp = 0, n_press = 0;
    SpMat A;   // sigma x sigma, upper triangle
    SpMat B1;  // disp x sigma
    SpMat B2;  // press x sigma
    VecX g_sigma, g_disp, g_press;
    std::vector<int> fixed_dofs;
    VecX fixed_values;  // over fixed_dofs
    double fixed_diag = 1.0;

    int dim() const { return n_sigma + n_disp + n_press; }
    VecX rhs() const;
    void apply(const VecX& x, VecX& y) const;
    SpMat full_matrix() const;
    void write_matrix_market(const std::string& path) const;
};

MixedSystem assemble(const ElasticitySpaces& spaces, const MaterialParams& mat, const ProblemData& prob,
                     int threads = 1);

/// g_sigma alone: <u_D, tau_i . nu> over the Dirichlet faces.
VecX assemble_boundary_term(const ElasticitySpaces& spaces, const ProblemData& prob);

/// Gram matrices (full storage, symmetric).
SpMat gram_sigma_hdiv(const ElasticitySpaces& spaces);
SpMat gram_sigma_l2(const ElasticitySpaces& spaces);
SpMat gram_disp_l2(const ElasticitySpaces& spaces);
SpMat gram_press_l2(const ElasticitySpaces& spaces);

/// Integral of tr(tau_i) over the domain, one entry per sigma DOF.
VecX sigma_trace_integrals(const ElasticitySpaces& spaces);

/// <field, tau_i>_{L2} for a matrix-valued function of the physical point.
VecX sigma_inner_with(const ElasticitySpaces& spaces,
                      const std::function<Mat3(const Vec3& x)>& field);

/// Domain measure |Omega| by quadrature.
double domain_measure(const ElasticitySpaces& spaces);

}  // namespace igamix
