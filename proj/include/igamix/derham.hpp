#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "igamix/geometry.hpp"
#include "igamix/splines.hpp"
#include "igamix/types.hpp"

namespace igamix {

/// Pullbacks onto the parametric domain: Value q∘F, Covariant J^T(v∘F),
/// Piola det(J)J^{-1}(v∘F), Density det(J)(q∘F).
enum class Pullback { Value, Covariant, Piola, Density };

/// A physical-domain space built from parametric tensor spline spaces and a
/// pullback; vector fields carry one tensor space per component, matrix
/// fields apply the same component layout to every row.
struct DiscreteSpace {
    enum class Rank { Scalar, Vector, MatrixRows };

    Pullback pullback = Pullback::Value;
    Rank rank = Rank::Scalar;
    int n = 2;
    std::vector<TensorSplineSpace> comps;
    std::vector<int> comp_offset;  // within one row

    int rows() const { return rank == Rank::MatrixRows ? n : 1; }
    int comp_count() const { return static_cast<int>(comps.size()); }
    int dofs_per_row() const { return comp_offset.back() + comps.back().dim(); }
    int dim() const { return rows() * dofs_per_row(); }

    int dof(int row, int comp, int tensor_index) const {
        return row * dofs_per_row() + comp_offset[static_cast<size_t>(comp)] + tensor_index;
    }
};

DiscreteSpace make_space(Pullback pb, DiscreteSpace::Rank rank, int n,
                         std::vector<TensorSplineSpace> comps);

/// V_{h,n}^k on an n_el^n uniform mesh with degree p and regularity r.
DiscreteSpace derham_space(int n, int k, int p, int r, int n_el);

/// One physical basis function evaluated at a point.
struct PhysicalBasisValue {
    int local = 0;  // patch-local dof index within the field
    int row = 0;
    Vec3 value = Vec3::Zero();  // vector value; scalar fields use value[0]
    double div = 0.0;           // physical divergence where meaningful
    Vec3 grad = Vec3::Zero();   // physical gradient of the scalar factor
};

std::vector<PhysicalBasisValue> eval_physical_basis(const DiscreteSpace& sp, const GeometryMap& patch,
                                                    const Vec3& zeta);

/// Residual of expanding the exterior derivative of every basis function of
/// `a` in `b` via the exact univariate coefficient maps, sampled at random
/// parametric points.
double exterior_derivative_residual(const DiscreteSpace& a, const DiscreteSpace& b, int samples = 20,
                                    unsigned seed = 2024);

/// A field over a multi-patch geometry: identical parametric layout per
/// patch plus local-to-global DOF maps with orientation signs.
struct FieldSpace {
    DiscreteSpace space;
    std::vector<std::vector<int>> dof_map;
    std::vector<std::vector<double>> dof_sign;
    int dim = 0;

    int local_dim() const { return space.dim(); }
};

/// The mixed elasticity triple (stress, displacement, multiplier).
struct ElasticitySpaces {
    Geometry geometry;
    int n = 2, p = 2, r = 0, n_el = 1;
    bool naive = false;
    bool couple_pressure = true;
    FieldSpace sigma, disp, press;

    int dim() const { return sigma.dim + disp.dim + press.dim; }
    int offset_sigma() const { return 0; }
    int offset_disp() const { return sigma.dim; }
    int offset_press() const { return sigma.dim + disp.dim; }
};

/// Spaces of the structured mixed discretization; requires p >= 2 and
/// 0 <= r <= p-2. With `naive` every field uses equal-degree splines with
/// the Value pullback (no structure, used by the instability probes).
ElasticitySpaces build_spaces(const Geometry& geo, int n_el, int p, int r, bool naive = false,
                              bool couple_pressure = true);

/// Global stress DOFs controlling tau·nu on the given faces.
std::vector<int> boundary_normal_dofs(const ElasticitySpaces& spaces, std::span<const PatchFace> faces);

/// The trace layer of one stress row on one face: tau_hat·nu_hat restricted
/// to the face equals trace_sign * sum_i c_{local_dofs[i]} B_i over the
/// (n-1)-dimensional face tensor space.
struct FaceLayer {
    PatchFace pf;
    int row = 0;
    std::vector<SplineSpace1D> face_axes;
    std::vector<int> local_dofs;
    double trace_sign = 1.0;
};

std::vector<FaceLayer> sigma_face_layers(const ElasticitySpaces& spaces, PatchFace pf);

}  // namespace igamix
