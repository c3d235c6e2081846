#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "igamix/splines.hpp"
#include "igamix/types.hpp"

namespace igamix {

/// Map value with first and second parametric derivatives at one point.
struct GeoJet {
    Vec3 x = Vec3::Zero();
    Mat3 J = Mat3::Identity();  // J(i,j) = dF_i/dzeta_j
    std::array<Mat3, 3> d2 = {Mat3::Zero(), Mat3::Zero(),
                              Mat3::Zero()};  // d2[i](j,k) = d^2 F_i / dzeta_j dzeta_k
    double det = 1.0;                         // of the n x n block
    Mat3 adj = Mat3::Identity();              // adj * J = det * I on the n x n block
};

struct JacobianPack {
    Mat3 J;
    double det;
    Mat3 adj;
};

/// Patch parametrization F: (0,1)^n -> R^n.
class GeometryMap {
public:
    virtual ~GeometryMap() = default;
    virtual int dim() const = 0;
    virtual GeoJet jet(const Vec3& zeta) const = 0;

    Vec3 value(const Vec3& zeta) const { return jet(zeta).x; }

    /// Polynomial degree of the parametrization per direction (1 for affine).
    virtual int spline_degree() const { return 1; }
    /// Interior regularity of the parametrization (large when globally smooth).
    virtual int spline_regularity() const { return 1000; }
};

/// (J, det J, adj J); throws DegenerateGeometryError when det J <= 0.
JacobianPack jacobian_pack(const GeometryMap& map, const Vec3& zeta);

struct PatchFace {
    int patch = 0;
    int face = 0;  // axis = face/2, side = face%2
    friend bool operator==(const PatchFace&, const PatchFace&) = default;
};

inline int face_axis(int face) { return face / 2; }
inline int face_side(int face) { return face % 2; }

/// Conforming patch interface; tangential axes of face_a map to those of
/// face_b through axis_map with optional direction flips.
struct Interface {
    int patch_a = 0, face_a = 0;
    int patch_b = 0, face_b = 0;
    std::array<int, 2> axis_map{0, 1};
    std::array<bool, 2> flip{false, false};
};

/// A domain as a collection of patches; a single patch is the common case.
struct Geometry {
    int n = 2;
    std::vector<std::shared_ptr<const GeometryMap>> patches;
    std::vector<Interface> interfaces;

    int num_patches() const { return static_cast<int>(patches.size()); }
    const GeometryMap& patch(int k) const { return *patches[static_cast<size_t>(k)]; }
    /// Exterior (patch, face) pairs: faces not claimed by any interface.
    std::vector<PatchFace> exterior_faces() const;
};

class IdentityMap final : public GeometryMap {
public:
    explicit IdentityMap(int n) : n_(n) {}
    int dim() const override { return n_; }
    GeoJet jet(const Vec3& zeta) const override;

private:
    int n_;
};

/// x = origin + L * zeta.
class AffineMap final : public GeometryMap {
public:
    AffineMap(int n, Vec3 origin, Mat3 linear) : n_(n), x0_(origin), L_(linear) {}
    int dim() const override { return n_; }
    GeoJet jet(const Vec3& zeta) const override;

private:
    int n_;
    Vec3 x0_;
    Mat3 L_;
};

/// F(z1,z2) = (z1, z2 - z1^2 + z1); det J = 1 everywhere.
class DeformedSquareMap final : public GeometryMap {
public:
    int dim() const override { return 2; }
    GeoJet jet(const Vec3& zeta) const override;
    int spline_degree() const override { return 2; }
};

/// Bilinear quad from four corners (counterclockwise from zeta=(0,0)).
class BilinearMap final : public GeometryMap {
public:
    BilinearMap(Vec3 c00, Vec3 c10, Vec3 c11, Vec3 c01)
        : c00_(c00), c10_(c10), c11_(c11), c01_(c01) {}
    int dim() const override { return 2; }
    GeoJet jet(const Vec3& zeta) const override;

private:
    Vec3 c00_, c10_, c11_, c01_;
};

/// Tensor B-spline / NURBS patch defined by a control net and weights.
class SplineGeometry final : public GeometryMap {
public:
    SplineGeometry(int n, std::vector<SplineSpace1D> axes, MatX control_points, VecX weights);

    int dim() const override { return n_; }
    GeoJet jet(const Vec3& zeta) const override;
    int spline_degree() const override;
    int spline_regularity() const override;

    const TensorSplineSpace& basis() const { return basis_; }
    const MatX& control_points() const { return control_; }
    const VecX& weights() const { return weights_; }
    bool is_rational() const { return rational_; }

private:
    int n_;
    TensorSplineSpace basis_;
    MatX control_;  // basis_.dim() x n
    VecX weights_;
    bool rational_;
};

/// Bi-/tri-degree interpolation of `f` at tensor Greville points of a
/// single-element patch on the given parametric cell.
std::shared_ptr<SplineGeometry> fit_spline_patch(const GeometryMap& f, const Vec3& lo, const Vec3& hi,
                                                 int degree);

/// Named geometries used by the experiments:
///   unit_square, deformed_square, cook, ring3d, deformed_square_9patch,
///   unit_square_2patch, cube_2patch, unit_cube
Geometry geometry_catalog(const std::string& name);

/// Spline geometry from a JSON control-net description (degrees, knots,
/// control_points, weights).
Geometry geometry_from_json_file(const std::string& path);

}  // namespace igamix
