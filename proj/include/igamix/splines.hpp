#pragma once

#include <array>
#include <utility>
#include <vector>

#include "igamix/types.hpp"

namespace igamix {

inline constexpr int kMaxDegree = 8;

/// p-open knot vector on [0,1]: first/last knot carry multiplicity p+1.
class KnotVector {
public:
    KnotVector(int degree, std::vector<double> knots);

    /// Uniform breakpoints i/n_elements with interior multiplicity p-r
    /// (r >= 0) or p+1 (r = -1, discontinuous).
    static KnotVector uniform_open(int degree, int n_elements, int regularity);

    int degree() const { return degree_; }
    const std::vector<double>& knots() const { return knots_; }
    int num_basis() const { return static_cast<int>(knots_.size()) - degree_ - 1; }

    std::vector<double> breakpoints() const;
    int multiplicity(double z) const;
    int num_elements() const;
    /// p - max interior multiplicity (p-1 when there are no interior knots).
    int regularity() const;

    /// Index i with knots[i] <= z < knots[i+1]; right-closed at z = 1.
    int find_span(double z) const;

private:
    int degree_;
    std::vector<double> knots_;
};

/// Univariate spline space S_p^r spanned by the Cox-de Boor basis of a knot vector.
class SplineSpace1D {
public:
    explicit SplineSpace1D(KnotVector kv) : kv_(std::move(kv)) {}

    int dim() const { return kv_.num_basis(); }
    int degree() const { return kv_.degree(); }
    int regularity() const { return kv_.regularity(); }
    int num_elements() const { return kv_.num_elements(); }
    const KnotVector& knot_vector() const { return kv_; }

    struct Span {
        int first = 0;  // index of the first (possibly) nonzero basis function
        int count = 0;
        std::array<double, kMaxDegree + 1> value{};
    };

    Span values(double z) const;
    Span derivatives(double z, int order = 1) const;

    /// All (value, derivative, ..., order nder) rows at z; out has
    /// (nder+1) x count entries, row-major. Returns first active index.
    int values_and_derivatives(double z, int nder, double* out) const;

    std::vector<std::pair<int, double>> eval_basis(double z) const;
    std::vector<std::pair<int, double>> eval_basis_derivative(double z, int order = 1) const;

    /// Knot insertion at z in (0,1). Returns the refined space and the
    /// coefficient transfer T (new_dim x dim) with c_new = T c_old.
    std::pair<SplineSpace1D, MatX> insert_knot(double z) const;

    /// Space S_{p-1}^{r-1} on the reduced knot vector together with the
    /// exact coefficient map D ((dim-1) x dim) of d/dz.
    std::pair<SplineSpace1D, MatX> derivative_space() const;

    double greville(int i) const;
    double eval(const VecX& coeffs, double z) const;
    double eval_derivative(const VecX& coeffs, double z) const;

    static SplineSpace1D uniform(int degree, int n_elements, int regularity) {
        return SplineSpace1D(KnotVector::uniform_open(degree, n_elements, regularity));
    }

private:
    KnotVector kv_;
};

/// Tensor product of univariate spline spaces, lexicographic DOF order
/// with the first direction running fastest.
class TensorSplineSpace {
public:
    explicit TensorSplineSpace(std::vector<SplineSpace1D> axes);

    int dim_space() const { return static_cast<int>(axes_.size()); }
    int dim() const { return dim_; }
    const SplineSpace1D& axis(int d) const { return axes_[static_cast<size_t>(d)]; }

    int linear_index(const std::array<int, 3>& idx) const {
        int id = idx[dim_space() - 1];
        for (int d = dim_space() - 2; d >= 0; --d) id = id * axes_[static_cast<size_t>(d)].dim() + idx[d];
        return id;
    }

    double eval(const VecX& coeffs, const Vec3& z) const;

private:
    std::vector<SplineSpace1D> axes_;
    int dim_;
};

}  // namespace igamix
