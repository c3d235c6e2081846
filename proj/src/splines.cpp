#include "igamix/splines.hpp"

#include <algorithm>
#include <cmath>

namespace igamix {

KnotVector::KnotVector(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
    if (degree_ < 0) throw ConfigError("knot vector: degree must be >= 0");
    const int p = degree_;
    if (static_cast<int>(knots_.size()) < 2 * (p + 1))
        throw ConfigError("knot vector: too few knots for degree");
    for (size_t i = 1; i < knots_.size(); ++i)
        if (knots_[i] < knots_[i - 1]) throw ConfigError("knot vector: knots must be nondecreasing");
    for (int i = 0; i <= p; ++i) {
        if (knots_[static_cast<size_t>(i)] != 0.0) throw ConfigError("knot vector: not p-open at 0");
        if (knots_[knots_.size() - 1 - static_cast<size_t>(i)] != 1.0)
            throw ConfigError("knot vector: not p-open at 1");
    }
    if (knots_[static_cast<size_t>(p + 1)] == 0.0 || knots_[knots_.size() - p - 2] == 1.0)
        throw ConfigError("knot vector: end multiplicity exceeds p+1");
    // interior multiplicities at most p+1
    size_t i = static_cast<size_t>(p + 1);
    while (i < knots_.size() - p - 1) {
        size_t j = i;
        while (j < knots_.size() - p - 1 && knots_[j] == knots_[i]) ++j;
        if (static_cast<int>(j - i) > p + 1) throw ConfigError("knot vector: interior multiplicity > p+1");
        i = j;
    }
}

KnotVector KnotVector::uniform_open(int degree, int n_elements, int regularity) {
    if (n_elements < 1) throw ConfigError("knot vector: need at least one element");
    if (regularity < -1) throw ConfigError("knot vector: regularity must be >= -1");
    if (regularity > degree - 1 && n_elements > 1)
        throw ConfigError("knot vector: regularity must be <= p-1");
    const int p = degree;
    const int mult = (regularity < 0) ? p + 1 : p - regularity;
    std::vector<double> knots(static_cast<size_t>(p + 1), 0.0);
    for (int e = 1; e < n_elements; ++e)
        for (int m = 0; m < mult; ++m) knots.push_back(static_cast<double>(e) / n_elements);
    for (int i = 0; i <= p; ++i) knots.push_back(1.0);
    return KnotVector(degree, std::move(knots));
}

std::vector<double> KnotVector::breakpoints() const {
    std::vector<double> b;
    for (double k : knots_)
        if (b.empty() || k > b.back()) b.push_back(k);
    return b;
}

int KnotVector::multiplicity(double z) const {
    return static_cast<int>(std::count(knots_.begin(), knots_.end(), z));
}

int KnotVector::num_elements() const { return static_cast<int>(breakpoints().size()) - 1; }

int KnotVector::regularity() const {
    const int p = degree_;
    int maxmult = 0;
    size_t i = static_cast<size_t>(p + 1);
    while (i < knots_.size() - p - 1) {
        size_t j = i;
        while (j < knots_.size() - p - 1 && knots_[j] == knots_[i]) ++j;
        maxmult = std::max(maxmult, static_cast<int>(j - i));
        i = j;
    }
    return maxmult == 0 ? p - 1 : p - maxmult;
}

int KnotVector::find_span(double z) const {
    const int p = degree_;
    const int n = num_basis();
    if (z >= 1.0) {
        // right-closed: last span with positive width
        int s = n - 1;
        while (s > p && knots_[static_cast<size_t>(s)] == knots_[static_cast<size_t>(s + 1)]) --s;
        return s;
    }
    // binary search in [p, n-1]
    int lo = p, hi = n;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (knots_[static_cast<size_t>(mid)] > z)
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

namespace {

// Nonzero basis values of degree q at span (knot index) over the full knot
// vector; out[j] = B_{span-q+j,q}(z), j = 0..q. Cox-de Boor with 0/0 = 0.
void basis_values(const std::vector<double>& knots, int q, int span, double z, double* out) {
    out[0] = 1.0;
    std::array<double, kMaxDegree + 1> left{}, right{};
    for (int j = 1; j <= q; ++j) {
        left[static_cast<size_t>(j)] = z - knots[static_cast<size_t>(span + 1 - j)];
        right[static_cast<size_t>(j)] = knots[static_cast<size_t>(span + j)] - z;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double den = right[static_cast<size_t>(r + 1)] + left[static_cast<size_t>(j - r)];
            const double tmp = den != 0.0 ? out[r] / den : 0.0;
            out[r] = saved + right[static_cast<size_t>(r + 1)] * tmp;
            saved = left[static_cast<size_t>(j - r)] * tmp;
        }
        out[j] = saved;
    }
}

}  // namespace

SplineSpace1D::Span SplineSpace1D::values(double z) const {
    if (z < 0.0 || z > 1.0) throw std::domain_error("spline evaluation outside [0,1]");
    const int p = degree();
    Span s;
    const int span = kv_.find_span(z);
    s.first = span - p;
    s.count = p + 1;
    basis_values(kv_.knots(), p, span, z, s.value.data());
    return s;
}

int SplineSpace1D::values_and_derivatives(double z, int nder, double* out) const {
    if (z < 0.0 || z > 1.0) throw std::domain_error("spline evaluation outside [0,1]");
    const int p = degree();
    const auto& knots = kv_.knots();
    const int span = kv_.find_span(z);
    const int count = p + 1;

    // order 0
    basis_values(knots, p, span, z, out);

    // Derivative order m of B_{i,p} expands in degree p-m bases of the same
    // knot vector with weights built by repeated first-order lowering.
    std::array<double, kMaxDegree + 1> low{};
    for (int m = 1; m <= nder; ++m) {
        double* row = out + m * count;
        const int q = p - m;  // target degree
        if (q < 0) {
            for (int j = 0; j < count; ++j) row[j] = 0.0;
            continue;
        }
        // values of degree-q bases: B_{span-q+j,q}, j = 0..q
        basis_values(knots, q, span, z, low.data());
        for (int j = 0; j < count; ++j) row[j] = 0.0;
        // weights a[k]: der^m B_{i,p} = sum_k a_k B_{i+k,p-m}; build iteratively
        for (int j = 0; j < count; ++j) {
            const int i = span - p + j;  // source basis index
            std::array<double, kMaxDegree + 2> a{}, anew{};
            a[0] = 1.0;
            int width = 1;  // a_0..a_{width-1} valid, expansion in degree p-(level) bases
            for (int level = 1; level <= m; ++level) {
                const int qq = p - level + 1;  // degree being differentiated
                for (int k = 0; k <= width; ++k) anew[static_cast<size_t>(k)] = 0.0;
                for (int k = 0; k < width; ++k) {
                    const int ii = i + k;
                    const double d1 = knots[static_cast<size_t>(ii + qq)] - knots[static_cast<size_t>(ii)];
                    const double d2 =
                        knots[static_cast<size_t>(ii + qq + 1)] - knots[static_cast<size_t>(ii + 1)];
                    if (d1 != 0.0) anew[static_cast<size_t>(k)] += a[static_cast<size_t>(k)] * qq / d1;
                    if (d2 != 0.0) anew[static_cast<size_t>(k + 1)] -= a[static_cast<size_t>(k)] * qq / d2;
                }
                width += 1;
                a = anew;
            }
            // accumulate: B_{i+k, q} is low[(i+k) - (span-q)] when in range
            for (int k = 0; k < width; ++k) {
                const int idx = i + k - (span - q);
                if (idx >= 0 && idx <= q) row[j] += a[static_cast<size_t>(k)] * low[static_cast<size_t>(idx)];
            }
        }
    }
    return span - p;
}

SplineSpace1D::Span SplineSpace1D::derivatives(double z, int order) const {
    const int p = degree();
    std::array<double, (kMaxDegree + 1) * 3> buf{};
    if (order > 2) throw ConfigError("spline derivatives: order > 2 via derivative_space chaining");
    Span s;
    s.first = values_and_derivatives(z, order, buf.data());
    s.count = p + 1;
    for (int j = 0; j <= p; ++j) s.value[static_cast<size_t>(j)] = buf[static_cast<size_t>(order * (p + 1) + j)];
    return s;
}

std::vector<std::pair<int, double>> SplineSpace1D::eval_basis(double z) const {
    const Span s = values(z);
    std::vector<std::pair<int, double>> out;
    for (int j = 0; j < s.count; ++j) out.emplace_back(s.first + j, s.value[static_cast<size_t>(j)]);
    return out;
}

std::vector<std::pair<int, double>> SplineSpace1D::eval_basis_derivative(double z, int order) const {
    if (order != 1) throw ConfigError("eval_basis_derivative supports order 1; chain derivative_space instead");
    if (degree() < 1) throw ConfigError("derivative of a degree-0 spline basis");
    const Span s = derivatives(z, 1);
    std::vector<std::pair<int, double>> out;
    for (int j = 0; j < s.count; ++j) out.emplace_back(s.first + j, s.value[static_cast<size_t>(j)]);
    return out;
}

std::pair<SplineSpace1D, MatX> SplineSpace1D::insert_knot(double z) const {
    if (!(z > 0.0 && z < 1.0)) throw std::domain_error("knot insertion requires z in (0,1)");
    const int p = degree();
    const auto& knots = kv_.knots();
    if (kv_.multiplicity(z) >= p + 1) throw std::domain_error("knot already at full multiplicity p+1");
    const int k = kv_.find_span(z);
    const int n = dim();
    std::vector<double> refined = knots;
    refined.insert(refined.begin() + k + 1, z);
    MatX transfer = MatX::Zero(n + 1, n);
    for (int i = 0; i <= n; ++i) {
        if (i <= k - p) {
            transfer(i, i) = 1.0;
        } else if (i > k) {
            transfer(i, i - 1) = 1.0;
        } else {
            const double den = knots[static_cast<size_t>(i + p)] - knots[static_cast<size_t>(i)];
            const double alpha = den != 0.0 ? (z - knots[static_cast<size_t>(i)]) / den : 0.0;
            transfer(i, i) = alpha;
            transfer(i, i - 1) = 1.0 - alpha;
        }
    }
    return {SplineSpace1D(KnotVector(p, std::move(refined))), std::move(transfer)};
}

std::pair<SplineSpace1D, MatX> SplineSpace1D::derivative_space() const {
    const int p = degree();
    if (p < 1) throw ConfigError("derivative_space requires p >= 1");
    if (regularity() < 0) throw ConfigError("derivative_space requires interior regularity >= 0");
    const auto& knots = kv_.knots();
    std::vector<double> reduced(knots.begin() + 1, knots.end() - 1);
    const int n = dim();
    MatX map = MatX::Zero(n - 1, n);
    for (int j = 0; j < n - 1; ++j) {
        const double den = knots[static_cast<size_t>(j + p + 1)] - knots[static_cast<size_t>(j + 1)];
        map(j, j + 1) = p / den;
        map(j, j) = -p / den;
    }
    return {SplineSpace1D(KnotVector(p - 1, std::move(reduced))), std::move(map)};
}

double SplineSpace1D::greville(int i) const {
    const int p = degree();
    const auto& knots = kv_.knots();
    double s = 0.0;
    for (int j = 1; j <= p; ++j) s += knots[static_cast<size_t>(i + j)];
    return p > 0 ? s / p : 0.5 * (knots[static_cast<size_t>(i)] + knots[static_cast<size_t>(i + 1)]);
}

double SplineSpace1D::eval(const VecX& coeffs, double z) const {
    const Span s = values(z);
    double out = 0.0;
    for (int j = 0; j < s.count; ++j) out += coeffs[s.first + j] * s.value[static_cast<size_t>(j)];
    return out;
}

double SplineSpace1D::eval_derivative(const VecX& coeffs, double z) const {
    const Span s = derivatives(z, 1);
    double out = 0.0;
    for (int j = 0; j < s.count; ++j) out += coeffs[s.first + j] * s.value[static_cast<size_t>(j)];
    return out;
}

TensorSplineSpace::TensorSplineSpace(std::vector<SplineSpace1D> axes) : axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > 3) throw ConfigError("tensor space needs 1..3 axes");
    dim_ = 1;
    for (const auto& a : axes_) dim_ *= a.dim();
}

double TensorSplineSpace::eval(const VecX& coeffs, const Vec3& z) const {
    const int d = dim_space();
    std::array<SplineSpace1D::Span, 3> spans;
    for (int k = 0; k < d; ++k) spans[static_cast<size_t>(k)] = axes_[static_cast<size_t>(k)].values(z[k]);
    double out = 0.0;
    std::array<int, 3> idx{0, 0, 0};
    const int c2 = d > 2 ? spans[2].count : 1;
    const int c1 = d > 1 ? spans[1].count : 1;
    for (int k3 = 0; k3 < c2; ++k3)
        for (int k2 = 0; k2 < c1; ++k2)
            for (int k1 = 0; k1 < spans[0].count; ++k1) {
                idx = {spans[0].first + k1, d > 1 ? spans[1].first + k2 : 0, d > 2 ? spans[2].first + k3 : 0};
                double w = spans[0].value[static_cast<size_t>(k1)];
                if (d > 1) w *= spans[1].value[static_cast<size_t>(k2)];
                if (d > 2) w *= spans[2].value[static_cast<size_t>(k3)];
                out += coeffs[linear_index(idx)] * w;
            }
    return out;
}

}  // namespace igamix
