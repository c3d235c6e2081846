#include "igamix/geometry.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "igamix/autodiff.hpp"

namespace igamix {

JacobianPack jacobian_pack(const GeometryMap& map, const Vec3& zeta) {
    const GeoJet j = map.jet(zeta);
    if (j.det <= 0.0) throw DegenerateGeometryError("det J <= 0 at parametric point");
    return {j.J, j.det, j.adj};
}

std::vector<PatchFace> Geometry::exterior_faces() const {
    std::vector<PatchFace> out;
    for (int k = 0; k < num_patches(); ++k)
        for (int f = 0; f < 2 * n; ++f) {
            bool internal = false;
            for (const auto& itf : interfaces)
                if ((itf.patch_a == k && itf.face_a == f) || (itf.patch_b == k && itf.face_b == f))
                    internal = true;
            if (!internal) out.push_back({k, f});
        }
    return out;
}

GeoJet IdentityMap::jet(const Vec3& zeta) const {
    GeoJet g;
    g.x = zeta;
    if (n_ == 2) g.x[2] = 0.0;
    g.J = Mat3::Identity();
    g.det = 1.0;
    g.adj = adj_n(g.J, n_);
    return g;
}

GeoJet AffineMap::jet(const Vec3& zeta) const {
    GeoJet g;
    g.x = x0_ + L_ * zeta;
    g.J = L_;
    g.det = det_n(L_, n_);
    g.adj = adj_n(L_, n_);
    return g;
}

GeoJet DeformedSquareMap::jet(const Vec3& zeta) const {
    GeoJet g;
    g.x = Vec3(zeta[0], zeta[1] - zeta[0] * zeta[0] + zeta[0], 0.0);
    g.J = Mat3::Identity();
    g.J(1, 0) = -2.0 * zeta[0] + 1.0;
    g.d2[1](0, 0) = -2.0;
    g.det = 1.0;
    g.adj = adj_n(g.J, 2);
    return g;
}

GeoJet BilinearMap::jet(const Vec3& zeta) const {
    const double a = zeta[0], b = zeta[1];
    GeoJet g;
    g.x = (1 - a) * (1 - b) * c00_ + a * (1 - b) * c10_ + a * b * c11_ + (1 - a) * b * c01_;
    const Vec3 da = -(1 - b) * c00_ + (1 - b) * c10_ + b * c11_ - b * c01_;
    const Vec3 db = -(1 - a) * c00_ - a * c10_ + a * c11_ + (1 - a) * c01_;
    const Vec3 dab = c00_ - c10_ + c11_ - c01_;
    g.J = Mat3::Identity();
    g.J.col(0).head(2) = da.head(2);
    g.J.col(1).head(2) = db.head(2);
    g.J(2, 2) = 1.0;
    g.J(0, 2) = g.J(1, 2) = g.J(2, 0) = g.J(2, 1) = 0.0;
    for (int i = 0; i < 2; ++i) {
        g.d2[static_cast<size_t>(i)](0, 1) = dab[i];
        g.d2[static_cast<size_t>(i)](1, 0) = dab[i];
    }
    g.det = det_n(g.J, 2);
    g.adj = adj_n(g.J, 2);
    return g;
}

SplineGeometry::SplineGeometry(int n, std::vector<SplineSpace1D> axes, MatX control_points, VecX weights)
    : n_(n), basis_(std::move(axes)), control_(std::move(control_points)), weights_(std::move(weights)) {
    if (basis_.dim_space() != n_) throw ConfigError("spline geometry: axes count must equal dimension");
    if (control_.rows() != basis_.dim() || control_.cols() != n_)
        throw ConfigError("spline geometry: control net size mismatch");
    if (weights_.size() == 0) weights_ = VecX::Ones(basis_.dim());
    if (weights_.size() != basis_.dim()) throw ConfigError("spline geometry: weights size mismatch");
    if (weights_.minCoeff() <= 0.0) throw ConfigError("spline geometry: weights must be positive");
    rational_ = (weights_.array() != 1.0).any();
}

int SplineGeometry::spline_degree() const {
    int q = 0;
    for (int d = 0; d < n_; ++d) q = std::max(q, basis_.axis(d).degree());
    return q;
}

int SplineGeometry::spline_regularity() const {
    int s = 1000;
    for (int d = 0; d < n_; ++d) s = std::min(s, basis_.axis(d).regularity());
    return s;
}

GeoJet SplineGeometry::jet(const Vec3& zeta) const {
    // tensor-combine univariate value/derivative tables into homogeneous
    // coordinates (x*w, w), then divide with second-order chain rule
    std::array<std::array<double, 3 * (kMaxDegree + 1)>, 3> tab{};
    std::array<int, 3> first{};
    std::array<int, 3> cnt{};
    for (int d = 0; d < n_; ++d) {
        first[static_cast<size_t>(d)] =
            basis_.axis(d).values_and_derivatives(zeta[d], 2, tab[static_cast<size_t>(d)].data());
        cnt[static_cast<size_t>(d)] = basis_.axis(d).degree() + 1;
    }

    std::array<Dual2, 4> hom;  // numerators then weight
    for (auto& h : hom) h = Dual2(0.0);

    std::array<int, 3> k{0, 0, 0};
    const int c2 = n_ > 2 ? cnt[2] : 1;
    const int c1 = n_ > 1 ? cnt[1] : 1;
    for (k[2] = 0; k[2] < c2; ++k[2])
        for (k[1] = 0; k[1] < c1; ++k[1])
            for (k[0] = 0; k[0] < cnt[0]; ++k[0]) {
                Dual2 b(1.0);
                // product of univariate bases as a Dual2 in zeta
                Dual2 parts[3];
                for (int d = 0; d < n_; ++d) {
                    const int c = cnt[static_cast<size_t>(d)];
                    const double v = tab[static_cast<size_t>(d)][static_cast<size_t>(k[d])];
                    const double dv = tab[static_cast<size_t>(d)][static_cast<size_t>(c + k[d])];
                    const double ddv = tab[static_cast<size_t>(d)][static_cast<size_t>(2 * c + k[d])];
                    Dual2 u;
                    u.v = v;
                    u.g[d] = dv;
                    u.h(d, d) = ddv;
                    parts[d] = u;
                }
                b = parts[0];
                for (int d = 1; d < n_; ++d) b = b * parts[d];
                std::array<int, 3> idx{first[0] + k[0], n_ > 1 ? first[1] + k[1] : 0,
                                       n_ > 2 ? first[2] + k[2] : 0};
                const int li = basis_.linear_index(idx);
                const double w = weights_[li];
                for (int c = 0; c < n_; ++c) {
                    Dual2 t = b;
                    t.v *= control_(li, c) * w;
                    t.g *= control_(li, c) * w;
                    t.h *= control_(li, c) * w;
                    hom[static_cast<size_t>(c)] = hom[static_cast<size_t>(c)] + t;
                }
                Dual2 tw = b;
                tw.v *= w;
                tw.g *= w;
                tw.h *= w;
                hom[3] = hom[3] + tw;
            }

    GeoJet g;
    g.J = Mat3::Zero();
    g.J(2, 2) = 1.0;
    if (n_ == 2) g.J(2, 2) = 1.0;
    for (int c = 0; c < n_; ++c) {
        const Dual2 fc = rational_ ? hom[static_cast<size_t>(c)] / hom[3] : hom[static_cast<size_t>(c)];
        g.x[c] = fc.v;
        for (int d = 0; d < n_; ++d) g.J(c, d) = fc.g[d];
        g.d2[static_cast<size_t>(c)] = fc.h;
    }
    if (n_ == 2) {
        g.x[2] = 0.0;
        g.J(2, 2) = 1.0;
    }
    g.det = det_n(g.J, n_);
    g.adj = adj_n(g.J, n_);
    return g;
}

std::shared_ptr<SplineGeometry> fit_spline_patch(const GeometryMap& f, const Vec3& lo, const Vec3& hi,
                                                 int degree) {
    const int n = f.dim();
    std::vector<SplineSpace1D> axes;
    for (int d = 0; d < n; ++d) axes.push_back(SplineSpace1D::uniform(degree, 1, degree - 1));
    TensorSplineSpace basis(axes);
    const int m = degree + 1;

    // univariate collocation at Greville abscissae
    MatX colloc = MatX::Zero(m, m);
    const auto& ax = axes[0];
    for (int i = 0; i < m; ++i)
        for (auto [j, v] : ax.eval_basis(ax.greville(i))) colloc(i, j) = v;
    const MatX colloc_inv = colloc.inverse();

    const int total = basis.dim();
    MatX samples(total, n);
    std::array<int, 3> idx{};
    for (int i3 = 0; i3 < (n > 2 ? m : 1); ++i3)
        for (int i2 = 0; i2 < (n > 1 ? m : 1); ++i2)
            for (int i1 = 0; i1 < m; ++i1) {
                idx = {i1, i2, i3};
                Vec3 z = Vec3::Zero();
                for (int d = 0; d < n; ++d)
                    z[d] = lo[d] + (hi[d] - lo[d]) * ax.greville(idx[static_cast<size_t>(d)]);
                samples.row(basis.linear_index(idx)) = f.value(z).transpose().head(n);
            }

    // apply the inverse collocation along each direction
    MatX coef = samples;
    std::array<int, 3> dims{m, n > 1 ? m : 1, n > 2 ? m : 1};
    for (int dir = 0; dir < n; ++dir) {
        MatX next = coef;
        for (int i3 = 0; i3 < dims[2]; ++i3)
            for (int i2 = 0; i2 < dims[1]; ++i2)
                for (int i1 = 0; i1 < dims[0]; ++i1) {
                    std::array<int, 3> id{i1, i2, i3};
                    Vec3 acc = Vec3::Zero();
                    for (int kk = 0; kk < m; ++kk) {
                        std::array<int, 3> src = id;
                        src[static_cast<size_t>(dir)] = kk;
                        acc.head(n) += colloc_inv(id[static_cast<size_t>(dir)], kk) *
                                       coef.row(basis.linear_index(src)).transpose();
                    }
                    next.row(basis.linear_index(id)) = acc.head(n).transpose();
                }
        coef = next;
    }
    return std::make_shared<SplineGeometry>(n, axes, coef, VecX());
}

namespace {

std::shared_ptr<SplineGeometry> make_ring3d() {
    // quarter annulus (radii 1..2) swept linearly in z; exact NURBS arc
    const double w = std::sqrt(0.5);
    std::vector<SplineSpace1D> axes{SplineSpace1D::uniform(1, 1, 0), SplineSpace1D::uniform(2, 1, 1),
                                    SplineSpace1D::uniform(1, 1, 0)};
    TensorSplineSpace basis(axes);
    MatX cp(basis.dim(), 3);
    VecX wt(basis.dim());
    const double radii[2] = {1.0, 2.0};
    const double arc_x[3] = {1.0, 1.0, 0.0};
    const double arc_y[3] = {0.0, 1.0, 1.0};
    const double arc_w[3] = {1.0, w, 1.0};
    for (int iz = 0; iz < 2; ++iz)
        for (int ia = 0; ia < 3; ++ia)
            for (int ir = 0; ir < 2; ++ir) {
                const int li = basis.linear_index({ir, ia, iz});
                cp(li, 0) = radii[ir] * arc_x[ia];
                cp(li, 1) = radii[ir] * arc_y[ia];
                cp(li, 2) = static_cast<double>(iz);
                wt[li] = arc_w[ia];
            }
    return std::make_shared<SplineGeometry>(3, axes, cp, wt);
}

Geometry make_9patch_deformed_square() {
    Geometry g;
    g.n = 2;
    DeformedSquareMap global;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            const Vec3 lo(i / 3.0, j / 3.0, 0.0);
            const Vec3 hi((i + 1) / 3.0, (j + 1) / 3.0, 0.0);
            g.patches.push_back(fit_spline_patch(global, lo, hi, 2));
        }
    auto id = [](int i, int j) { return i + 3 * j; };
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 2; ++i) g.interfaces.push_back({id(i, j), 1, id(i + 1, j), 0, {0, 1}, {}});
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 3; ++i) g.interfaces.push_back({id(i, j), 3, id(i, j + 1), 2, {0, 1}, {}});
    return g;
}

Geometry split_box_2patch(int n) {
    Geometry g;
    g.n = n;
    Mat3 l = Mat3::Identity();
    l(0, 0) = 0.5;
    g.patches.push_back(std::make_shared<AffineMap>(n, Vec3::Zero(), l));
    g.patches.push_back(std::make_shared<AffineMap>(n, Vec3(0.5, 0, 0), l));
    g.interfaces.push_back({0, 1, 1, 0, {0, 1}, {}});
    return g;
}

}  // namespace

Geometry geometry_catalog(const std::string& name) {
    Geometry g;
    if (name == "unit_square") {
        g.n = 2;
        g.patches.push_back(std::make_shared<IdentityMap>(2));
    } else if (name == "unit_cube") {
        g.n = 3;
        g.patches.push_back(std::make_shared<IdentityMap>(3));
    } else if (name == "deformed_square") {
        g.n = 2;
        g.patches.push_back(std::make_shared<DeformedSquareMap>());
    } else if (name == "cook") {
        g.n = 2;
        g.patches.push_back(std::make_shared<BilinearMap>(Vec3(0, 0, 0), Vec3(48, 44, 0), Vec3(48, 60, 0),
                                                          Vec3(0, 44, 0)));
    } else if (name == "ring3d") {
        g.n = 3;
        g.patches.push_back(make_ring3d());
    } else if (name == "deformed_square_9patch") {
        g = make_9patch_deformed_square();
    } else if (name == "unit_square_2patch") {
        g = split_box_2patch(2);
    } else if (name == "cube_2patch") {
        g = split_box_2patch(3);
    } else {
        throw ConfigError("unknown geometry: " + name);
    }
    return g;
}

Geometry geometry_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open geometry file: " + path);
    nlohmann::json j;
    in >> j;
    const int n = static_cast<int>(j.at("degrees").size());
    std::vector<SplineSpace1D> axes;
    for (int d = 0; d < n; ++d) {
        const int p = j.at("degrees")[static_cast<size_t>(d)].get<int>();
        std::vector<double> knots = j.at("knots")[static_cast<size_t>(d)].get<std::vector<double>>();
        axes.emplace_back(KnotVector(p, std::move(knots)));
    }
    TensorSplineSpace basis(axes);
    const auto& cps = j.at("control_points");
    if (static_cast<int>(cps.size()) != basis.dim())
        throw ConfigError("geometry file: control point count mismatch");
    MatX cp(basis.dim(), n);
    for (int i = 0; i < basis.dim(); ++i)
        for (int d = 0; d < n; ++d) cp(i, d) = cps[static_cast<size_t>(i)][static_cast<size_t>(d)].get<double>();
    VecX wt;
    if (j.contains("weights")) {
        const auto wlist = j.at("weights").get<std::vector<double>>();
        wt = Eigen::Map<const VecX>(wlist.data(), static_cast<long>(wlist.size()));
    }
    Geometry g;
    g.n = n;
    g.patches.push_back(std::make_shared<SplineGeometry>(n, axes, cp, wt));
    return g;
}

}  // namespace igamix
