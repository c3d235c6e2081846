#include "igamix/derham.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace igamix {

DiscreteSpace make_space(Pullback pb, DiscreteSpace::Rank rank, int n,
                         std::vector<TensorSplineSpace> comps) {
    DiscreteSpace sp;
    sp.pullback = pb;
    sp.rank = rank;
    sp.n = n;
    sp.comps = std::move(comps);
    sp.comp_offset.resize(sp.comps.size());
    int off = 0;
    for (size_t c = 0; c < sp.comps.size(); ++c) {
        sp.comp_offset[c] = off;
        off += sp.comps[c].dim();
    }
    return sp;
}

namespace {

TensorSplineSpace tensor(int n, const std::array<int, 3>& degs, const std::array<int, 3>& regs, int n_el) {
    std::vector<SplineSpace1D> axes;
    for (int d = 0; d < n; ++d) axes.push_back(SplineSpace1D::uniform(degs[static_cast<size_t>(d)],
                                                                      n_el, regs[static_cast<size_t>(d)]));
    return TensorSplineSpace(std::move(axes));
}

}  // namespace

DiscreteSpace derham_space(int n, int k, int p, int r, int n_el) {
    if (n == 2) {
        switch (k) {
            case 0:
                return make_space(Pullback::Value, DiscreteSpace::Rank::Scalar, n,
                                  {tensor(2, {p, p, 0}, {r, r, 0}, n_el)});
            case 1:
                return make_space(Pullback::Piola, DiscreteSpace::Rank::Vector, n,
                                  {tensor(2, {p, p - 1, 0}, {r, r - 1, 0}, n_el),
                                   tensor(2, {p - 1, p, 0}, {r - 1, r, 0}, n_el)});
            case 2:
                return make_space(Pullback::Density, DiscreteSpace::Rank::Scalar, n,
                                  {tensor(2, {p - 1, p - 1, 0}, {r - 1, r - 1, 0}, n_el)});
            default:
                throw ConfigError("derham_space: 2D chain index must be 0..2");
        }
    }
    if (n == 3) {
        switch (k) {
            case 0:
                return make_space(Pullback::Value, DiscreteSpace::Rank::Scalar, n,
                                  {tensor(3, {p, p, p}, {r, r, r}, n_el)});
            case 1:
                return make_space(Pullback::Covariant, DiscreteSpace::Rank::Vector, n,
                                  {tensor(3, {p - 1, p, p}, {r - 1, r, r}, n_el),
                                   tensor(3, {p, p - 1, p}, {r, r - 1, r}, n_el),
                                   tensor(3, {p, p, p - 1}, {r, r, r - 1}, n_el)});
            case 2:
                return make_space(Pullback::Piola, DiscreteSpace::Rank::Vector, n,
                                  {tensor(3, {p, p - 1, p - 1}, {r, r - 1, r - 1}, n_el),
                                   tensor(3, {p - 1, p, p - 1}, {r - 1, r, r - 1}, n_el),
                                   tensor(3, {p - 1, p - 1, p}, {r - 1, r - 1, r}, n_el)});
            case 3:
                return make_space(Pullback::Density, DiscreteSpace::Rank::Scalar, n,
                                  {tensor(3, {p - 1, p - 1, p - 1}, {r - 1, r - 1, r - 1}, n_el)});
            default:
                throw ConfigError("derham_space: 3D chain index must be 0..3");
        }
    }
    throw ConfigError("derham_space: dimension must be 2 or 3");
}

std::vector<PhysicalBasisValue> eval_physical_basis(const DiscreteSpace& sp, const GeometryMap& patch,
                                                    const Vec3& zeta) {
    const GeoJet jet = patch.jet(zeta);
    if (jet.det <= 0.0) throw DegenerateGeometryError("eval_physical_basis: det J <= 0");
    const int n = sp.n;
    const Mat3 jinv_t = jet.adj.transpose() / jet.det;

    std::vector<PhysicalBasisValue> out;
    for (int c = 0; c < sp.comp_count(); ++c) {
        const auto& ts = sp.comps[static_cast<size_t>(c)];
        std::array<SplineSpace1D::Span, 3> val{}, der{};
        for (int d = 0; d < n; ++d) {
            val[static_cast<size_t>(d)] = ts.axis(d).values(zeta[d]);
            der[static_cast<size_t>(d)] = ts.axis(d).derivatives(zeta[d]);
        }
        const int c2 = n > 2 ? val[2].count : 1;
        for (int k3 = 0; k3 < c2; ++k3)
            for (int k2 = 0; k2 < (n > 1 ? val[1].count : 1); ++k2)
                for (int k1 = 0; k1 < val[0].count; ++k1) {
                    const std::array<int, 3> kk{k1, k2, k3};
                    std::array<int, 3> idx{val[0].first + k1, n > 1 ? val[1].first + k2 : 0,
                                           n > 2 ? val[2].first + k3 : 0};
                    double b = 1.0;
                    Vec3 gradp = Vec3::Zero();
                    for (int d = 0; d < n; ++d) {
                        double g = der[static_cast<size_t>(d)].value[static_cast<size_t>(kk[static_cast<size_t>(d)])];
                        for (int e = 0; e < n; ++e) {
                            if (e == d) continue;
                            g *= val[static_cast<size_t>(e)].value[static_cast<size_t>(kk[static_cast<size_t>(e)])];
                        }
                        gradp[d] = g;
                        b *= val[static_cast<size_t>(d)].value[static_cast<size_t>(kk[static_cast<size_t>(d)])];
                    }
                    const int ti = ts.linear_index(idx);

                    for (int row = 0; row < sp.rows(); ++row) {
                        PhysicalBasisValue pv;
                        pv.local = sp.dof(row, c, ti);
                        pv.row = row;
                        switch (sp.pullback) {
                            case Pullback::Value:
                                if (sp.rank == DiscreteSpace::Rank::Scalar) {
                                    pv.value[0] = b;
                                } else {
                                    pv.value = Vec3::Zero();
                                    pv.value[c] = b;
                                    pv.div = (jinv_t * gradp)[c];
                                }
                                pv.grad = jinv_t * gradp;
                                break;
                            case Pullback::Covariant:
                                pv.value = jinv_t.col(c) * b;
                                break;
                            case Pullback::Piola:
                                pv.value = jet.J.col(c) * (b / jet.det);
                                pv.div = gradp[c] / jet.det;
                                break;
                            case Pullback::Density:
                                pv.value[0] = b / jet.det;
                                if (sp.rank == DiscreteSpace::Rank::Vector) {
                                    pv.value = Vec3::Zero();
                                    pv.value[c] = b / jet.det;
                                }
                                break;
                        }
                        out.push_back(pv);
                    }
                }
    }
    return out;
}

namespace {

/// Apply the exact univariate derivative coefficient map along `dir` to a
/// coefficient tensor of `src`, producing coefficients in `dst`.
VecX apply_derivative_along(const TensorSplineSpace& src, const TensorSplineSpace& dst, const VecX& coeffs,
                            int dir) {
    const int n = src.dim_space();
    auto [low, D] = src.axis(dir).derivative_space();
    VecX out = VecX::Zero(dst.dim());
    std::array<int, 3> dims{src.axis(0).dim(), n > 1 ? src.axis(1).dim() : 1,
                            n > 2 ? src.axis(2).dim() : 1};
    for (int i3 = 0; i3 < dims[2]; ++i3)
        for (int i2 = 0; i2 < dims[1]; ++i2)
            for (int i1 = 0; i1 < dims[0]; ++i1) {
                const std::array<int, 3> src_idx{i1, i2, i3};
                const double c = coeffs[src.linear_index(src_idx)];
                if (c == 0.0) continue;
                const int id = src_idx[static_cast<size_t>(dir)];
                for (int j = 0; j < low.dim(); ++j) {
                    const double w = D(j, id);
                    if (w == 0.0) continue;
                    std::array<int, 3> dst_idx = src_idx;
                    dst_idx[static_cast<size_t>(dir)] = j;
                    out[dst.linear_index(dst_idx)] += w * c;
                }
            }
    return out;
}

double eval_tensor_derivative(const TensorSplineSpace& ts, const VecX& coeffs, const Vec3& z, int dir) {
    const int n = ts.dim_space();
    std::array<SplineSpace1D::Span, 3> sp{};
    for (int d = 0; d < n; ++d)
        sp[static_cast<size_t>(d)] =
            d == dir ? ts.axis(d).derivatives(z[d]) : ts.axis(d).values(z[d]);
    double out = 0.0;
    for (int k3 = 0; k3 < (n > 2 ? sp[2].count : 1); ++k3)
        for (int k2 = 0; k2 < (n > 1 ? sp[1].count : 1); ++k2)
            for (int k1 = 0; k1 < sp[0].count; ++k1) {
                std::array<int, 3> idx{sp[0].first + k1, n > 1 ? sp[1].first + k2 : 0,
                                       n > 2 ? sp[2].first + k3 : 0};
                double w = sp[0].value[static_cast<size_t>(k1)];
                if (n > 1) w *= sp[1].value[static_cast<size_t>(k2)];
                if (n > 2) w *= sp[2].value[static_cast<size_t>(k3)];
                out += coeffs[ts.linear_index(idx)] * w;
            }
    return out;
}

}  // namespace

double exterior_derivative_residual(const DiscreteSpace& a, const DiscreteSpace& b, int samples,
                                    unsigned seed) {
    const int n = a.n;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Vec3> pts(static_cast<size_t>(samples), Vec3::Zero());
    for (auto& z : pts)
        for (int d = 0; d < n; ++d) z[d] = uni(rng);

    enum class Op { Grad, Curl2, Curl3, Div };
    Op op;
    if (n == 2 && a.pullback == Pullback::Value && b.pullback == Pullback::Piola)
        op = Op::Curl2;
    else if (a.pullback == Pullback::Piola && b.pullback == Pullback::Density)
        op = Op::Div;
    else if (n == 3 && a.pullback == Pullback::Value && b.pullback == Pullback::Covariant)
        op = Op::Grad;
    else if (n == 3 && a.pullback == Pullback::Covariant && b.pullback == Pullback::Piola)
        op = Op::Curl3;
    else
        throw ConfigError("exterior_derivative_residual: spaces are not consecutive in the chain");

    double max_res = 0.0;
    // one row suffices: rows replicate the same parametric structure
    for (int c = 0; c < a.comp_count(); ++c) {
        const auto& src = a.comps[static_cast<size_t>(c)];
        for (int i = 0; i < src.dim(); ++i) {
            VecX e = VecX::Zero(src.dim());
            e[i] = 1.0;
            std::vector<VecX> expan(static_cast<size_t>(b.comp_count()));
            for (int bc = 0; bc < b.comp_count(); ++bc)
                expan[static_cast<size_t>(bc)] = VecX::Zero(b.comps[static_cast<size_t>(bc)].dim());

            switch (op) {
                case Op::Curl2:
                    // curl(q) = (d2 q, -d1 q)
                    expan[0] = apply_derivative_along(src, b.comps[0], e, 1);
                    expan[1] = -apply_derivative_along(src, b.comps[1], e, 0);
                    break;
                case Op::Div:
                    expan[0] = apply_derivative_along(src, b.comps[0], e, c);
                    break;
                case Op::Grad:
                    for (int d = 0; d < 3; ++d)
                        expan[static_cast<size_t>(d)] =
                            apply_derivative_along(src, b.comps[static_cast<size_t>(d)], e, d);
                    break;
                case Op::Curl3: {
                    // (curl v)_d = d_u v_w - d_w v_u with (d,u,w) cyclic
                    for (int d = 0; d < 3; ++d) {
                        const int u = (d + 1) % 3, w = (d + 2) % 3;
                        if (c == w)
                            expan[static_cast<size_t>(d)] +=
                                apply_derivative_along(src, b.comps[static_cast<size_t>(d)], e, u);
                        if (c == u)
                            expan[static_cast<size_t>(d)] -=
                                apply_derivative_along(src, b.comps[static_cast<size_t>(d)], e, w);
                    }
                    break;
                }
            }

            for (const auto& z : pts) {
                switch (op) {
                    case Op::Curl2: {
                        const double d2q = eval_tensor_derivative(src, e, z, 1);
                        const double d1q = eval_tensor_derivative(src, e, z, 0);
                        max_res = std::max(max_res, std::abs(d2q - b.comps[0].eval(expan[0], z)));
                        max_res = std::max(max_res, std::abs(-d1q - b.comps[1].eval(expan[1], z)));
                        break;
                    }
                    case Op::Div: {
                        const double d = eval_tensor_derivative(src, e, z, c);
                        max_res = std::max(max_res, std::abs(d - b.comps[0].eval(expan[0], z)));
                        break;
                    }
                    case Op::Grad: {
                        for (int d = 0; d < 3; ++d) {
                            const double g = eval_tensor_derivative(src, e, z, d);
                            max_res = std::max(
                                max_res, std::abs(g - b.comps[static_cast<size_t>(d)].eval(
                                                          expan[static_cast<size_t>(d)], z)));
                        }
                        break;
                    }
                    case Op::Curl3: {
                        for (int d = 0; d < 3; ++d) {
                            const int u = (d + 1) % 3, w = (d + 2) % 3;
                            double lhs = 0.0;
                            if (c == w) lhs += eval_tensor_derivative(src, e, z, u);
                            if (c == u) lhs -= eval_tensor_derivative(src, e, z, w);
                            max_res = std::max(
                                max_res, std::abs(lhs - b.comps[static_cast<size_t>(d)].eval(
                                                            expan[static_cast<size_t>(d)], z)));
                        }
                        break;
                    }
                }
            }
        }
    }
    return max_res;
}

namespace {

/// Union-find carrying a sign on the edge to the parent.
class SignedUnionFind {
public:
    explicit SignedUnionFind(int n) : parent_(static_cast<size_t>(n)), sign_(static_cast<size_t>(n), 1.0) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    std::pair<int, double> find(int i) {
        if (parent_[static_cast<size_t>(i)] == i) return {i, 1.0};
        auto [root, s] = find(parent_[static_cast<size_t>(i)]);
        parent_[static_cast<size_t>(i)] = root;
        sign_[static_cast<size_t>(i)] *= s;
        return {root, sign_[static_cast<size_t>(i)]};
    }
    // enforce value(a) = rel * value(b)
    void unite(int a, int b, double rel) {
        auto [ra, sa] = find(a);
        auto [rb, sb] = find(b);
        if (ra == rb) {
            if (std::abs(sa - rel * sb) > 0.5) throw ConfigError("inconsistent interface orientation signs");
            return;
        }
        // value(ra) = (rel*sb/sa) value(rb)
        parent_[static_cast<size_t>(ra)] = rb;
        sign_[static_cast<size_t>(ra)] = rel * sb / sa;
    }

private:
    std::vector<int> parent_;
    std::vector<double> sign_;
};

std::vector<int> tangent_axes(int n, int face) {
    std::vector<int> t;
    for (int d = 0; d < n; ++d)
        if (d != face_axis(face)) t.push_back(d);
    return t;
}

/// Tensor indices of one boundary layer; the face grid runs over the
/// tangential axes in ascending order with the normal index pinned.
std::vector<int> face_layer_indices(const TensorSplineSpace& ts, int face,
                                    const std::vector<int>& tangents) {
    const int axis = face_axis(face);
    const int pin = face_side(face) == 0 ? 0 : ts.axis(axis).dim() - 1;
    std::array<int, 3> idx{0, 0, 0};
    idx[static_cast<size_t>(axis)] = pin;
    std::vector<int> out;
    const int d0 = tangents[0];
    const int d1 = tangents.size() > 1 ? tangents[1] : -1;
    const int n0 = ts.axis(d0).dim();
    const int n1 = d1 >= 0 ? ts.axis(d1).dim() : 1;
    for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n0; ++i) {
            idx[static_cast<size_t>(d0)] = i;
            if (d1 >= 0) idx[static_cast<size_t>(d1)] = j;
            out.push_back(ts.linear_index(idx));
        }
    return out;
}

/// Map a face-grid index of side A to side B through the interface orientation.
std::pair<int, int> map_face_index(const Interface& itf, int i, int j, int n0, int n1) {
    std::array<int, 2> src{i, j};
    std::array<int, 2> dims{n0, n1};
    std::array<int, 2> dst{0, 0};
    for (int t = 0; t < 2; ++t) {
        const int m = itf.axis_map[static_cast<size_t>(t)];
        int v = src[static_cast<size_t>(t)];
        if (itf.flip[static_cast<size_t>(t)]) v = dims[static_cast<size_t>(t)] - 1 - v;
        dst[static_cast<size_t>(m)] = v;
    }
    return {dst[0], dst[1]};
}

FieldSpace couple_field(const DiscreteSpace& sp, const Geometry& geo, bool couple_normal_trace,
                        bool couple_value_trace) {
    const int np = geo.num_patches();
    const int local = sp.dim();
    SignedUnionFind uf(np * local);
    auto gid = [&](int patch, int loc) { return patch * local + loc; };

    for (const auto& itf : geo.interfaces) {
        const int ka = face_axis(itf.face_a);
        const int kb = face_axis(itf.face_b);
        const auto ta = tangent_axes(sp.n, itf.face_a);
        const auto tb = tangent_axes(sp.n, itf.face_b);
        const double side_sign = face_side(itf.face_a) == face_side(itf.face_b) ? -1.0 : 1.0;

        auto couple_comp = [&](int comp_a, int comp_b, double rel) {
            const auto& tsa = sp.comps[static_cast<size_t>(comp_a)];
            const auto& tsb = sp.comps[static_cast<size_t>(comp_b)];
            for (int t = 0; t < static_cast<int>(ta.size()); ++t) {
                const int dim_a = tsa.axis(ta[static_cast<size_t>(t)]).dim();
                const int mapped = itf.axis_map[static_cast<size_t>(t)];
                const int dim_b = tsb.axis(tb[static_cast<size_t>(mapped)]).dim();
                if (dim_a != dim_b) throw ConfigError("nonconforming interface: knot counts differ");
            }
            const auto la = face_layer_indices(tsa, itf.face_a, ta);
            const auto lb = face_layer_indices(tsb, itf.face_b, tb);
            if (la.size() != lb.size()) throw ConfigError("nonconforming interface: trace sizes differ");
            const int n0 = tsa.axis(ta[0]).dim();
            const int n1 = ta.size() > 1 ? tsa.axis(ta[1]).dim() : 1;
            const int m0 = tsb.axis(tb[0]).dim();
            for (int row = 0; row < sp.rows(); ++row)
                for (int j = 0; j < n1; ++j)
                    for (int i = 0; i < n0; ++i) {
                        auto [bi, bj] = map_face_index(itf, i, j, n0, n1);
                        const int a_loc = sp.dof(row, comp_a, la[static_cast<size_t>(i + n0 * j)]);
                        const int b_loc = sp.dof(row, comp_b, lb[static_cast<size_t>(bi + m0 * bj)]);
                        uf.unite(gid(itf.patch_a, a_loc), gid(itf.patch_b, b_loc), rel);
                    }
        };

        if (couple_normal_trace) couple_comp(ka, kb, side_sign);
        if (couple_value_trace)
            for (int c = 0; c < sp.comp_count(); ++c) couple_comp(c, c, 1.0);
    }

    FieldSpace fs;
    fs.space = sp;
    fs.dof_map.assign(static_cast<size_t>(np), std::vector<int>(static_cast<size_t>(local), -1));
    fs.dof_sign.assign(static_cast<size_t>(np), std::vector<double>(static_cast<size_t>(local), 1.0));
    std::vector<int> root_to_global(static_cast<size_t>(np * local), -1);
    int next = 0;
    for (int k = 0; k < np; ++k)
        for (int l = 0; l < local; ++l) {
            auto [root, s] = uf.find(gid(k, l));
            int& g = root_to_global[static_cast<size_t>(root)];
            if (g < 0) g = next++;
            fs.dof_map[static_cast<size_t>(k)][static_cast<size_t>(l)] = g;
            fs.dof_sign[static_cast<size_t>(k)][static_cast<size_t>(l)] = s;
        }
    fs.dim = next;
    return fs;
}

}  // namespace

ElasticitySpaces build_spaces(const Geometry& geo, int n_el, int p, int r, bool naive,
                              bool couple_pressure) {
    const int n = geo.n;
    if (n != 2 && n != 3) throw ConfigError("build_spaces: dimension must be 2 or 3");
    if (p < 2) throw ConfigError("build_spaces: requires p >= 2");
    if (r < 0 || r > p - 2) throw ConfigError("build_spaces: requires p > r+1 >= 1 (0 <= r <= p-2)");
    if (n_el < 1) throw ConfigError("build_spaces: n_el must be >= 1");
    if (naive && geo.num_patches() > 1)
        throw ConfigError("build_spaces: naive spaces are single-patch only");

    ElasticitySpaces out;
    out.geometry = geo;
    out.n = n;
    out.p = p;
    out.r = r;
    out.n_el = n_el;
    out.naive = naive;
    out.couple_pressure = couple_pressure;

    DiscreteSpace sig, dis, prs;
    if (naive) {
        std::vector<TensorSplineSpace> comps;
        const std::array<int, 3> degs{p, p, p}, regs{r, r, r};
        for (int c = 0; c < n; ++c) comps.push_back(tensor(n, degs, regs, n_el));
        sig = make_space(Pullback::Value, DiscreteSpace::Rank::MatrixRows, n, comps);
        dis = make_space(Pullback::Value, DiscreteSpace::Rank::Vector, n, comps);
        if (n == 2)
            prs = make_space(Pullback::Value, DiscreteSpace::Rank::Scalar, n,
                             {tensor(n, degs, regs, n_el)});
        else
            prs = make_space(Pullback::Value, DiscreteSpace::Rank::Vector, n, comps);
    } else if (n == 2) {
        const DiscreteSpace v1 = derham_space(2, 1, p, r, n_el);
        sig = make_space(Pullback::Piola, DiscreteSpace::Rank::MatrixRows, 2, v1.comps);
        const DiscreteSpace v2 = derham_space(2, 2, p, r, n_el);
        dis = make_space(Pullback::Density, DiscreteSpace::Rank::Vector, 2,
                         {v2.comps[0], v2.comps[0]});
        prs = derham_space(2, 0, p - 1, r, n_el);
    } else {
        const DiscreteSpace v2 = derham_space(3, 2, p + 1, r, n_el);
        sig = make_space(Pullback::Piola, DiscreteSpace::Rank::MatrixRows, 3, v2.comps);
        const DiscreteSpace v3 = derham_space(3, 3, p + 1, r, n_el);
        dis = make_space(Pullback::Density, DiscreteSpace::Rank::Vector, 3,
                         {v3.comps[0], v3.comps[0], v3.comps[0]});
        const DiscreteSpace v0 = derham_space(3, 0, p - 1, r, n_el);
        prs = make_space(Pullback::Value, DiscreteSpace::Rank::Vector, 3,
                         {v0.comps[0], v0.comps[0], v0.comps[0]});
    }

    out.sigma = couple_field(sig, geo, /*normal*/ true, /*value*/ false);
    out.disp = couple_field(dis, geo, false, false);
    out.press = couple_field(prs, geo, false, couple_pressure && !naive);
    return out;
}

std::vector<FaceLayer> sigma_face_layers(const ElasticitySpaces& spaces, PatchFace pf) {
    const DiscreteSpace& sp = spaces.sigma.space;
    const int comp = face_axis(pf.face);
    const auto tang = tangent_axes(sp.n, pf.face);
    const auto& ts = sp.comps[static_cast<size_t>(comp)];
    const auto layer = face_layer_indices(ts, pf.face, tang);
    std::vector<FaceLayer> out;
    for (int row = 0; row < sp.rows(); ++row) {
        FaceLayer fl;
        fl.pf = pf;
        fl.row = row;
        for (int t : tang) fl.face_axes.push_back(ts.axis(t));
        fl.trace_sign = face_side(pf.face) == 0 ? -1.0 : 1.0;
        for (int li : layer) fl.local_dofs.push_back(sp.dof(row, comp, li));
        out.push_back(std::move(fl));
    }
    return out;
}

std::vector<int> boundary_normal_dofs(const ElasticitySpaces& spaces, std::span<const PatchFace> faces) {
    std::vector<int> out;
    for (const auto& pf : faces) {
        if (pf.face < 0 || pf.face >= 2 * spaces.n) throw ConfigError("boundary part not face-aligned");
        for (const auto& fl : sigma_face_layers(spaces, pf))
            for (int loc : fl.local_dofs)
                out.push_back(spaces.sigma.dof_map[static_cast<size_t>(pf.patch)][static_cast<size_t>(loc)]);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace igamix
