#include "igamix/assembly.hpp"

#include <algorithm>
#include <fstream>
#include <atomic>
#include <future>
#include <thread>

namespace igamix {

namespace {

struct Tab1D {
    int count = 0;
    std::vector<int> first;    // per element
    std::vector<double> val;   // [(e*q + k)*count + j]
    std::vector<double> der;
};

Tab1D tabulate(const SplineSpace1D& s, int n_el, const QuadratureRule& unit) {
    Tab1D t;
    t.count = s.degree() + 1;
    const int q = static_cast<int>(unit.points.size());
    t.first.resize(static_cast<size_t>(n_el));
    t.val.resize(static_cast<size_t>(n_el * q * t.count));
    t.der.resize(static_cast<size_t>(n_el * q * t.count));
    std::vector<double> buf(static_cast<size_t>(2 * t.count));
    for (int e = 0; e < n_el; ++e)
        for (int k = 0; k < q; ++k) {
            const double z = (e + unit.points[static_cast<size_t>(k)]) / n_el;
            const int first = s.values_and_derivatives(z, 1, buf.data());
            t.first[static_cast<size_t>(e)] = first;
            for (int j = 0; j < t.count; ++j) {
                t.val[static_cast<size_t>((e * q + k) * t.count + j)] = buf[static_cast<size_t>(j)];
                t.der[static_cast<size_t>((e * q + k) * t.count + j)] =
                    buf[static_cast<size_t>(t.count + j)];
            }
        }
    return t;
}

struct CompTab {
    const TensorSplineSpace* ts = nullptr;
    std::array<Tab1D, 3> tab;
    int nloc = 1;  // active bases per element
};

CompTab make_comp_tab(const TensorSplineSpace& ts, int n, int n_el, const QuadratureRule& unit) {
    CompTab c;
    c.ts = &ts;
    c.nloc = 1;
    for (int d = 0; d < n; ++d) {
        c.tab[static_cast<size_t>(d)] = tabulate(ts.axis(d), n_el, unit);
        c.nloc *= ts.axis(d).degree() + 1;
    }
    return c;
}

/// Flattened per-quad-point data of one field's active basis functions.
/// For sigma, entries are per-row-independent: vectors V and divergences.
struct FieldQP {
    std::vector<int> loc;      // local dof within one row (comp_offset + tensor index)
    std::vector<Vec3> V;       // physical vector value (or e_c * scalar)
    std::vector<double> div;   // physical divergence (sigma kinds)
    std::vector<double> sval;  // scalar value (u/p kinds)
    std::vector<int> comp;     // owning component
};

struct ElementContext {
    int n = 2, q = 1, n_el = 1;
    std::array<int, 3> el{0, 0, 0};
    std::vector<CompTab>* comps = nullptr;

    // per quad point per comp: pointers into tables
    void basis_at(int qp_lin, const GeoJet& jet, Pullback pb, FieldQP& out, bool with_grad_div) const {
        out.loc.clear();
        out.V.clear();
        out.div.clear();
        out.sval.clear();
        out.comp.clear();
        const Mat3 jinv_t = jet.adj.transpose() / jet.det;
        std::array<int, 3> kq{qp_lin % q, (qp_lin / q) % q, qp_lin / (q * q)};
        int comp_off = 0;
        for (size_t ci = 0; ci < comps->size(); ++ci) {
            const CompTab& ct = (*comps)[ci];
            std::array<const double*, 3> v{}, dv{};
            std::array<int, 3> cnt{1, 1, 1}, first{0, 0, 0};
            for (int d = 0; d < n; ++d) {
                const Tab1D& t = ct.tab[static_cast<size_t>(d)];
                const int row = (el[static_cast<size_t>(d)] * q + kq[static_cast<size_t>(d)]) * t.count;
                v[static_cast<size_t>(d)] = &t.val[static_cast<size_t>(row)];
                dv[static_cast<size_t>(d)] = &t.der[static_cast<size_t>(row)];
                cnt[static_cast<size_t>(d)] = t.count;
                first[static_cast<size_t>(d)] = t.first[static_cast<size_t>(el[static_cast<size_t>(d)])];
            }
            for (int k3 = 0; k3 < (n > 2 ? cnt[2] : 1); ++k3)
                for (int k2 = 0; k2 < (n > 1 ? cnt[1] : 1); ++k2)
                    for (int k1 = 0; k1 < cnt[0]; ++k1) {
                        double b = v[0][k1];
                        Vec3 g(dv[0][k1], 0, 0);
                        if (n > 1) {
                            g[0] *= v[1][k2];
                            g[1] = v[0][k1] * dv[1][k2];
                            b *= v[1][k2];
                        }
                        if (n > 2) {
                            g[0] *= v[2][k3];
                            g[1] *= v[2][k3];
                            g[2] = v[0][k1] * v[1][k2] * dv[2][k3];
                            b *= v[2][k3];
                        }
                        const std::array<int, 3> idx{first[0] + k1, n > 1 ? first[1] + k2 : 0,
                                                     n > 2 ? first[2] + k3 : 0};
                        const int ti = ct.ts->linear_index(idx);
                        out.loc.push_back(comp_off + ti);
                        out.comp.push_back(static_cast<int>(ci));
                        switch (pb) {
                            case Pullback::Piola:
                                out.V.push_back(jet.J.col(static_cast<int>(ci)) * (b / jet.det));
                                if (with_grad_div) out.div.push_back(g[static_cast<int>(ci)] / jet.det);
                                break;
                            case Pullback::Value: {
                                Vec3 vv = Vec3::Zero();
                                vv[static_cast<int>(ci)] = b;
                                out.V.push_back(vv);
                                out.sval.push_back(b);
                                if (with_grad_div) out.div.push_back((jinv_t * g)[static_cast<int>(ci)]);
                                break;
                            }
                            case Pullback::Density:
                                out.sval.push_back(b / jet.det);
                                break;
                            case Pullback::Covariant:
                                out.V.push_back(jinv_t.col(static_cast<int>(ci)) * b);
                                break;
                        }
                    }
            comp_off += ct.ts->dim();
        }
    }
};

using Trip = Eigen::Triplet<double>;

struct ChunkResult {
    std::vector<Trip> A, B1, B2;
    VecX gU;
    double diag_sum = 0.0;
    long diag_count = 0;
};

struct AssemblyPlan {
    const ElasticitySpaces* sp;
    const MaterialParams* mat;
    const ProblemData* prob;
    int q = 0;
    QuadratureRule unit;
    std::vector<CompTab> sig_comps, u_comps, p_comps;
    std::vector<char> fixed;  // mask over global sigma dofs
    VecX fixed_value;         // global values (0 where free)
    int m = 0, nU = 0, nP = 0, rows = 0, pcomps = 0;
};

ChunkResult assemble_chunk(const AssemblyPlan& plan, long el_begin, long el_end) {
    const ElasticitySpaces& sp = *plan.sp;
    const int n = sp.n;
    const int n_el = sp.n_el;
    const int q = plan.q;
    const long els_per_patch = 1;  // recomputed below
    (void)els_per_patch;
    const long epp = static_cast<long>(std::pow(n_el, n) + 0.5);
    const int qp_count = static_cast<int>(std::pow(q, n) + 0.5);

    const int rows = plan.rows;
    const int m = plan.m;
    const int nS = rows * m;
    const int nU = plan.nU * n;
    const int nP = plan.nP * plan.pcomps;

    ChunkResult out;
    out.gU = VecX::Zero(sp.disp.dim);
    MatX Aloc(nS, nS), B1loc(nU, nS), B2loc(nP, nS);
    VecX gUloc(nU);
    MatX Vmat(3, m);
    VecX divv(m), trv(nS), uval(plan.nU), pval(plan.nP);
    FieldQP sig_qp, u_qp, p_qp;

    ElementContext ctx;
    ctx.n = n;
    ctx.q = q;
    ctx.n_el = n_el;

    const double inv2mu = 1.0 / (2.0 * plan.mat->mu);
    const double cfac = plan.mat->trace_coefficient();

    for (long le = el_begin; le < el_end; ++le) {
        const int patch = static_cast<int>(le / epp);
        long rem = le % epp;
        ctx.el = {static_cast<int>(rem % n_el), static_cast<int>((rem / n_el) % n_el),
                  static_cast<int>(rem / (static_cast<long>(n_el) * n_el))};
        const auto& pmap = sp.geometry.patch(patch);
        const auto& smap = sp.sigma.dof_map[static_cast<size_t>(patch)];
        const auto& ssgn = sp.sigma.dof_sign[static_cast<size_t>(patch)];
        const auto& umap = sp.disp.dof_map[static_cast<size_t>(patch)];
        const auto& pmap2 = sp.press.dof_map[static_cast<size_t>(patch)];
        const auto& psgn = sp.press.dof_sign[static_cast<size_t>(patch)];

        Aloc.setZero();
        B1loc.setZero();
        B2loc.setZero();
        gUloc.setZero();

        for (int kq = 0; kq < qp_count; ++kq) {
            Vec3 zeta = Vec3::Zero();
            std::array<int, 3> kk{kq % q, (kq / q) % q, kq / (q * q)};
            double wq = 1.0;
            for (int d = 0; d < n; ++d) {
                zeta[d] = (ctx.el[static_cast<size_t>(d)] + plan.unit.points[static_cast<size_t>(kk[static_cast<size_t>(d)])]) / n_el;
                wq *= plan.unit.weights[static_cast<size_t>(kk[static_cast<size_t>(d)])] / n_el;
            }
            const GeoJet jet = pmap.jet(zeta);
            if (jet.det <= 0.0) throw DegenerateGeometryError("assemble: det J <= 0 at quadrature point");
            const double wdet = wq * jet.det;

            ctx.comps = const_cast<std::vector<CompTab>*>(&plan.sig_comps);
            ctx.basis_at(kq, jet, sp.sigma.space.pullback, sig_qp, true);
            ctx.comps = const_cast<std::vector<CompTab>*>(&plan.u_comps);
            ctx.basis_at(kq, jet, sp.disp.space.pullback, u_qp, false);
            ctx.comps = const_cast<std::vector<CompTab>*>(&plan.p_comps);
            ctx.basis_at(kq, jet, sp.press.space.pullback, p_qp, false);

            for (int i = 0; i < m; ++i) {
                Vmat.col(i) = sig_qp.V[static_cast<size_t>(i)];
                divv[i] = sig_qp.div[static_cast<size_t>(i)];
            }
            for (int i = 0; i < plan.nU; ++i) uval[i] = u_qp.sval[static_cast<size_t>(i)];
            for (int i = 0; i < plan.nP; ++i) pval[i] = p_qp.sval[static_cast<size_t>(i)];

            // A: block-diagonal Gram plus the rank-one trace correction
            const MatX G = Vmat.transpose() * Vmat;
            for (int r = 0; r < rows; ++r) {
                Aloc.block(r * m, r * m, m, m) += (wdet * inv2mu) * G;
                trv.segment(r * m, m) = Vmat.row(r).transpose();
            }
            Aloc -= (wdet * inv2mu * cfac) * (trv * trv.transpose());

            // B1: <div tau, v>, rows grouped by displacement component
            for (int r = 0; r < rows; ++r)
                B1loc.block(r * plan.nU, r * m, plan.nU, m) += wdet * (uval * divv.transpose());

            // B2: <Skew tau, q>
            if (n == 2) {
                // Skew(e_r (x) v) = -v[1] for r=0, v[0] for r=1
                B2loc.block(0, 0, plan.nP, m) -= wdet * (pval * Vmat.row(1));
                B2loc.block(0, m, plan.nP, m) += wdet * (pval * Vmat.row(0));
            } else {
                for (int r = 0; r < 3; ++r)
                    for (int cp = 0; cp < 3; ++cp) {
                        // (v x e_r)[cp]
                        VecX s;
                        if (cp == (r + 2) % 3)
                            s = Vmat.row((r + 1) % 3);
                        else if (cp == (r + 1) % 3)
                            s = -Vmat.row((r + 2) % 3);
                        else
                            continue;
                        B2loc.block(cp * plan.nP, r * m, plan.nP, m) += wdet * (pval * s.transpose());
                    }
            }

            // load
            const Vec3 f = plan.prob->body_force ? plan.prob->body_force(patch, zeta, jet.x) : Vec3::Zero();
            for (int c = 0; c < n; ++c)
                gUloc.segment(c * plan.nU, plan.nU) += (wq * jet.det) * f[c] * uval;
        }

        // scatter (strong traction data is eliminated in a post-pass)
        auto sglobal = [&](int r, int i) {
            const int l = r * sp.sigma.space.dofs_per_row() + sig_qp.loc[static_cast<size_t>(i)];
            return std::pair<int, double>(smap[static_cast<size_t>(l)], ssgn[static_cast<size_t>(l)]);
        };
        for (int rj = 0; rj < rows; ++rj)
            for (int j = 0; j < m; ++j) {
                auto [gj, sj] = sglobal(rj, j);
                for (int ri = 0; ri < rows; ++ri)
                    for (int i = 0; i < m; ++i) {
                        const int li = ri * m + i, lj = rj * m + j;
                        if (lj < li) continue;
                        const double a = Aloc(li, lj);
                        if (a == 0.0) continue;
                        auto [gi, si] = sglobal(ri, i);
                        const double v = a * si * sj;
                        if (li == lj) {
                            out.A.emplace_back(gi, gi, v);
                            out.diag_sum += std::abs(v);
                            out.diag_count += 1;
                        } else {
                            out.A.emplace_back(std::min(gi, gj), std::max(gi, gj), v);
                        }
                    }
            }

        for (int rj = 0; rj < rows; ++rj)
            for (int j = 0; j < m; ++j) {
                auto [gj, sj] = sglobal(rj, j);
                for (int cu = 0; cu < n; ++cu)
                    for (int iu = 0; iu < plan.nU; ++iu) {
                        const double b = B1loc(cu * plan.nU + iu, rj * m + j);
                        if (b == 0.0) continue;
                        const int ul = cu * sp.disp.space.comps[0].dim() + u_qp.loc[static_cast<size_t>(iu)];
                        out.B1.emplace_back(umap[static_cast<size_t>(ul)], gj, b * sj);
                    }
                for (int cp = 0; cp < plan.pcomps; ++cp)
                    for (int ip = 0; ip < plan.nP; ++ip) {
                        const double b = B2loc(cp * plan.nP + ip, rj * m + j);
                        if (b == 0.0) continue;
                        const int pl = cp * sp.press.space.comps[0].dim() + p_qp.loc[static_cast<size_t>(ip)];
                        out.B2.emplace_back(pmap2[static_cast<size_t>(pl)], gj,
                                            b * sj * psgn[static_cast<size_t>(pl)]);
                    }
            }
        for (int cu = 0; cu < n; ++cu)
            for (int iu = 0; iu < plan.nU; ++iu) {
                const int ul = cu * sp.disp.space.comps[0].dim() + u_qp.loc[static_cast<size_t>(iu)];
                out.gU[umap[static_cast<size_t>(ul)]] += gUloc[cu * plan.nU + iu];
            }
    }
    return out;
}

}  // namespace

VecX MixedSystem::rhs() const {
    VecX b(dim());
    b << g_sigma, g_disp, g_press;
    return b;
}

void MixedSystem::apply(const VecX& x, VecX& y) const {
    y.resize(dim());
    const auto xs = x.head(n_sigma);
    const auto xu = x.segment(n_sigma, n_disp);
    const auto xp = x.tail(n_press);
    y.head(n_sigma) = A.selfadjointView<Eigen::Upper>() * xs + B1.transpose() * xu + B2.transpose() * xp;
    y.segment(n_sigma, n_disp) = B1 * xs;
    y.tail(n_press) = B2 * xs;
}

SpMat MixedSystem::full_matrix() const {
    std::vector<Trip> trips;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
            if (it.row() != it.col())
                trips.emplace_back(static_cast<int>(it.col()), static_cast<int>(it.row()), it.value());
        }
    auto add_block = [&](const SpMat& B, int row_off) {
        for (int k = 0; k < B.outerSize(); ++k)
            for (SpMat::InnerIterator it(B, k); it; ++it) {
                trips.emplace_back(static_cast<int>(it.row()) + row_off, static_cast<int>(it.col()),
                                   it.value());
                trips.emplace_back(static_cast<int>(it.col()), static_cast<int>(it.row()) + row_off,
                                   it.value());
            }
    };
    add_block(B1, n_sigma);
    add_block(B2, n_sigma + n_disp);
    SpMat full(dim(), dim());
    full.setFromTriplets(trips.begin(), trips.end());
    return full;
}

void MixedSystem::write_matrix_market(const std::string& path) const {
    const SpMat full = full_matrix();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << full.rows() << " " << full.cols() << " " << full.nonZeros() << "\n";
    char buf[96];
    for (int k = 0; k < full.outerSize(); ++k)
        for (SpMat::InnerIterator it(full, k); it; ++it) {
            std::snprintf(buf, sizeof(buf), "%ld %ld %.16e\n", static_cast<long>(it.row() + 1),
                          static_cast<long>(it.col() + 1), it.value());
            out << buf;
        }
}

namespace {

/// Iterate quadrature points on one parametric face; cb(zeta, face_weight,
/// jet, tangential coordinates and 1D element indices).
template <typename F>
void for_each_face_qp(const GeometryMap& patch, int n, int face, int n_el, const QuadratureRule& unit,
                      F&& cb) {
    const int axis = face_axis(face);
    const double pin = face_side(face) == 0 ? 0.0 : 1.0;
    std::vector<int> tang;
    for (int d = 0; d < n; ++d)
        if (d != axis) tang.push_back(d);
    const int q = static_cast<int>(unit.points.size());
    const int t_count = static_cast<int>(tang.size());
    const long n_face_el = t_count == 1 ? n_el : static_cast<long>(n_el) * n_el;
    for (long fe = 0; fe < n_face_el; ++fe) {
        const std::array<int, 2> el{static_cast<int>(fe % n_el), static_cast<int>(fe / n_el)};
        const long qp_total = t_count == 1 ? q : q * q;
        for (long kq = 0; kq < qp_total; ++kq) {
            const std::array<int, 2> kk{static_cast<int>(kq % q), static_cast<int>(kq / q)};
            Vec3 zeta = Vec3::Zero();
            zeta[axis] = pin;
            double w = 1.0;
            std::array<double, 2> tcoord{0.0, 0.0};
            std::array<int, 2> tel{0, 0};
            for (int t = 0; t < t_count; ++t) {
                const double z =
                    (el[static_cast<size_t>(t)] + unit.points[static_cast<size_t>(kk[static_cast<size_t>(t)])]) / n_el;
                zeta[tang[static_cast<size_t>(t)]] = z;
                w *= unit.weights[static_cast<size_t>(kk[static_cast<size_t>(t)])] / n_el;
                tcoord[static_cast<size_t>(t)] = z;
                tel[static_cast<size_t>(t)] = el[static_cast<size_t>(t)];
            }
            cb(zeta, w, patch.jet(zeta), tcoord, tel);
        }
    }
}

/// Face tensor-basis evaluation from the layer's 1D spaces.
void face_basis(const FaceLayer& fl, const std::array<double, 2>& t, std::vector<std::pair<int, double>>& out) {
    out.clear();
    const auto s0 = fl.face_axes[0].values(t[0]);
    if (fl.face_axes.size() == 1) {
        for (int i = 0; i < s0.count; ++i) out.emplace_back(s0.first + i, s0.value[static_cast<size_t>(i)]);
        return;
    }
    const auto s1 = fl.face_axes[1].values(t[1]);
    const int n0 = fl.face_axes[0].dim();
    for (int j = 0; j < s1.count; ++j)
        for (int i = 0; i < s0.count; ++i)
            out.emplace_back(s0.first + i + n0 * (s1.first + j),
                             s0.value[static_cast<size_t>(i)] * s1.value[static_cast<size_t>(j)]);
}

}  // namespace

MixedSystem assemble(const ElasticitySpaces& sp, const MaterialParams& mat, const ProblemData& prob,
                     int threads) {
    if (mat.n != sp.n) throw ConfigError("assemble: material dimension mismatch");
    const int n = sp.n;
    const int q = sp.p + 2;

    AssemblyPlan plan;
    plan.sp = &sp;
    plan.mat = &mat;
    plan.prob = &prob;
    plan.q = q;
    plan.unit = QuadratureRule::gauss(q);
    for (const auto& ts : sp.sigma.space.comps) plan.sig_comps.push_back(make_comp_tab(ts, n, sp.n_el, plan.unit));
    plan.u_comps.push_back(make_comp_tab(sp.disp.space.comps[0], n, sp.n_el, plan.unit));
    plan.p_comps.push_back(make_comp_tab(sp.press.space.comps[0], n, sp.n_el, plan.unit));
    plan.rows = sp.sigma.space.rows();
    plan.m = 0;
    for (const auto& ct : plan.sig_comps) plan.m += ct.nloc;
    plan.nU = plan.u_comps[0].nloc;
    plan.nP = plan.p_comps[0].nloc;
    plan.pcomps = sp.press.space.comp_count();

    // u/p basis_at iterate over comps stored in the space; mirror component
    // multiplicity by duplicating the shared tabs
    for (int c = 1; c < sp.disp.space.comp_count(); ++c) plan.u_comps.push_back(plan.u_comps[0]);
    for (int c = 1; c < sp.press.space.comp_count(); ++c) plan.p_comps.push_back(plan.p_comps[0]);
    // basis_at returns per-comp data; for u/p we only need one comp's scalars
    plan.u_comps.resize(1);
    plan.p_comps.resize(1);

    MixedSystem sys;
    sys.n_sigma = sp.sigma.dim;
    sys.n_disp = sp.disp.dim;
    sys.n_press = sp.press.dim;
    sys.g_sigma = VecX::Zero(sys.n_sigma);
    sys.g_disp = VecX::Zero(sys.n_disp);
    sys.g_press = VecX::Zero(sys.n_press);

    // strong traction values first: the element scatter needs the mask
    plan.fixed.assign(static_cast<size_t>(sys.n_sigma), 0);
    plan.fixed_value = VecX::Zero(sys.n_sigma);
    const QuadratureRule face_rule = QuadratureRule::gauss(sp.p + 3);
    for (const auto& pf : prob.bc.traction) {
        for (const auto& fl : sigma_face_layers(sp, pf)) {
            const int fdim = fl.face_axes.size() == 1
                                 ? fl.face_axes[0].dim()
                                 : fl.face_axes[0].dim() * fl.face_axes[1].dim();
            MatX M = MatX::Zero(fdim, fdim);
            VecX b = VecX::Zero(fdim);
            std::vector<std::pair<int, double>> act;
            const int axis = face_axis(pf.face);
            const double nu_sign = face_side(pf.face) == 0 ? -1.0 : 1.0;
            for_each_face_qp(sp.geometry.patch(pf.patch), n, pf.face, sp.n_el, face_rule,
                             [&](const Vec3& zeta, double w, const GeoJet& jet,
                                 const std::array<double, 2>& t, const std::array<int, 2>&) {
                                 Vec3 conormal = nu_sign * jet.adj.transpose().col(axis);
                                 if (n == 2) conormal[2] = 0.0;
                                 const double surf = conormal.norm();
                                 const Vec3 unit_normal = conormal / surf;
                                 const Vec3 tn = prob.traction
                                                     ? prob.traction(pf.patch, zeta, jet.x, unit_normal)
                                                     : Vec3::Zero();
                                 const double target = tn[fl.row] * surf;  // tau_hat . nu_hat on the face
                                 face_basis(fl, t, act);
                                 for (auto [i, vi] : act) {
                                     b[i] += w * target * vi;
                                     for (auto [j, vj] : act) M(i, j) += w * vi * vj;
                                 }
                             });
            const VecX chi = M.ldlt().solve(b) * fl.trace_sign;
            for (int i = 0; i < fdim; ++i) {
                const int loc = fl.local_dofs[static_cast<size_t>(i)];
                const int g = sp.sigma.dof_map[static_cast<size_t>(pf.patch)][static_cast<size_t>(loc)];
                const double s = sp.sigma.dof_sign[static_cast<size_t>(pf.patch)][static_cast<size_t>(loc)];
                plan.fixed[static_cast<size_t>(g)] = 1;
                plan.fixed_value[g] = chi[i] * s;
            }
        }
    }

    // element integrals, chunked for deterministic parallel reduction
    const long epp = static_cast<long>(std::pow(sp.n_el, n) + 0.5);
    const long total = epp * sp.geometry.num_patches();
    const long chunk = 8;
    const long n_chunks = (total + chunk - 1) / chunk;
    std::vector<ChunkResult> results(static_cast<size_t>(n_chunks));
    const int nthreads = std::max(1, threads);
    std::atomic<long> next_chunk{0};
    auto worker = [&]() {
        while (true) {
            const long c = next_chunk.fetch_add(1);
            if (c >= n_chunks) break;
            results[static_cast<size_t>(c)] =
                assemble_chunk(plan, c * chunk, std::min(total, (c + 1) * chunk));
        }
    };
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<Trip> tA, tB1, tB2;
    double diag_sum = 0.0;
    long diag_count = 0;
    for (const auto& r : results) {
        tA.insert(tA.end(), r.A.begin(), r.A.end());
        tB1.insert(tB1.end(), r.B1.begin(), r.B1.end());
        tB2.insert(tB2.end(), r.B2.begin(), r.B2.end());
        sys.g_disp += r.gU;
        diag_sum += r.diag_sum;
        diag_count += r.diag_count;
    }
    sys.fixed_diag = diag_count > 0 ? diag_sum / static_cast<double>(diag_count) : 1.0;
    for (int g = 0; g < sys.n_sigma; ++g)
        if (plan.fixed[static_cast<size_t>(g)]) sys.fixed_dofs.push_back(g);
    sys.fixed_values.resize(static_cast<long>(sys.fixed_dofs.size()));
    for (size_t i = 0; i < sys.fixed_dofs.size(); ++i)
        sys.fixed_values[static_cast<long>(i)] = plan.fixed_value[sys.fixed_dofs[i]];

    sys.A = SpMat(sys.n_sigma, sys.n_sigma);
    sys.A.setFromTriplets(tA.begin(), tA.end());
    sys.B1 = SpMat(sys.n_disp, sys.n_sigma);
    sys.B1.setFromTriplets(tB1.begin(), tB1.end());
    sys.B2 = SpMat(sys.n_press, sys.n_sigma);
    sys.B2.setFromTriplets(tB2.begin(), tB2.end());

    // Dirichlet boundary term <u_D, tau.nu>
    sys.g_sigma += assemble_boundary_term(sp, prob);

    if (!sys.fixed_dofs.empty()) {
        // move fixed columns to the right-hand side
        VecX xfix = VecX::Zero(sys.n_sigma);
        for (size_t i = 0; i < sys.fixed_dofs.size(); ++i)
            xfix[sys.fixed_dofs[i]] = sys.fixed_values[static_cast<long>(i)];
        sys.g_sigma -= sys.A.selfadjointView<Eigen::Upper>() * xfix;
        sys.g_disp -= sys.B1 * xfix;
        sys.g_press -= sys.B2 * xfix;

        // drop fixed rows/cols and install the scaled identity diagonal
        std::vector<Trip> filtered;
        filtered.reserve(static_cast<size_t>(sys.A.nonZeros()));
        for (int k = 0; k < sys.A.outerSize(); ++k)
            for (SpMat::InnerIterator it(sys.A, k); it; ++it)
                if (!plan.fixed[static_cast<size_t>(it.row())] && !plan.fixed[static_cast<size_t>(it.col())])
                    filtered.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                          it.value());
        for (int g : sys.fixed_dofs) filtered.emplace_back(g, g, sys.fixed_diag);
        sys.A = SpMat(sys.n_sigma, sys.n_sigma);
        sys.A.setFromTriplets(filtered.begin(), filtered.end());

        for (int g : sys.fixed_dofs) {
            for (SpMat::InnerIterator it(sys.B1, g); it; ++it) it.valueRef() = 0.0;
            for (SpMat::InnerIterator it(sys.B2, g); it; ++it) it.valueRef() = 0.0;
        }
        sys.B1.prune(0.0);
        sys.B2.prune(0.0);
        for (size_t i = 0; i < sys.fixed_dofs.size(); ++i)
            sys.g_sigma[sys.fixed_dofs[i]] = sys.fixed_diag * sys.fixed_values[static_cast<long>(i)];
    }
    return sys;
}

VecX assemble_boundary_term(const ElasticitySpaces& sp, const ProblemData& prob) {
    const int n = sp.n;
    VecX g = VecX::Zero(sp.sigma.dim);
    const QuadratureRule face_rule = QuadratureRule::gauss(sp.p + 3);
    std::vector<std::pair<int, double>> act;
    for (const auto& pf : prob.bc.dirichlet) {
        if (pf.face < 0 || pf.face >= 2 * n) throw ConfigError("boundary part not face-aligned");
        for (const auto& fl : sigma_face_layers(sp, pf)) {
            for_each_face_qp(sp.geometry.patch(pf.patch), n, pf.face, sp.n_el, face_rule,
                             [&](const Vec3& zeta, double w, const GeoJet& jet,
                                 const std::array<double, 2>& t, const std::array<int, 2>&) {
                                 const Vec3 ud = prob.dirichlet_u ? prob.dirichlet_u(pf.patch, zeta, jet.x)
                                                                  : Vec3::Zero();
                                 face_basis(fl, t, act);
                                 for (auto [i, vi] : act) {
                                     const int loc = fl.local_dofs[static_cast<size_t>(i)];
                                     const int gd = sp.sigma.dof_map[static_cast<size_t>(pf.patch)]
                                                                    [static_cast<size_t>(loc)];
                                     const double s = sp.sigma.dof_sign[static_cast<size_t>(pf.patch)]
                                                                       [static_cast<size_t>(loc)];
                                     g[gd] += w * ud[fl.row] * fl.trace_sign * vi * s;
                                 }
                             });
        }
    }
    return g;
}

namespace {

/// Shared element loop for Gram matrices and moment vectors.
template <typename PerQP>
void quadrature_loop(const ElasticitySpaces& sp, int q_order, PerQP&& cb) {
    const int n = sp.n;
    const QuadratureRule unit = QuadratureRule::gauss(q_order);
    const int q = q_order;
    const long epp = static_cast<long>(std::pow(sp.n_el, n) + 0.5);
    const int qp_count = static_cast<int>(std::pow(q, n) + 0.5);
    for (int patch = 0; patch < sp.geometry.num_patches(); ++patch)
        for (long e = 0; e < epp; ++e) {
            const std::array<int, 3> el{static_cast<int>(e % sp.n_el),
                                        static_cast<int>((e / sp.n_el) % sp.n_el),
                                        static_cast<int>(e / (static_cast<long>(sp.n_el) * sp.n_el))};
            for (int kq = 0; kq < qp_count; ++kq) {
                Vec3 zeta = Vec3::Zero();
                const std::array<int, 3> kk{kq % q, (kq / q) % q, kq / (q * q)};
                double w = 1.0;
                for (int d = 0; d < n; ++d) {
                    zeta[d] = (el[static_cast<size_t>(d)] +
                               unit.points[static_cast<size_t>(kk[static_cast<size_t>(d)])]) /
                              sp.n_el;
                    w *= unit.weights[static_cast<size_t>(kk[static_cast<size_t>(d)])] / sp.n_el;
                }
                cb(patch, zeta, w);
            }
        }
}

SpMat gram_generic(const ElasticitySpaces& sp, const FieldSpace& fs, bool add_div) {
    std::vector<Trip> trips;
    quadrature_loop(sp, sp.p + 2, [&](int patch, const Vec3& zeta, double w) {
        const auto& patch_map = sp.geometry.patch(patch);
        const GeoJet jet = patch_map.jet(zeta);
        const double wdet = w * jet.det;
        const auto basis = eval_physical_basis(fs.space, patch_map, zeta);
        for (const auto& bi : basis)
            for (const auto& bj : basis) {
                if (bi.row != bj.row && fs.space.rank == DiscreteSpace::Rank::MatrixRows) continue;
                double v = bi.value.dot(bj.value);
                if (add_div) v += bi.div * bj.div;
                if (v == 0.0) continue;
                const int gi = fs.dof_map[static_cast<size_t>(patch)][static_cast<size_t>(bi.local)];
                const int gj = fs.dof_map[static_cast<size_t>(patch)][static_cast<size_t>(bj.local)];
                const double s = fs.dof_sign[static_cast<size_t>(patch)][static_cast<size_t>(bi.local)] *
                                 fs.dof_sign[static_cast<size_t>(patch)][static_cast<size_t>(bj.local)];
                trips.emplace_back(gi, gj, wdet * v * s);
            }
    });
    SpMat m(fs.dim, fs.dim);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

}  // namespace

SpMat gram_sigma_hdiv(const ElasticitySpaces& sp) { return gram_generic(sp, sp.sigma, true); }
SpMat gram_sigma_l2(const ElasticitySpaces& sp) { return gram_generic(sp, sp.sigma, false); }
SpMat gram_disp_l2(const ElasticitySpaces& sp) { return gram_generic(sp, sp.disp, false); }
SpMat gram_press_l2(const ElasticitySpaces& sp) { return gram_generic(sp, sp.press, false); }

VecX sigma_trace_integrals(const ElasticitySpaces& sp) {
    VecX t = VecX::Zero(sp.sigma.dim);
    quadrature_loop(sp, sp.p + 2, [&](int patch, const Vec3& zeta, double w) {
        const auto& patch_map = sp.geometry.patch(patch);
        const GeoJet jet = patch_map.jet(zeta);
        for (const auto& b : eval_physical_basis(sp.sigma.space, patch_map, zeta)) {
            const int g = sp.sigma.dof_map[static_cast<size_t>(patch)][static_cast<size_t>(b.local)];
            const double s = sp.sigma.dof_sign[static_cast<size_t>(patch)][static_cast<size_t>(b.local)];
            t[g] += w * jet.det * b.value[b.row] * s;
        }
    });
    return t;
}

VecX sigma_inner_with(const ElasticitySpaces& sp, const std::function<Mat3(const Vec3& x)>& field) {
    VecX rhs = VecX::Zero(sp.sigma.dim);
    quadrature_loop(sp, sp.p + 2, [&](int patch, const Vec3& zeta, double w) {
        const auto& patch_map = sp.geometry.patch(patch);
        const GeoJet jet = patch_map.jet(zeta);
        const Mat3 f = field(jet.x);
        for (const auto& b : eval_physical_basis(sp.sigma.space, patch_map, zeta)) {
            const int g = sp.sigma.dof_map[static_cast<size_t>(patch)][static_cast<size_t>(b.local)];
            const double s = sp.sigma.dof_sign[static_cast<size_t>(patch)][static_cast<size_t>(b.local)];
            rhs[g] += w * jet.det * f.row(b.row).head(sp.n).dot(b.value.head(sp.n).transpose()) * s;
        }
    });
    return rhs;
}

double domain_measure(const ElasticitySpaces& sp) {
    double vol = 0.0;
    quadrature_loop(sp, sp.p + 2, [&](int patch, const Vec3& zeta, double w) {
        vol += w * sp.geometry.patch(patch).jet(zeta).det;
    });
    return vol;
}

}  // namespace igamix
