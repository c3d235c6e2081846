#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "igamix/assembly.hpp"
#include "igamix/solver.hpp"

using namespace igamix;

namespace {

BoundarySpec all_dirichlet(const Geometry& geo) {
    BoundarySpec bc;
    bc.dirichlet = geo.exterior_faces();
    return bc;
}

ProblemData zero_problem(const Geometry& geo) {
    ProblemData prob;
    prob.bc = all_dirichlet(geo);
    return prob;
}

}  // namespace

TEST_CASE("quadrature exactness: p+2 points integrate degree 2p+3") {
    for (int p : {1, 2, 3, 4}) {
        const auto rule = QuadratureRule::gauss(p + 2);
        for (int deg = 0; deg <= 2 * p + 3; ++deg) {
            double integral = 0.0;
            for (size_t k = 0; k < rule.points.size(); ++k)
                integral += rule.weights[k] * std::pow(rule.points[k], deg);
            const double exact = 1.0 / (deg + 1);
            CHECK(std::abs(integral - exact) <= 1e-13 * std::abs(exact));
        }
    }
}

TEST_CASE("system size and zero-data solution") {
    const auto geo = geometry_catalog("unit_square");
    const auto sp = build_spaces(geo, 2, 2, 0);
    const auto sys = assemble(sp, MaterialParams::make(2.0, 1.0, 2), zero_problem(geo));
    CHECK(sys.dim() == 121);
    CHECK(sys.full_matrix().rows() == 121);

    const auto sol = solve(sys, SolveConfig::minres());
    CHECK(sol.sigma.norm() == 0.0);
    CHECK(sol.u.norm() == 0.0);
    CHECK(sol.p.norm() == 0.0);
}

TEST_CASE("assembled saddle matrix is symmetric") {
    for (const char* name : {"unit_square", "deformed_square"}) {
        const auto geo = geometry_catalog(name);
        const auto sp = build_spaces(geo, 2, 2, 0);
        ProblemData prob = zero_problem(geo);
        prob.body_force = [](int, const Vec3&, const Vec3& x) { return Vec3(x[0], -x[1], 0); };
        const auto sys = assemble(sp, MaterialParams::make(2.0, 1.0, 2), prob);
        const SpMat full = sys.full_matrix();
        const MatX dense = MatX(full);
        const double asym = (dense - dense.transpose()).cwiseAbs().maxCoeff();
        CHECK(asym <= 1e-13 * dense.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("boundary term") {
    const auto geo = geometry_catalog("unit_square");
    const auto sp = build_spaces(geo, 2, 2, 0);

    SUBCASE("zero Dirichlet data gives the zero vector") {
        const VecX g = assemble_boundary_term(sp, zero_problem(geo));
        CHECK(g.norm() == 0.0);
    }

    SUBCASE("constant data on one face against a composite Simpson oracle") {
        ProblemData prob;
        prob.bc.dirichlet = {{0, 1}};  // right face
        prob.dirichlet_u = [](int, const Vec3&, const Vec3&) { return Vec3(1.0, 0.0, 0.0); };
        const VecX g = assemble_boundary_term(sp, prob);

        // entries with zero normal trace on the face vanish
        const std::vector<PatchFace> faces{{0, 1}};
        const auto layer = boundary_normal_dofs(sp, faces);
        for (int i = 0; i < g.size(); ++i)
            if (std::find(layer.begin(), layer.end(), i) == layer.end()) CHECK(g[i] == 0.0);

        // on the identity geometry the entries are the univariate integrals of
        // the trace splines of the first component of row 0
        const auto fls = sigma_face_layers(sp, {0, 1});
        const auto& fl = fls[0];  // row 0
        const auto& tr_space = fl.face_axes[0];
        for (size_t i = 0; i < fl.local_dofs.size(); ++i) {
            // composite Simpson with 50 intervals
            double simpson = 0.0;
            const int m = 50;
            VecX e = VecX::Zero(tr_space.dim());
            e[static_cast<int>(i)] = 1.0;
            for (int k = 0; k < m; ++k) {
                const double a = static_cast<double>(k) / m, b = static_cast<double>(k + 1) / m;
                simpson += (b - a) / 6.0 *
                           (tr_space.eval(e, a) + 4.0 * tr_space.eval(e, 0.5 * (a + b)) + tr_space.eval(e, b));
            }
            const int gdof = sp.sigma.dof_map[0][static_cast<size_t>(fl.local_dofs[i])];
            CHECK(g[gdof] == doctest::Approx(simpson).epsilon(1e-10));
        }
    }
}

TEST_CASE("divergence consistency: B1 equals the exact expansion times the mass matrix") {
    const auto geo = geometry_catalog("deformed_square");
    const auto sp = build_spaces(geo, 2, 2, 0);
    const auto sys = assemble(sp, MaterialParams::make(2.0, 1.0, 2), zero_problem(geo));
    const SpMat mass_u = gram_disp_l2(sp);

    const auto& sig = sp.sigma.space;
    const auto& uspace = sp.disp.space.comps[0];
    const MatX b1 = MatX(sys.B1);

    for (int row = 0; row < 2; ++row)
        for (int c = 0; c < 2; ++c) {
            const auto& ts = sig.comps[static_cast<size_t>(c)];
            auto [low, D] = ts.axis(c).derivative_space();
            for (int i = 0; i < ts.dim(); ++i) {
                // expansion coefficients of the parametric divergence in U
                VecX expan = VecX::Zero(uspace.dim());
                std::array<int, 3> idx{i % ts.axis(0).dim(), i / ts.axis(0).dim(), 0};
                const int id = idx[static_cast<size_t>(c)];
                for (int j = 0; j < low.dim(); ++j) {
                    if (D(j, id) == 0.0) continue;
                    std::array<int, 3> dst = idx;
                    dst[static_cast<size_t>(c)] = j;
                    expan[uspace.linear_index(dst)] += D(j, id);
                }
                // <div tau, v_k> should equal (M_U expan)_k on the matching component
                VecX full_expan = VecX::Zero(sp.disp.dim);
                full_expan.segment(row * uspace.dim(), uspace.dim()) = expan;
                const VecX via_mass = mass_u * full_expan;
                const int sdof = sig.dof(row, c, i);
                const VecX direct = b1.col(sdof);
                CHECK((direct - via_mass).cwiseAbs().maxCoeff() <= 1e-11);
            }
        }
}

TEST_CASE("naive equal-degree spaces produce a nearly singular matrix") {
    const auto geo = geometry_catalog("deformed_square");
    const auto mat = MaterialParams::make(2.0, 1.0, 2);

    const auto structured = build_spaces(geo, 4, 2, 0);
    const auto naive = build_spaces(geo, 4, 2, 0, /*naive*/ true);
    CHECK(naive.dim() == 7 * 81);

    const auto sys_s = assemble(structured, mat, zero_problem(geo));
    const auto sys_n = assemble(naive, mat, zero_problem(geo));

    const MatX ds = MatX(sys_s.full_matrix());
    const MatX dn = MatX(sys_n.full_matrix());
    CHECK((dn - dn.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * dn.cwiseAbs().maxCoeff());

    Eigen::BDCSVD<MatX> svd_s(ds), svd_n(dn);
    const double smin_s = svd_s.singularValues().tail(1)[0] / svd_s.singularValues()[0];
    const double smin_n = svd_n.singularValues().tail(1)[0] / svd_n.singularValues()[0];
    CHECK(smin_s >= 1e3 * smin_n);
}

TEST_CASE("matrix market dump") {
    const auto geo = geometry_catalog("unit_square");
    const auto sp = build_spaces(geo, 1, 2, 0);
    const auto sys = assemble(sp, MaterialParams::make(2.0, 1.0, 2), zero_problem(geo));
    const std::string path = "/tmp/igamix_mm_test.mtx";
    sys.write_matrix_market(path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("%%MatrixMarket", 0) == 0);
}
