#include <doctest.h>

#include <cmath>
#include <random>

#include "igamix/geometry.hpp"

using namespace igamix;

TEST_CASE("catalog returns the documented maps") {
    const auto ds = geometry_catalog("deformed_square");
    CHECK(ds.num_patches() == 1);
    const Vec3 x = ds.patch(0).value(Vec3(0.5, 0.5, 0.0));
    CHECK(x[0] == doctest::Approx(0.5));
    CHECK(x[1] == doctest::Approx(0.75));

    const auto us = geometry_catalog("unit_square");
    const GeoJet j = us.patch(0).jet(Vec3(0.3, 0.8, 0.0));
    CHECK((j.J - Mat3::Identity()).norm() == doctest::Approx(0.0));

    const auto cook = geometry_catalog("cook");
    const Vec3 p = cook.patch(0).value(Vec3(1.0, 1.0, 0.0));
    CHECK(p[0] == doctest::Approx(48.0));
    CHECK(p[1] == doctest::Approx(60.0));

    CHECK_THROWS_AS(geometry_catalog("klein_bottle"), ConfigError);
}

TEST_CASE("deformed square has unit lower-triangular Jacobian") {
    const auto g = geometry_catalog("deformed_square");
    for (double a : {0.0, 0.3, 0.7, 1.0})
        for (double b : {0.1, 0.5, 0.9}) {
            const auto pack = jacobian_pack(g.patch(0), Vec3(a, b, 0));
            CHECK(pack.det == doctest::Approx(1.0));
            CHECK(pack.J(0, 1) == doctest::Approx(0.0));
            CHECK(pack.J(0, 0) == doctest::Approx(1.0));
            CHECK(pack.J(1, 1) == doctest::Approx(1.0));
        }
}

TEST_CASE("adjugate identity adj(J)*J = det(J) I") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        Mat3 m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = uni(rng);
        const Mat3 lhs = adj_n(m, 3) * m;
        const double det = m.determinant();
        CHECK((lhs - det * Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, std::abs(det)));
    }

    const auto id = geometry_catalog("unit_square");
    const auto pack = jacobian_pack(id.patch(0), Vec3(0.2, 0.4, 0));
    CHECK((pack.adj.topLeftCorner(2, 2) - Eigen::Matrix2d::Identity()).norm() == doctest::Approx(0.0));

    // degenerate map raises
    Mat3 bad = Mat3::Identity();
    bad(0, 0) = -1.0;
    AffineMap flipped(2, Vec3::Zero(), bad);
    CHECK_THROWS_AS(jacobian_pack(flipped, Vec3(0.5, 0.5, 0)), DegenerateGeometryError);
}

TEST_CASE("ring3d is an exact quarter annulus swept in z") {
    const auto g = geometry_catalog("ring3d");
    REQUIRE(g.n == 3);
    const auto& m = g.patch(0);

    // radii exact on a sample grid
    for (double r : {0.0, 0.25, 0.5, 1.0})
        for (double a : {0.0, 0.2, 0.61, 1.0})
            for (double z : {0.0, 0.5, 1.0}) {
                const Vec3 x = m.value(Vec3(r, a, z));
                const double radius = std::hypot(x[0], x[1]);
                CHECK(radius == doctest::Approx(1.0 + r).epsilon(1e-12));
                CHECK(x[2] == doctest::Approx(z));
            }
    // arc endpoints
    CHECK(m.value(Vec3(0, 0, 0))[0] == doctest::Approx(1.0));
    CHECK(m.value(Vec3(0, 1, 0))[1] == doctest::Approx(1.0));

    // Jacobian of the rational evaluation matches central differences
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uni(0.1, 0.9);
    for (int t = 0; t < 10; ++t) {
        const Vec3 z(uni(rng), uni(rng), uni(rng));
        const GeoJet jet = m.jet(z);
        const double h = 1e-6;
        for (int d = 0; d < 3; ++d) {
            Vec3 zp = z, zm = z;
            zp[d] += h;
            zm[d] -= h;
            const Vec3 fd = (m.value(zp) - m.value(zm)) / (2 * h);
            CHECK((jet.J.col(d).head(3) - fd).norm() <= 1e-7);
        }
        CHECK(jet.det > 0.0);
    }
}

TEST_CASE("second parametric derivatives match finite differences") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> uni(0.15, 0.85);
    for (const char* name : {"deformed_square", "cook", "ring3d"}) {
        const auto g = geometry_catalog(name);
        const auto& m = g.patch(0);
        const int n = g.n;
        for (int t = 0; t < 5; ++t) {
            Vec3 z = Vec3::Zero();
            for (int d = 0; d < n; ++d) z[d] = uni(rng);
            const GeoJet jet = m.jet(z);
            const double h = 1e-5;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    Vec3 zp = z, zm = z;
                    zp[b] += h;
                    zm[b] -= h;
                    const Mat3 dJ = (m.jet(zp).J - m.jet(zm).J) / (2 * h);
                    for (int i = 0; i < n; ++i)
                        CHECK(jet.d2[static_cast<size_t>(i)](a, b) ==
                              doctest::Approx(dJ(i, a)).epsilon(1e-4).scale(1.0));
                }
        }
    }
}

TEST_CASE("det J positive on a sample grid for every catalog geometry") {
    for (const char* name : {"unit_square", "deformed_square", "cook", "ring3d",
                             "deformed_square_9patch", "cube_2patch"}) {
        const auto g = geometry_catalog(name);
        const int samples = g.n == 3 ? 8 : 20;
        for (int k = 0; k < g.num_patches(); ++k)
            for (int i = 0; i <= samples; ++i)
                for (int j = 0; j <= samples; ++j)
                    for (int l = 0; l <= (g.n == 3 ? samples : 0); ++l) {
                        const Vec3 z(static_cast<double>(i) / samples, static_cast<double>(j) / samples,
                                     g.n == 3 ? static_cast<double>(l) / samples : 0.0);
                        CHECK(g.patch(k).jet(z).det > 0.0);
                    }
    }
}

TEST_CASE("9-patch decomposition reproduces the global map and conforms at interfaces") {
    const auto g = geometry_catalog("deformed_square_9patch");
    REQUIRE(g.num_patches() == 9);
    REQUIRE(g.interfaces.size() == 12);
    DeformedSquareMap global;

    // the global map is bi-quadratic, so the per-cell Greville fit
    // reproduces it pointwise
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            const auto& patch = g.patch(i + 3 * j);
            for (int t = 0; t < 10; ++t) {
                const Vec3 local(uni(rng), uni(rng), 0);
                const Vec3 zglob((i + local[0]) / 3.0, (j + local[1]) / 3.0, 0);
                CHECK((patch.value(local) - global.value(zglob)).norm() <= 1e-13);
            }
        }

    // interface traces agree pointwise
    for (const auto& itf : g.interfaces) {
        for (int t = 0; t <= 10; ++t) {
            const double s = t / 10.0;
            Vec3 za = Vec3::Zero(), zb = Vec3::Zero();
            za[face_axis(itf.face_a)] = face_side(itf.face_a);
            zb[face_axis(itf.face_b)] = face_side(itf.face_b);
            za[1 - face_axis(itf.face_a)] = s;
            zb[1 - face_axis(itf.face_b)] = s;
            CHECK((g.patch(itf.patch_a).value(za) - g.patch(itf.patch_b).value(zb)).norm() <= 1e-12);
        }
    }
}

TEST_CASE("spline patch fit reproduces a bilinear map exactly") {
    BilinearMap m(Vec3(0, 0, 0), Vec3(2, 0.5, 0), Vec3(2.5, 3, 0), Vec3(-0.5, 2, 0));
    auto fit = fit_spline_patch(m, Vec3(0, 0, 0), Vec3(1, 1, 0), 2);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        const Vec3 z(uni(rng), uni(rng), 0);
        CHECK((fit->value(z) - m.value(z)).norm() <= 1e-13);
    }
}
