#include <doctest.h>

#include <cmath>
#include <random>

#include "igamix/splines.hpp"

using namespace igamix;

namespace {

double eval_from_pairs(const std::vector<std::pair<int, double>>& pairs, const VecX& c) {
    double s = 0.0;
    for (auto [i, v] : pairs) s += c[i] * v;
    return s;
}

}  // namespace

TEST_CASE("open knot vector construction and invariants") {
    const auto kv = KnotVector::uniform_open(2, 2, 0);
    CHECK(kv.num_basis() == 5);  // n_el(p-r)+r+1
    CHECK(kv.num_elements() == 2);
    CHECK(kv.regularity() == 0);
    CHECK(kv.multiplicity(0.0) == 3);
    CHECK(kv.multiplicity(0.5) == 2);

    const auto disc = KnotVector::uniform_open(1, 2, -1);
    CHECK(disc.num_basis() == 4);  // n_el(p+1)
    CHECK(disc.regularity() == -1);

    CHECK_THROWS_AS(KnotVector(2, {0.0, 0.0, 0.5, 1.0, 1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(KnotVector::uniform_open(2, 3, 2), ConfigError);
}

TEST_CASE("dimension formula holds for constructed spaces") {
    for (int p = 1; p <= 5; ++p)
        for (int nel : {1, 2, 3, 7})
            for (int r = -1; r <= p - 1; ++r) {
                if (nel == 1 && r < 0) continue;
                const auto sp = SplineSpace1D::uniform(p, nel, r);
                const int expected = r >= 0 ? nel * (p - r) + r + 1 : nel * (p + 1);
                CHECK(sp.dim() == expected);
            }
}

TEST_CASE("Bernstein case: values at endpoints and midpoint") {
    const auto sp = SplineSpace1D::uniform(2, 1, 1);

    auto at0 = sp.eval_basis(0.0);
    REQUIRE(at0.size() == 3);
    CHECK(at0[0].first == 0);
    CHECK(at0[0].second == doctest::Approx(1.0));
    CHECK(at0[1].second == doctest::Approx(0.0));
    CHECK(at0[2].second == doctest::Approx(0.0));

    auto mid = sp.eval_basis(0.5);
    CHECK(mid[0].second == doctest::Approx(0.25));
    CHECK(mid[1].second == doctest::Approx(0.5));
    CHECK(mid[2].second == doctest::Approx(0.25));

    auto at1 = sp.eval_basis(1.0);  // right-closed evaluation
    CHECK(at1[2].second == doctest::Approx(1.0));
    CHECK(at1[0].second == doctest::Approx(0.0));

    CHECK_THROWS_AS(sp.eval_basis(1.5), std::domain_error);
    CHECK_THROWS_AS(sp.eval_basis(-0.1), std::domain_error);
}

TEST_CASE("partition of unity and local support") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int p : {1, 2, 3, 4})
        for (int r : {-1, 0, p - 1}) {
            const auto sp = SplineSpace1D::uniform(p, 4, r);
            for (int t = 0; t < 100; ++t) {
                const double z = uni(rng);
                auto pairs = sp.eval_basis(z);
                CHECK(pairs.size() <= static_cast<size_t>(p) + 1);
                double s = 0.0;
                for (auto [i, v] : pairs) {
                    CHECK(v >= -1e-15);
                    s += v;
                    const auto& knots = sp.knot_vector().knots();
                    CHECK(z >= knots[static_cast<size_t>(i)] - 1e-15);
                    CHECK(z <= knots[static_cast<size_t>(i + p + 1)] + 1e-15);
                }
                CHECK(std::abs(s - 1.0) <= 1e-14);
            }
        }
}

TEST_CASE("Bernstein derivative values") {
    const auto sp = SplineSpace1D::uniform(2, 1, 1);
    auto d = sp.eval_basis_derivative(0.5);
    CHECK(d[0].second == doctest::Approx(-1.0));
    CHECK(d[1].second == doctest::Approx(0.0));
    CHECK(d[2].second == doctest::Approx(1.0));
}

TEST_CASE("derivative values sum to zero and match finite differences") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> uni(0.05, 0.95);
    for (int p : {2, 3, 4}) {
        const auto sp = SplineSpace1D::uniform(p, 5, 0);
        VecX c = VecX::Random(sp.dim());
        for (int t = 0; t < 20; ++t) {
            const double z = uni(rng);
            auto d = sp.eval_basis_derivative(z);
            double s = 0.0;
            for (auto [i, v] : d) s += v;
            CHECK(std::abs(s) <= 1e-12);

            const double step = 1e-6;
            const double fd = (sp.eval(c, z + step) - sp.eval(c, z - step)) / (2 * step);
            CHECK(eval_from_pairs(d, c) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("knot insertion preserves the represented function") {
    const auto sp = SplineSpace1D::uniform(2, 1, 1);
    auto [fine, transfer] = sp.insert_knot(0.5);
    CHECK(sp.dim() == 3);
    CHECK(fine.dim() == 4);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int p : {2, 3}) {
        const auto coarse = SplineSpace1D::uniform(p, 3, p - 2);
        auto [refined, T] = coarse.insert_knot(0.7312);
        VecX c = VecX::Random(coarse.dim());
        VecX cf = T * c;
        for (int t = 0; t < 50; ++t) {
            const double z = uni(rng);
            CHECK(std::abs(coarse.eval(c, z) - refined.eval(cf, z)) <= 1e-13);
        }
    }

    // inserting an existing interior knot raises multiplicity by one
    const auto sp2 = SplineSpace1D::uniform(3, 2, 2);
    CHECK(sp2.knot_vector().multiplicity(0.5) == 1);
    auto [sp3, T3] = sp2.insert_knot(0.5);
    CHECK(sp3.knot_vector().multiplicity(0.5) == 2);
    CHECK(sp3.regularity() == 1);

    CHECK_THROWS_AS(sp.insert_knot(0.0), std::domain_error);
    CHECK_THROWS_AS(sp.insert_knot(1.0), std::domain_error);
}

TEST_CASE("derivative space maps coefficients exactly") {
    const auto sp = SplineSpace1D::uniform(2, 1, 1);
    auto [dsp, D] = sp.derivative_space();
    CHECK(dsp.degree() == 1);
    CHECK(dsp.dim() == 2);

    // c = (0,0,1) represents z^2; derivative must be 2z
    VecX c(3);
    c << 0, 0, 1;
    VecX dc = D * c;
    for (double z : {0.0, 0.3, 0.77, 1.0}) CHECK(dsp.eval(dc, z) == doctest::Approx(2 * z));

    VecX zero = VecX::Zero(3);
    CHECK((D * zero).norm() == 0.0);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int p : {2, 3, 4}) {
        const auto s = SplineSpace1D::uniform(p, 4, p - 2);
        auto [ds, Dm] = s.derivative_space();
        CHECK(ds.degree() == p - 1);
        CHECK(ds.regularity() == s.regularity() - 1);
        VecX coef = VecX::Random(s.dim());
        VecX dcoef = Dm * coef;
        for (int t = 0; t < 30; ++t) {
            const double z = uni(rng);
            CHECK(std::abs(s.eval_derivative(coef, z) - ds.eval(dcoef, z)) <= 1e-13);
        }
    }
}

TEST_CASE("chained derivative spaces lower degree and regularity twice") {
    const auto s = SplineSpace1D::uniform(4, 3, 2);
    auto [d1, D1] = s.derivative_space();
    auto [d2, D2] = d1.derivative_space();
    CHECK(d2.degree() == 2);
    CHECK(d2.regularity() == 0);

    // composed map equals the second-derivative evaluation
    VecX c = VecX::Random(s.dim());
    VecX cdd = D2 * (D1 * c);
    for (double z : {0.1, 0.45, 0.9}) {
        auto sp2 = s.derivatives(z, 2);
        double direct = 0.0;
        for (int j = 0; j < sp2.count; ++j) direct += c[sp2.first + j] * sp2.value[static_cast<size_t>(j)];
        CHECK(d2.eval(cdd, z) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("tensor product space dims and evaluation") {
    TensorSplineSpace ts({SplineSpace1D::uniform(2, 2, 0), SplineSpace1D::uniform(1, 2, -1)});
    CHECK(ts.dim() == 5 * 4);
    VecX c = VecX::Zero(ts.dim());
    c[ts.linear_index({1, 2, 0})] = 1.0;
    const Vec3 z(0.3, 0.6, 0.0);
    const double b1 = ts.axis(0).eval_basis(z[0]).size() ? [&] {
        VecX e = VecX::Zero(5);
        e[1] = 1.0;
        return ts.axis(0).eval(e, z[0]);
    }() : 0.0;
    VecX e2 = VecX::Zero(4);
    e2[2] = 1.0;
    CHECK(ts.eval(c, z) == doctest::Approx(b1 * ts.axis(1).eval(e2, z[1])));
}
