#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wavelab/coefficient.hpp"
#include "wavelab/diagonalization.hpp"

using namespace wavelab;

namespace {
CoefficientModel scale_half(int ell = 7) {
    return CoefficientModel(CoeffFamily::scale_invariant, {0.5, 1, 0.0}, ell);
}
}  // namespace

TEST_CASE("stage 0: B = R = (i b / 2) * ones, F = diag") {
    DiagonalizationHierarchy h(2);
    SymbolExpr half_ib = SymbolExpr::b_deriv(0) * cplx(0.0, 0.5);
    for (const SymbolExpr* e :
         {&h.B_stage(0).e11, &h.B_stage(0).e12, &h.B_stage(0).e21, &h.B_stage(0).e22})
        CHECK((*e - half_ib).is_zero());
    CHECK((h.F_stage(0).e11 - half_ib).is_zero());
    CHECK(h.F_stage(0).e12.is_zero());
    CHECK(h.F_stage(0).e21.is_zero());
    CHECK((h.F_stage(0).e22 - half_ib).is_zero());
}

TEST_CASE("first improvement matrix N^(1)") {
    DiagonalizationHierarchy h(1);
    auto m = scale_half();
    // N^(1) entries are -+ i b / (4 |xi|); at t with b = 0.05 and |xi| = 1
    double t = 9.0;  // b(9) = 0.05
    std::vector<double> bd;
    m.b_all(t, h.needed_order(), bd);
    Mat2 N1 = h.N_stage(1).eval(bd, 1.0);
    CHECK(std::abs(N1.a12 - cplx(0.0, -0.0125)) < 1e-15);
    CHECK(std::abs(N1.a21 - cplx(0.0, +0.0125)) < 1e-15);
    CHECK(std::abs(N1.a11) + std::abs(N1.a22) == 0.0);
}

TEST_CASE("stage identity holds exactly at the expression level") {
    // B^(j) + (D N^(j+1) - N^(j+1) D) - F^(j) = 0 with D = diag(|xi|, -|xi|)
    DiagonalizationHierarchy h(3);
    SymMat2 D{SymbolExpr::u_pow(-1), {}, {}, SymbolExpr::u_pow(-1) * cplx(-1.0)};
    for (int j = 0; j < 3; ++j) {
        SymMat2 lhs = h.B_stage(j) + (D * h.N_stage(j + 1) - h.N_stage(j + 1) * D) - h.F_stage(j);
        CHECK(lhs.e11.is_zero());
        CHECK(lhs.e12.is_zero());
        CHECK(lhs.e21.is_zero());
        CHECK(lhs.e22.is_zero());
    }
    // accumulated F_{k-1} is exactly diagonal
    CHECK(h.F_km1().e12.is_zero());
    CHECK(h.F_km1().e21.is_zero());
}

TEST_CASE("zero coefficient collapses the hierarchy") {
    DiagonalizationHierarchy h(2);
    CoefficientModel zero(CoeffFamily::zero, {}, 5);
    auto e = h.eval(zero, 3.0, 0.7);
    CHECK((e.Nk - Mat2::identity()).norm() == 0.0);
    CHECK(e.Fk1.norm() == 0.0);
    CHECK(e.Rk.norm() == 0.0);
}

TEST_CASE("conjugation residual is an algebraic zero") {
    auto m = scale_half();
    ZoneGeometry g{2.0, 3, 0.0};
    for (int k : {1, 2, 3}) {
        DiagonalizationHierarchy h(k);
        double worst = 0.0;
        for (double xi : {0.05, 0.4, 1.0, 6.0}) {
            double t0 = g.t_xi(xi);
            for (double f : {1.0, 3.0, 30.0}) {
                double t = t0 > 0.0 ? t0 * f : f - 1.0;
                worst = std::max(worst, h.conjugation_residual(m, t, xi));
            }
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("smoothness bookkeeping and guards") {
    DiagonalizationHierarchy h3(3);
    CHECK(h3.required_smoothness() == 5);
    CHECK(h3.needed_order() <= h3.required_smoothness());
    CHECK_THROWS(h3.eval(scale_half(3), 1.0, 1.0));  // ell = 3 < 2k-1 = 5
    CHECK_THROWS(DiagonalizationHierarchy(0));
}

TEST_CASE("remainder shrinks with depth at a generic zone point") {
    auto m = scale_half();
    double xi = 0.8, t = 10.0;
    std::vector<double> bd;
    double prev = 1e9;
    for (int k : {1, 2, 3}) {
        DiagonalizationHierarchy h(k);
        m.b_all(t, h.needed_order(), bd);
        double r = h.B_k().eval(bd, xi).norm();
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("symbol class margins stable under sampling refinement") {
    auto m = scale_half();
    DiagonalizationHierarchy h(2);
    ZoneGeometry g = choose_zone_constant(m, h, 0.5);
    ZoneSampleSpec spec;
    double m1 = symbol_class_margin(h.N_k() - SymMat2::identity(), -1, 0, g, m, spec, 1, 1);
    spec.n_xi *= 2;
    double m2 = symbol_class_margin(h.N_k() - SymMat2::identity(), -1, 0, g, m, spec, 1, 1);
    CHECK(std::abs(m2 - m1) <= 0.05 * std::max(m1, 1e-12));
    CHECK(m1 > 0.0);
}
