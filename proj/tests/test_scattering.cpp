#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wavelab/coefficient.hpp"
#include "wavelab/diagonalization.hpp"
#include "wavelab/scattering.hpp"

using namespace wavelab;

namespace {
const ZoneGeometry G{2.0, 2, 0.0};
CoefficientModel scale_half() {
    return CoefficientModel(CoeffFamily::scale_invariant, {0.5, 1, 0.0}, 5);
}
}  // namespace

TEST_CASE("boundary energy symbol matches the direct one") {
    auto m = scale_half();
    for (double xi : {0.1, 0.8, 3.0}) {
        Mat2 B = boundary_energy_symbol(m, G, xi, 1e-11);
        Mat2 R = energy_symbol(m, G, G.t_xi(xi), xi, 1e-12);
        CHECK((B - R).norm() < 1e-7);
    }
}

TEST_CASE("zero dissipation scatters trivially: W_+ = I") {
    CoefficientModel zero(CoeffFamily::zero, {}, 5);
    DiagonalizationHierarchy h(2);
    for (double xi : {0.3, 1.0, 5.0}) {
        Mat2 W = w_plus(zero, h, G, xi, 1e-10);
        CHECK((W - Mat2::identity()).norm() < 1e-8);
    }
    auto curve = scattering_convergence(zero, h, G, 0.7, {5.0, 50.0, 500.0}, 1e-10);
    for (double d : curve.defect) CHECK(d < 1e-8);
}

TEST_CASE("frozen scattering operator at xi = 1") {
    auto m = scale_half();
    DiagonalizationHierarchy h(2);
    Mat2 W = w_plus(m, h, G, 1.0, 1e-11);
    CHECK(W.a11.real() == doctest::Approx(1.039587088150).epsilon(1e-7));
    CHECK(W.a12.imag() == doctest::Approx(+1.029499247581e-01).epsilon(1e-6));
    CHECK(W.a21.imag() == doctest::Approx(-9.206908706980e-02).epsilon(1e-6));
    CHECK(W.a22.real() == doctest::Approx(9.710379410219e-01).epsilon(1e-7));
    CHECK(std::abs(W.det() - cplx(1.0)) < 1e-8);
}

TEST_CASE("unit determinant across families and frequencies") {
    DiagonalizationHierarchy h(2);
    std::vector<CoefficientModel> models;
    models.push_back(scale_half());
    models.push_back(CoefficientModel(CoeffFamily::iterated_log, {2.0, 1, 0.0}, 5));
    models.push_back(CoefficientModel(CoeffFamily::oscillating, {0.0, 1, 10.0}, 5));
    for (const auto& m : models)
        for (double xi : {0.05, 1.0, 6.0})
            CHECK(w_plus_det_defect(m, h, G, xi, 1e-9) < 1e-6);
}

TEST_CASE("scattering operator independent of diagonalization depth") {
    auto m = scale_half();
    ZoneGeometry g4{4.0, 2, 0.0};
    DiagonalizationHierarchy h1(1), h2(2);
    for (double xi : {0.5, 2.0}) {
        Mat2 W1 = w_plus(m, h1, g4, xi, 1e-10);
        Mat2 W2 = w_plus(m, h2, g4, xi, 1e-10);
        CHECK((W1 - W2).norm() < 1e-6);
    }
}

TEST_CASE("convergence to W_+ at rate 1/t") {
    auto m = scale_half();
    DiagonalizationHierarchy h(2);
    auto curve = scattering_convergence(m, h, G, 1.0, {100.0, 1000.0}, 1e-10);
    REQUIRE(curve.defect.size() == 2);
    CHECK(curve.defect[0] > 0.0);
    double ratio = curve.defect[1] / curve.defect[0];
    CHECK(ratio > 0.05);   // slope -1 gives 0.1 over a decade
    CHECK(ratio < 0.2);
    // the modified amplitude lambda(t) is essential: without it no limit
    CHECK(curve.defect[0] < 0.1);
    CHECK_THROWS(scattering_convergence(m, h, G, 0.1, {5.0}, 1e-10));  // t <= t_xi
}

TEST_CASE("W_+ is invertible and recovers the boundary state") {
    auto m = scale_half();
    DiagonalizationHierarchy h(2);
    Mat2 W = w_plus(m, h, G, 0.6, 1e-10);
    CHECK(W.norm() < 10.0);
    CHECK((W * W.inverse() - Mat2::identity()).norm() < 1e-12);
    // free evolution composed with W_+ tracks the damped symbol at large t
    auto curve = scattering_convergence(m, h, G, 0.6, {2000.0}, 1e-10);
    CHECK(curve.defect[0] < 5e-3);
}
