#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wavelab/coefficient.hpp"
#include "wavelab/propagator.hpp"
#include "wavelab/volterra.hpp"
#include "wavelab/zones.hpp"

using namespace wavelab;

namespace {
const ZoneGeometry G{2.0, 2, 0.0};
CoefficientModel scale_half() {
    return CoefficientModel(CoeffFamily::scale_invariant, {0.5, 1, 0.0}, 5);
}
}  // namespace

TEST_CASE("scalar solver reproduces the exponential") {
    auto sol = solve_volterra(1.0, [](double, double) { return 1.0; }, 1.0, 1e-12);
    CHECK(sol.at_end() == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
    // zero kernel: constant solution
    auto sol0 = solve_volterra(3.5, [](double, double) { return 0.0; }, 2.0);
    for (double f : sol0.fs) CHECK(f == 3.5);
    CHECK_THROWS(solve_volterra(1.0, [](double, double) { return 1.0; }, -1.0));
}

TEST_CASE("matrix solver: nilpotent kernel integrates exactly") {
    Mat2 K{cplx(0.0), cplx(1.0), cplx(0.0), cplx(0.0)};
    auto sol = solve_volterra(Mat2::identity(), [&](double, double) { return K; }, 3.0, 1e-12);
    Mat2 want = Mat2::identity() + 3.0 * K;  // K^2 = 0 truncates the series
    CHECK((sol.at_end() - want).norm() < 1e-10);
}

TEST_CASE("dissipative-zone diagonal and kernel entries") {
    auto m = scale_half();
    Mat2 L = diss_zone_diagonal(m, 9.0, 4.0);
    CHECK(std::abs(L.a11 - cplx(0.5)) < 1e-14);
    CHECK(std::abs(L.a22 - cplx(m.lambda_sq(4.0) / m.lambda_sq(9.0))) < 1e-14);
    CHECK(std::abs(L.a12) + std::abs(L.a21) == 0.0);

    Mat2 K = diss_zone_kernel(m, G, 5.0, 1.0, 0.1);
    CHECK(std::abs(K.a12 - cplx(2.0 * m.lambda_sq(1.0) / (m.lambda_sq(5.0) * 2.0))) < 1e-14);
    CHECK(std::abs(K.a21 - cplx(m.lambda_sq(5.0) * 2.0 * 0.01 / (m.lambda_sq(1.0) * 2.0))) <
          1e-14);
    CHECK(std::abs(K.a11) + std::abs(K.a22) == 0.0);
}

TEST_CASE("dissipative-zone solver matches the brute-force oracle") {
    auto m = scale_half();
    for (double xi : {0.01, 0.05}) {
        double txi = G.t_xi(xi);
        for (double t : {0.25 * txi, txi}) {
            Mat2 E = solve_diss_zone(m, G, t, 0.0, xi, 1e-11);
            Mat2 R = fundamental_solution_oracle(m, G, t, 0.0, xi, 1e-12);
            CHECK((E - R).norm() / R.norm() < 1e-6);
        }
        // interior start point
        Mat2 E = solve_diss_zone(m, G, 0.8 * txi, 0.2 * txi, xi, 1e-11);
        Mat2 R = fundamental_solution_oracle(m, G, 0.8 * txi, 0.2 * txi, xi, 1e-12);
        CHECK((E - R).norm() / R.norm() < 1e-6);
    }
    CHECK_THROWS(solve_diss_zone(m, G, 100.0, 0.0, 0.05));   // beyond t_xi
    CHECK_THROWS(solve_diss_zone(m, G, 1.0, 2.0, 0.05));     // t < s
    CHECK((solve_diss_zone(m, G, 3.0, 3.0, 0.05) - Mat2::identity()).norm() == 0.0);
}

TEST_CASE("propagator bounded by its diagonal part uniformly down to xi -> 0") {
    auto m = scale_half();
    double prev = 0.0;
    for (double xi : {0.02, 0.005, 0.001}) {
        double txi = G.t_xi(xi);
        Mat2 E = solve_diss_zone(m, G, txi, 0.0, xi, 1e-10);
        double c = E.norm() / diss_zone_diagonal(m, txi, 0.0).norm();
        CHECK(c < 10.0);
        if (prev > 0.0) CHECK(c < 2.0 * prev + 1.0);  // no blow-up as the zone widens
        prev = c;
    }
}

TEST_CASE("frequency derivatives at the zone boundary vs finite differences") {
    auto m = scale_half();
    double r = 0.05, h = 1e-3 * r;
    auto Eb = [&](double rr) {
        return fundamental_solution_oracle(m, G, G.t_xi(rr), 0.0, rr, 1e-12);
    };
    Mat2 fd1 = (1.0 / (2.0 * h)) * (Eb(r + h) - Eb(r - h));
    Mat2 d1 = deriv_diss_zone(m, G, r, 1, 1e-12);
    CHECK((d1 - cplx(0.0, -1.0) * fd1).norm() / fd1.norm() < 1e-3);

    Mat2 fd2 = (1.0 / (h * h)) * (Eb(r + h) - 2.0 * Eb(r) + Eb(r - h));
    Mat2 d2 = deriv_diss_zone(m, G, r, 2, 1e-12);
    CHECK((d2 - cplx(-1.0) * fd2).norm() / fd2.norm() < 1e-2);

    CHECK_THROWS(deriv_diss_zone(m, G, r, 3));
    CHECK_THROWS(deriv_diss_zone(m, G, 5.0, 1));
}

TEST_CASE("boundary derivative satisfies the symbol-type weight bound") {
    auto m = scale_half();
    // |D_xi E(t_xi,0,xi)| |xi| stays bounded as xi -> 0
    double sup = 0.0;
    for (double xi : {0.5, 0.1, 0.02, 0.004}) {
        double v = deriv_diss_zone(m, G, xi, 1, 1e-11).norm() * xi;
        sup = std::max(sup, v);
    }
    CHECK(sup < 50.0);
}
