#pragma once

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "wavelab/coefficient.hpp"
#include "wavelab/mat2.hpp"
#include "wavelab/quadrature.hpp"
#include "wavelab/zones.hpp"

namespace wavelab {

enum class Zone { dissipative, hyperbolic };

/// System matrix A(t,xi) of the micro-energy system D_t E = A E
/// (convention D_t = -i d/dt, so the integrated ODE is dE/dt = i A E).
inline Mat2 system_matrix(const CoefficientModel& model, const ZoneGeometry& geom, double t,
                          double xi_abs, Zone zone) {
    double b = model.b(t, 0);
    if (zone == Zone::dissipative)
        return {cplx(0.0, 1.0) / (1.0 + t), cplx(geom.N / (1.0 + t)),
                cplx((1.0 + t) * xi_abs * xi_abs / geom.N), cplx(0.0, b)};
    return {cplx(0.0), cplx(xi_abs), cplx(xi_abs), cplx(0.0, b)};
}

inline Mat2 system_matrix(const CoefficientModel& model, const ZoneGeometry& geom, double t,
                          double xi_abs) {
    return system_matrix(model, geom, t, xi_abs,
                         geom.in_hyperbolic(t, xi_abs) ? Zone::hyperbolic : Zone::dissipative);
}

namespace detail {

using OdeState = std::array<cplx, 4>;

inline Mat2 to_mat(const OdeState& s) { return {s[0], s[1], s[2], s[3]}; }
inline OdeState to_state(const Mat2& m) { return {m.a11, m.a12, m.a21, m.a22}; }

template <class MatFn>
struct MatOde {
    MatFn A;
    void operator()(const OdeState& x, OdeState& dxdt, double t) const {
        Mat2 m = cplx(0.0, 1.0) * A(t);  // dE/dt = i A E
        Mat2 e = to_mat(x);
        Mat2 d = m * e;
        dxdt = to_state(d);
    }
};

template <class MatFn>
inline void integrate_segment(MatFn&& A, Mat2& E, double t0, double t1, double tol) {
    namespace ode = boost::numeric::odeint;
    if (t1 <= t0) return;
    using Stepper = ode::runge_kutta_dopri5<OdeState, double, OdeState, double, ode::array_algebra>;
    auto stepper = ode::make_controlled(tol, tol, Stepper());
    OdeState x = to_state(E);
    MatOde<std::decay_t<MatFn>> sys{std::forward<MatFn>(A)};
    double dt = std::min(0.1, (t1 - t0) / 16.0);
    ode::integrate_adaptive(stepper, sys, x, t0, t1, std::max(dt, 1e-12));
    E = to_mat(x);
}

}  // namespace detail

/// Direct high-accuracy integration of the micro-energy system: the
/// brute-force oracle every assembled representation is checked against.
/// Crosses the zone boundary at t_xi with the matrix switched there.
inline Mat2 fundamental_solution_oracle(const CoefficientModel& model, const ZoneGeometry& geom,
                                        double t, double s, double xi_abs, double tol = 1e-10) {
    if (t < s) throw std::invalid_argument("oracle requires t >= s");
    Mat2 E = Mat2::identity();
    double m = std::clamp(geom.t_xi(xi_abs), s, t);
    detail::integrate_segment(
        [&](double tau) { return system_matrix(model, geom, tau, xi_abs, Zone::dissipative); },
        E, s, m, tol);
    detail::integrate_segment(
        [&](double tau) { return system_matrix(model, geom, tau, xi_abs, Zone::hyperbolic); },
        E, m, t, tol);
    return E;
}

/// One integration pass harvesting E(t_i, s, xi) at sorted checkpoints.
inline std::vector<Mat2> oracle_checkpoints(const CoefficientModel& model,
                                            const ZoneGeometry& geom,
                                            const std::vector<double>& ts, double s,
                                            double xi_abs, double tol = 1e-10) {
    std::vector<Mat2> out;
    out.reserve(ts.size());
    Mat2 E = Mat2::identity();
    double cur = s;
    for (double t : ts) {
        if (t < cur) throw std::invalid_argument("checkpoints must be sorted and >= s");
        double m = std::clamp(geom.t_xi(xi_abs), cur, t);
        detail::integrate_segment(
            [&](double tau) { return system_matrix(model, geom, tau, xi_abs, Zone::dissipative); },
            E, cur, m, tol);
        detail::integrate_segment(
            [&](double tau) { return system_matrix(model, geom, tau, xi_abs, Zone::hyperbolic); },
            E, m, t, tol);
        cur = t;
        out.push_back(E);
    }
    return out;
}

/// Energy-operator symbol from a given fundamental solution E(t,0,xi).
inline Mat2 energy_symbol_from(const ZoneGeometry& geom, const Mat2& E, double t, double xi_abs) {
    double bracket = std::sqrt(1.0 + xi_abs * xi_abs);  // <xi>
    Mat2 left = Mat2::diag(xi_abs / geom.h(t, xi_abs), 1.0);
    Mat2 right = Mat2::diag(geom.h(0.0, xi_abs) / bracket, 1.0);
    return left * E * right;
}

inline Mat2 energy_symbol(const CoefficientModel& model, const ZoneGeometry& geom, double t,
                          double xi_abs, double tol = 1e-10) {
    if (xi_abs <= 0.0) throw std::domain_error("energy_symbol requires xi != 0");
    return energy_symbol_from(geom, fundamental_solution_oracle(model, geom, t, 0.0, xi_abs, tol),
                              t, xi_abs);
}

/// Free-wave energy symbol, closed form; det = [xi] = |xi|/<xi>.
inline Mat2 free_energy_symbol(double t, double xi_abs) {
    if (xi_abs <= 0.0) throw std::domain_error("free_energy_symbol requires xi != 0");
    double br = xi_abs / std::sqrt(1.0 + xi_abs * xi_abs);
    double c = std::cos(t * xi_abs), s = std::sin(t * xi_abs);
    return {cplx(br * c), cplx(0.0, s), cplx(0.0, br * s), cplx(c)};
}

/// Determinant predicted by the Liouville formula, via quadrature of tr A.
inline cplx liouville_determinant(const CoefficientModel& model, const ZoneGeometry& geom,
                                  double t, double s, double xi_abs) {
    double m = std::clamp(geom.t_xi(xi_abs), s, t);
    double int_b = integrate([&](double tau) { return model.b(tau, 0); }, s, t, 1e-12);
    // tr A = i/(1+tau) + i b in Z_diss, i b in Z_hyp; det = exp(i int tr A)
    return std::exp(-(std::log((1.0 + m) / (1.0 + s)) + int_b));
}

inline double liouville_defect(const CoefficientModel& model, const ZoneGeometry& geom, double t,
                               double s, double xi_abs, double tol = 1e-10) {
    Mat2 E = fundamental_solution_oracle(model, geom, t, s, xi_abs, tol);
    cplx pred = liouville_determinant(model, geom, t, s, xi_abs);
    return std::abs(E.det() - pred) / std::abs(pred);
}

}  // namespace wavelab
