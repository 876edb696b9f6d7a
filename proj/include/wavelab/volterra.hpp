#pragma once

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "wavelab/coefficient.hpp"
#include "wavelab/mat2.hpp"
#include "wavelab/propagator.hpp"
#include "wavelab/quadrature.hpp"
#include "wavelab/zones.hpp"

namespace wavelab {

namespace detail {
inline double value_norm(double v) { return std::abs(v); }
inline double value_norm(cplx v) { return std::abs(v); }
inline double value_norm(const Mat2& v) { return v.norm(); }
}  // namespace detail

template <class Value>
struct VolterraSolution {
    std::vector<double> ts;
    std::vector<Value> fs;

    const Value& at_end() const { return fs.back(); }
};

/// Successive-approximation solver for f(t) = f0 + int_0^t k(t,tau) f(tau) dtau
/// on [0,T]. The interval is split so each piece has local contraction
/// factor <= 1/2 (sampled sup|k| times length), and pieces are solved
/// left to right by fixed-point iteration; quadrature is composite Simpson
/// on a uniform grid.
template <class Value, class Kernel>
VolterraSolution<Value> solve_volterra(const Value& f0, Kernel&& kernel, double T,
                                       double tol = 1e-10, int min_nodes = 257) {
    if (T <= 0.0) throw std::invalid_argument("horizon T must be positive");

    // sample the kernel for the contraction split and a resolution estimate
    double kmax = 0.0;
    for (int i = 0; i <= 32; ++i)
        for (int j = 0; j <= i; ++j) {
            double t = T * i / 32.0, tau = T * j / 32.0;
            kmax = std::max(kmax, detail::value_norm(kernel(t, tau)));
        }
    if (!std::isfinite(kmax)) throw std::runtime_error("volterra kernel unbounded on [0,T]");

    size_t m = static_cast<size_t>(std::max<double>(min_nodes, std::ceil(T / 0.01)));
    m = std::min<size_t>(m, 60001);
    if (m % 2 == 0) ++m;
    double h = T / double(m - 1);

    VolterraSolution<Value> sol;
    sol.ts.resize(m);
    for (size_t i = 0; i < m; ++i) sol.ts[i] = h * double(i);
    sol.fs.assign(m, f0);

    // contraction sub-intervals
    double piece = kmax > 0.0 ? std::min(T, 0.5 / kmax) : T;
    size_t stride = std::max<size_t>(2, static_cast<size_t>(piece / h));

    std::vector<Value> integrand(m, f0), cum;
    for (size_t lo = 0; lo + 1 < m; lo += stride) {
        size_t hi = std::min(m - 1, lo + stride);
        for (int iter = 0; iter < 200; ++iter) {
            double delta = 0.0;
            for (size_t i = lo + 1; i <= hi; ++i) {
                // row integral over [0, t_i]
                integrand.resize(i + 1);
                for (size_t j = 0; j <= i; ++j)
                    integrand[j] = kernel(sol.ts[i], sol.ts[j]) * sol.fs[j];
                cumulative_simpson(integrand, h, cum);
                Value next = f0 + cum[i];
                delta = std::max(delta, detail::value_norm(next - sol.fs[i]));
                sol.fs[i] = next;
            }
            if (delta <= tol) break;
            if (iter == 199) throw std::runtime_error("volterra fixed point did not converge");
        }
    }
    return sol;
}

namespace detail {

/// tau-only kernels (k(t,tau) = k(tau)) admit an O(m) sweep per iteration.
template <class Value, class Kernel>
std::vector<Value> solve_volterra_tau_only(const Value& f0, Kernel&& kernel,
                                           const std::vector<double>& ts, double tol) {
    size_t m = ts.size();
    double h = ts[1] - ts[0];
    std::vector<Value> f(m, f0), g(m, f0), cum;
    std::vector<Value> kv(m, f0);
    for (size_t j = 0; j < m; ++j) kv[j] = kernel(ts[j]);
    for (int iter = 0; iter < 200; ++iter) {
        for (size_t j = 0; j < m; ++j) g[j] = kv[j] * f[j];
        cumulative_simpson(g, h, cum);
        double delta = 0.0;
        for (size_t j = 0; j < m; ++j) {
            Value next = f0 + cum[j];
            delta = std::max(delta, value_norm(next - f[j]));
            f[j] = next;
        }
        if (delta <= tol) return f;
    }
    throw std::runtime_error("volterra fixed point did not converge");
}

}  // namespace detail

/// Diagonal-part fundamental solution Lambda(t,s) of the dissipative-zone
/// system.
inline Mat2 diss_zone_diagonal(const CoefficientModel& model, double t, double s) {
    return Mat2::diag((1.0 + s) / (1.0 + t), model.lambda_sq(s) / model.lambda_sq(t));
}

/// Integral-equation kernel K(tau,s,xi) = Lambda(s,tau) R(tau) Lambda(tau,s).
inline Mat2 diss_zone_kernel(const CoefficientModel& model, const ZoneGeometry& geom, double tau,
                             double s, double xi_abs) {
    double l2s = model.lambda_sq(s), l2tau = model.lambda_sq(tau);
    return {cplx(0.0), cplx(geom.N * l2s / (l2tau * (1.0 + s))),
            cplx(l2tau * (1.0 + s) * xi_abs * xi_abs / (l2s * geom.N)), cplx(0.0)};
}

/// Dissipative-zone propagator E(t,s,xi) = Lambda(t,s) G(t) via the
/// integral equation G = I + i int_s^t K G. Requires s <= t <= t_xi.
inline Mat2 solve_diss_zone(const CoefficientModel& model, const ZoneGeometry& geom, double t,
                            double s, double xi_abs, double tol = 1e-10) {
    double txi = geom.t_xi(xi_abs);
    if (s < 0.0 || t < s || t > txi * (1.0 + 1e-12) + 1e-12)
        throw std::invalid_argument("solve_diss_zone requires 0 <= s <= t <= t_xi");
    if (t == s) return Mat2::identity();

    size_t m = static_cast<size_t>(std::clamp((t - s) / 0.02, 256.0, 50000.0));
    if (m % 2 == 1) ++m;
    ++m;  // odd node count
    std::vector<double> ts(m);
    double h = (t - s) / double(m - 1);
    for (size_t i = 0; i < m; ++i) ts[i] = s + h * double(i);

    // cache lambda^2 along the grid (one quadrature per node otherwise)
    std::vector<double> l2(m);
    for (size_t i = 0; i < m; ++i) l2[i] = model.lambda_sq(ts[i]);
    double l2s = l2[0];
    size_t idx = 0;
    auto kernel = [&](double tau) {
        // grid nodes are visited in order; find index by rounding
        size_t j = static_cast<size_t>(std::llround((tau - s) / h));
        (void)idx;
        double l2tau = l2[j];
        Mat2 K{cplx(0.0), cplx(geom.N * l2s / (l2tau * (1.0 + s))),
               cplx(l2tau * (1.0 + s) * xi_abs * xi_abs / (l2s * geom.N)), cplx(0.0)};
        return cplx(0.0, 1.0) * K;
    };
    auto G = detail::solve_volterra_tau_only(Mat2::identity(), kernel, ts, tol);
    return diss_zone_diagonal(model, t, s) * G.back();
}

namespace detail {

using VarState = std::array<cplx, 12>;  // E, dE/dr, d2E/dr2

struct DissVariationalOde {
    const CoefficientModel* model;
    double N, r;

    void operator()(const VarState& x, VarState& dx, double t) const {
        cplx i(0.0, 1.0);
        double b = model->b(t, 0);
        Mat2 A{i / (1.0 + t), cplx(N / (1.0 + t)), cplx((1.0 + t) * r * r / N), i * b};
        Mat2 Ar{cplx(0.0), cplx(0.0), cplx(2.0 * (1.0 + t) * r / N), cplx(0.0)};
        Mat2 Arr{cplx(0.0), cplx(0.0), cplx(2.0 * (1.0 + t) / N), cplx(0.0)};
        Mat2 E{x[0], x[1], x[2], x[3]}, V{x[4], x[5], x[6], x[7]}, W{x[8], x[9], x[10], x[11]};
        Mat2 dE = i * (A * E);
        Mat2 dV = i * (A * V + Ar * E);
        Mat2 dW = i * (A * W + 2.0 * (Ar * V) + Arr * E);
        dx = {dE.a11, dE.a12, dE.a21, dE.a22, dV.a11, dV.a12, dV.a21, dV.a22,
              dW.a11, dW.a12, dW.a21, dW.a22};
    }
};

}  // namespace detail

/// D_xi^alpha E(t_xi, 0, xi) for |alpha| in {1,2} via the variational ODE,
/// including the t_xi dependence through the chain rule. Radial derivative
/// with the D convention factor (-i)^{|alpha|}.
inline Mat2 deriv_diss_zone(const CoefficientModel& model, const ZoneGeometry& geom,
                            double xi_abs, int alpha, double tol = 1e-10) {
    namespace ode = boost::numeric::odeint;
    if (alpha < 1 || alpha > 2)
        throw std::invalid_argument("deriv_diss_zone supports |alpha| in {1,2} only");
    if (xi_abs > geom.N) throw std::invalid_argument("deriv_diss_zone requires |xi| <= N");
    double txi = geom.t_xi(xi_abs);

    detail::VarState x{};
    x[0] = x[3] = 1.0;  // E = I, V = W = 0
    detail::DissVariationalOde sys{&model, geom.N, xi_abs};
    if (txi > 0.0) {
        using Stepper = ode::runge_kutta_dopri5<detail::VarState, double, detail::VarState,
                                                double, ode::array_algebra>;
        auto stepper = ode::make_controlled(tol, tol, Stepper());
        ode::integrate_adaptive(stepper, sys, x, 0.0, txi, 1e-3);
    }
    Mat2 E{x[0], x[1], x[2], x[3]}, V{x[4], x[5], x[6], x[7]}, W{x[8], x[9], x[10], x[11]};

    cplx i(0.0, 1.0);
    double t = txi, r = xi_abs, b = model.b(t, 0), bp = model.b(t, 1);
    Mat2 A{i / (1.0 + t), cplx(geom.N / (1.0 + t)), cplx((1.0 + t) * r * r / geom.N), i * b};
    Mat2 Ar{cplx(0.0), cplx(0.0), cplx(2.0 * (1.0 + t) * r / geom.N), cplx(0.0)};
    Mat2 At{-i / ((1.0 + t) * (1.0 + t)), cplx(-geom.N / ((1.0 + t) * (1.0 + t))),
            cplx(r * r / geom.N), i * bp};
    double txi_p = -geom.N / (r * r);
    double txi_pp = 2.0 * geom.N / (r * r * r);

    Mat2 Et = i * (A * E);
    Mat2 d1 = Et * txi_p + V;
    if (alpha == 1) return cplx(0.0, -1.0) * d1;

    Mat2 Ett = i * (At * E) + i * (A * Et);
    Mat2 Etr = i * (Ar * E) + i * (A * V);
    Mat2 d2 = Ett * (txi_p * txi_p) + Et * txi_pp + 2.0 * (Etr * txi_p) + W;
    return cplx(-1.0) * d2;  // (-i)^2
}

}  // namespace wavelab
