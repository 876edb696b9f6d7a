#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wavelab/coefficient.hpp"
#include "wavelab/diagonalization.hpp"
#include "wavelab/mat2.hpp"
#include "wavelab/propagator.hpp"
#include "wavelab/quadrature.hpp"
#include "wavelab/volterra.hpp"
#include "wavelab/zones.hpp"

namespace wavelab {

/// Free phase factor E_0(t,s,xi) = diag(e^{i|xi|(t-s)}, e^{-i|xi|(t-s)}),
/// the fundamental solution of D_t E = D E with D = diag(|xi|, -|xi|).
inline Mat2 e0_phase(double t, double s, double xi_abs) {
    double phi = xi_abs * (t - s);
    return Mat2::diag(std::polar(1.0, phi), std::polar(1.0, -phi));
}

/// Generic Peano-Baker series for Q = I + sum_j i^j (iterated integrals of a
/// matrix kernel r(tau)) on [s,t], computed by repeated cumulative Simpson
/// passes on a uniform grid. Successive term sup-norms are reported so the
/// factorial majorant (int ||r||)^j / j! can be checked externally.
template <class KernelFn>
inline Mat2 peano_series(KernelFn&& r, double t, double s, size_t nodes, double tol,
                         std::vector<double>* term_sups = nullptr, int max_terms = 60) {
    if (t < s) throw std::invalid_argument("peano_series requires t >= s");
    if (term_sups) term_sups->clear();
    if (t == s) return Mat2::identity();
    size_t m = std::max<size_t>(nodes, 9);
    if (m % 2 == 0) ++m;
    double h = (t - s) / double(m - 1);

    std::vector<Mat2> kv(m), term(m, Mat2::identity()), g(m), cum;
    for (size_t j = 0; j < m; ++j) kv[j] = cplx(0.0, 1.0) * r(s + h * double(j));

    Mat2 sum = Mat2::identity();
    for (int j = 1; j <= max_terms; ++j) {
        for (size_t a = 0; a < m; ++a) g[a] = kv[a] * term[a];
        cumulative_simpson(g, h, cum);
        term = cum;
        double sup = 0.0;
        for (const Mat2& v : term) sup = std::max(sup, v.norm());
        if (term_sups) term_sups->push_back(sup);
        sum = sum + term.back();
        if (sup <= tol) return sum;
    }
    throw std::runtime_error("peano series did not reach tolerance");
}

/// Hyperbolic-zone transformed system. After splitting off the phase E_0 and
/// the amplitude lambda(s)/lambda(t), the remainder Q(t,s,xi) solves
///   D_t Q = scriptR(t) Q,  Q(s) = I,
///   scriptR(t) = F_{k-1}(t) - F^(0)(t) + E_0(s,t) R_k(t) E_0(t,s),
/// whose kernel is absolutely integrable in t on [s, infinity).
class HypZoneSystem {
  public:
    HypZoneSystem(const CoefficientModel& model, const DiagonalizationHierarchy& hier,
                  const ZoneGeometry& geom, double xi_abs)
        : model_(&model), hier_(&hier), geom_(geom), xi_(xi_abs) {
        if (xi_abs <= 0.0) throw std::domain_error("HypZoneSystem requires |xi| > 0");
        hier.check_smoothness(model);
    }

    double xi_abs() const { return xi_; }
    double t_xi() const { return geom_.t_xi(xi_); }

    DiagonalizationHierarchy::Eval eval(double t) const {
        std::vector<double> bd;
        model_->b_all(t, hier_->needed_order(), bd);
        return hier_->eval(bd, xi_);
    }

    Mat2 script_R(double t, double s) const {
        std::vector<double> bd;
        model_->b_all(t, hier_->needed_order(), bd);
        auto e = hier_->eval(bd, xi_);
        Mat2 diag_part = e.Fk1 - Mat2::diag(cplx(0.0, 0.5 * bd[0]), cplx(0.0, 0.5 * bd[0]));
        Mat2 conj = e0_phase(s, t, xi_) * e.Rk * e0_phase(t, s, xi_);
        return diag_part + conj;
    }

    /// Q(t,s,xi) by direct adaptive integration of the remainder ODE.
    Mat2 q_ode(double t, double s, double tol = 1e-11) const {
        Mat2 Q = Mat2::identity();
        detail::integrate_segment([&](double tau) { return script_R(tau, s); }, Q, s, t, tol);
        return Q;
    }

    /// One integration pass harvesting Q(t_i,s,xi) at sorted checkpoints.
    std::vector<Mat2> q_ode_checkpoints(const std::vector<double>& ts, double s,
                                        double tol = 1e-11) const {
        std::vector<Mat2> out;
        out.reserve(ts.size());
        Mat2 Q = Mat2::identity();
        double cur = s;
        for (double t : ts) {
            if (t < cur) throw std::invalid_argument("checkpoints must be sorted and >= s");
            detail::integrate_segment([&](double tau) { return script_R(tau, s); }, Q, cur, t,
                                      tol);
            cur = t;
            out.push_back(Q);
        }
        return out;
    }

    /// Q(t,s,xi) by summing the Peano-Baker series itself.
    Mat2 q_series(double t, double s, double tol = 1e-11,
                  std::vector<double>* term_sups = nullptr) const {
        size_t nodes = static_cast<size_t>(
            std::clamp((t - s) * std::max(1.0, xi_) * 64.0, 513.0, 200001.0));
        return peano_series([&](double tau) { return script_R(tau, s); }, t, s, nodes, tol,
                            term_sups);
    }

    /// P(t,s) = Q(t,s)^{-T}, which solves d/dt P = -i scriptR(t)^T P.
    Mat2 q_inverse_transpose(double t, double s, double tol = 1e-11) const {
        Mat2 P = Mat2::identity();
        detail::integrate_segment(
            [&](double tau) { return cplx(-1.0) * script_R(tau, s).transpose(); }, P, s, t, tol);
        return P;
    }

    /// int_T^{~inf} of the phase-invariant majorant
    /// ||F_{k-1} - F^(0)|| + ||R_k|| >= ||scriptR||: smooth, non-oscillatory,
    /// decays like (1+t)^{-2}, so a far cutoff captures the tail.
    double tail_integral(double T, double s) const {
        (void)s;
        double far = 1.0e4 * (1.0 + T);
        std::vector<double> bd;
        auto majorant = [&](double tau) {
            model_->b_all(tau, hier_->needed_order(), bd);
            auto e = hier_->eval(bd, xi_);
            double b0 = bd[0];
            Mat2 dp = e.Fk1 - Mat2::diag(cplx(0.0, 0.5 * b0), cplx(0.0, 0.5 * b0));
            return dp.norm() + e.Rk.norm();
        };
        return integrate(majorant, T, far, 1e-13);
    }

    /// Q(infinity, s, xi): integrate the remainder ODE with a doubling
    /// horizon until the remaining kernel mass bounds the truncation error
    /// below tol. Reports the horizon used if asked.
    Mat2 q_infinity(double s, double tol = 1e-9, double* horizon_out = nullptr,
                    double tol_ode = 1e-11) const {
        Mat2 Q = Mat2::identity();
        double T = std::max(2.0 * (1.0 + s), 8.0);
        detail::integrate_segment([&](double tau) { return script_R(tau, s); }, Q, s, T, tol_ode);
        for (;;) {
            double tail = tail_integral(T, s);
            // |Q(inf) - Q(T)| <= (e^tail - 1) sup||Q||
            double err = std::expm1(tail) * std::max(1.0, Q.norm());
            if (err <= tol) {
                if (horizon_out) *horizon_out = T;
                return Q;
            }
            if (T >= 1e10)
                throw std::runtime_error(
                    "q_infinity did not converge by horizon 1e10 (kernel not integrable?)");
            double T2 = 2.0 * T;
            detail::integrate_segment([&](double tau) { return script_R(tau, s); }, Q, T, T2,
                                      tol_ode);
            T = T2;
        }
    }

    struct QInfinityPair {
        Mat2 Q, Qinv;
        double horizon = 0.0;
        double inverse_defect = 0.0;  // ||Q Qinv - I||
    };

    /// Q(inf,s) together with its inverse from the transpose-inverse
    /// equation, cross-validated by the product defect.
    QInfinityPair q_infinity_pair(double s, double tol = 1e-9, double tol_ode = 1e-11) const {
        QInfinityPair out;
        out.Q = q_infinity(s, tol, &out.horizon, tol_ode);
        out.Qinv = q_inverse_transpose(out.horizon, s, tol_ode).transpose();
        out.inverse_defect = (out.Q * out.Qinv - Mat2::identity()).norm();
        return out;
    }

    /// Hyperbolic-zone propagator, valid for t_xi <= s <= t:
    ///   E(t,s) = (lambda(s)/lambda(t)) M N_k(t) E_0(t,s) Q(t,s) N_k(s)^{-1} M^{-1}.
    Mat2 propagator(double t, double s, double tol = 1e-11) const {
        return assemble_from_q(t, s, q_ode(t, s, tol));
    }

    Mat2 assemble_from_q(double t, double s, const Mat2& Q) const {
        Mat2 M{cplx(1.0), cplx(-1.0), cplx(1.0), cplx(1.0)};
        Mat2 Minv{cplx(0.5), cplx(0.5), cplx(-0.5), cplx(0.5)};
        auto et = eval(t);
        auto es = eval(s);
        double amp = model_->lambda(s) / model_->lambda(t);
        return amp * (M * et.Nk * e0_phase(t, s, xi_) * Q * es.Nk_inv * Minv);
    }

  private:
    const CoefficientModel* model_;
    const DiagonalizationHierarchy* hier_;
    ZoneGeometry geom_;
    double xi_;
};

/// Full two-zone representation of E(t,s,xi): Volterra solver up to the
/// zone boundary, diagonalized remainder system beyond it. Exact (up to
/// solver tolerances) for every diagonalization depth k >= 1.
inline Mat2 assemble_full(const CoefficientModel& model, const DiagonalizationHierarchy& hier,
                          const ZoneGeometry& geom, double t, double s, double xi_abs,
                          double tol = 1e-10) {
    if (t < s) throw std::invalid_argument("assemble_full requires t >= s");
    double txi = geom.t_xi(xi_abs);
    if (t <= txi) return solve_diss_zone(model, geom, t, s, xi_abs, tol);
    HypZoneSystem hyp(model, hier, geom, xi_abs);
    if (s >= txi) return hyp.propagator(t, s, tol);
    return hyp.propagator(t, txi, tol) * solve_diss_zone(model, geom, txi, s, xi_abs, tol);
}

/// Backend for the dissipative factor when assembling long t-curves:
/// the Volterra integral-equation solver (representation-faithful) or a
/// single direct Runge-Kutta pass (fast, non-oscillatory in Z_diss).
enum class DissBackend { volterra, rk_oracle };

/// Curve variant: E(t_i, s, xi) at sorted checkpoints with one remainder-ODE
/// pass across the hyperbolic part and one pass through the dissipative zone.
inline std::vector<Mat2> assemble_checkpoints(const CoefficientModel& model,
                                              const DiagonalizationHierarchy& hier,
                                              const ZoneGeometry& geom,
                                              const std::vector<double>& ts, double s,
                                              double xi_abs, double tol = 1e-10,
                                              DissBackend diss = DissBackend::volterra) {
    double txi = geom.t_xi(xi_abs);
    std::vector<Mat2> out;
    out.reserve(ts.size());

    std::vector<double> diss_ts, hyp_ts;
    for (double t : ts) (t <= txi ? diss_ts : hyp_ts).push_back(t);

    double m = std::max(s, txi);
    std::vector<Mat2> diss_es;
    Mat2 boundary = Mat2::identity();
    if (diss == DissBackend::rk_oracle) {
        std::vector<double> pass = diss_ts;
        if (s < txi) pass.push_back(txi);
        auto es = oracle_checkpoints(model, geom, pass, s, xi_abs, tol);
        if (s < txi) {
            boundary = es.back();
            es.pop_back();
        }
        diss_es = std::move(es);
    } else {
        for (double t : diss_ts) diss_es.push_back(solve_diss_zone(model, geom, t, s, xi_abs, tol));
        if (s < txi) boundary = solve_diss_zone(model, geom, txi, s, xi_abs, tol);
    }

    std::vector<Mat2> qs;
    HypZoneSystem hyp(model, hier, geom, xi_abs);
    if (!hyp_ts.empty()) qs = hyp.q_ode_checkpoints(hyp_ts, m, tol);

    size_t di = 0, qi = 0;
    for (double t : ts) {
        if (t <= txi)
            out.push_back(diss_es[di++]);
        else
            out.push_back(hyp.assemble_from_q(t, m, qs[qi++]) * boundary);
    }
    return out;
}

}  // namespace wavelab
