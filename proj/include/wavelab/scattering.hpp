#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wavelab/coefficient.hpp"
#include "wavelab/diagonalization.hpp"
#include "wavelab/mat2.hpp"
#include "wavelab/peano.hpp"
#include "wavelab/propagator.hpp"
#include "wavelab/volterra.hpp"
#include "wavelab/zones.hpp"

namespace wavelab {

/// Energy symbol at the zone boundary time t_xi, with the dissipative part
/// supplied by the Volterra solver (t_xi > 0) or trivial (t_xi = 0).
inline Mat2 boundary_energy_symbol(const CoefficientModel& model, const ZoneGeometry& geom,
                                   double xi_abs, double tol = 1e-10) {
    double txi = geom.t_xi(xi_abs);
    Mat2 E = txi > 0.0 ? solve_diss_zone(model, geom, txi, 0.0, xi_abs, tol) : Mat2::identity();
    return energy_symbol_from(geom, E, txi, xi_abs);
}

/// Modified scattering operator
///   W_+(xi) = E0fr(t_xi)^{-1} M Q(inf, t_xi) N_k(t_xi)^{-1} M^{-1}
///             lambda(t_xi) Efr(t_xi),
/// (E0fr = free energy symbol, Efr = energy symbol), the t -> infinity limit
/// of lambda(t) E0fr(t)^{-1} Efr(t). Has unit determinant.
inline Mat2 w_plus(const CoefficientModel& model, const DiagonalizationHierarchy& hier,
                   const ZoneGeometry& geom, double xi_abs, double tol = 1e-10,
                   double* horizon_out = nullptr) {
    double txi = geom.t_xi(xi_abs);
    HypZoneSystem hyp(model, hier, geom, xi_abs);
    Mat2 Qinf = hyp.q_infinity(txi, tol, horizon_out);
    Mat2 M{cplx(1.0), cplx(-1.0), cplx(1.0), cplx(1.0)};
    Mat2 Minv{cplx(0.5), cplx(0.5), cplx(-0.5), cplx(0.5)};
    Mat2 Nk_inv = hyp.eval(txi).Nk_inv;
    Mat2 Efr = boundary_energy_symbol(model, geom, xi_abs, tol);
    return free_energy_symbol(txi, xi_abs).inverse() * M * Qinf * Nk_inv * Minv *
           (model.lambda(txi) * Efr);
}

/// Convergence curve d(t_i) = || lambda(t_i) E0fr(t_i)^{-1} Efr(t_i) - W_+ ||
/// at sorted times t_i > t_xi, with one remainder-ODE pass. Decays like 1/t.
struct ScatteringCurve {
    std::vector<double> ts;
    std::vector<double> defect;
    Mat2 Wplus;
};

inline ScatteringCurve scattering_convergence(const CoefficientModel& model,
                                              const DiagonalizationHierarchy& hier,
                                              const ZoneGeometry& geom, double xi_abs,
                                              const std::vector<double>& ts,
                                              double tol = 1e-10) {
    double txi = geom.t_xi(xi_abs);
    for (double t : ts)
        if (t <= txi) throw std::invalid_argument("scattering curve needs t > t_xi");

    ScatteringCurve out;
    out.ts = ts;
    out.Wplus = w_plus(model, hier, geom, xi_abs, tol);

    HypZoneSystem hyp(model, hier, geom, xi_abs);
    auto qs = hyp.q_ode_checkpoints(ts, txi, tol);
    Mat2 boundary = txi > 0.0 ? solve_diss_zone(model, geom, txi, 0.0, xi_abs, tol)
                              : Mat2::identity();
    Mat2 right = Mat2::diag(geom.h(0.0, xi_abs) / std::sqrt(1.0 + xi_abs * xi_abs), 1.0);

    out.defect.reserve(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        double t = ts[i];
        Mat2 E = hyp.assemble_from_q(t, txi, qs[i]) * boundary;
        Mat2 sym = E * right;  // energy symbol: |xi|/h(t) = 1 in Z_hyp
        Mat2 approx = model.lambda(t) * (free_energy_symbol(t, xi_abs).inverse() * sym);
        out.defect.push_back((approx - out.Wplus).norm());
    }
    return out;
}

/// Unit-determinant defect of W_+ at a frequency.
inline double w_plus_det_defect(const CoefficientModel& model,
                                const DiagonalizationHierarchy& hier, const ZoneGeometry& geom,
                                double xi_abs, double tol = 1e-10) {
    return std::abs(w_plus(model, hier, geom, xi_abs, tol).det() - cplx(1.0));
}

}  // namespace wavelab
