#pragma once

#include <stdexcept>
#include <vector>

#include "wavelab/coefficient.hpp"
#include "wavelab/mat2.hpp"
#include "wavelab/symbol_expr.hpp"
#include "wavelab/zones.hpp"

namespace wavelab {

/// Hyperbolic-zone diagonalization hierarchy. Stage matrices are exact
/// symbolic expressions in {b, b', ..., |xi|^{-1}}; building the hierarchy
/// is model-independent, evaluation plugs in a concrete coefficient model.
///
/// Conventions (see tests for the identities they guarantee):
///   B^(0) = R = (i b/2) * ones,  F^(j) = diag B^(j),
///   N^(j+1) off-diagonal with entries -B12/(2|xi|), +B21/(2|xi|),
///   B^(j)  = R N_j - D_t N_j - (N_j D - D N_j) - N_j F_{j-1},
///   R_k    = N_k^{-1} B^(k),
/// which make the conjugation identity
///   (D_t - D - R) N_k = N_k (D_t - D - F_{k-1} - R_k)
/// hold exactly.
class DiagonalizationHierarchy {
  public:
    explicit DiagonalizationHierarchy(int depth) : k_(depth) {
        if (depth < 1) throw std::invalid_argument("diagonalization depth must be >= 1");
        build();
    }

    int depth() const { return k_; }
    int required_smoothness() const { return 2 * k_ - 1; }

    const SymMat2& N_stage(int j) const { return n_stage_.at(static_cast<size_t>(j)); }
    const SymMat2& F_stage(int j) const { return f_stage_.at(static_cast<size_t>(j)); }
    const SymMat2& B_stage(int j) const { return b_stage_.at(static_cast<size_t>(j)); }

    const SymMat2& N_k() const { return nk_; }
    const SymMat2& N_k_dt() const { return nk_dt_; }
    const SymMat2& F_km1() const { return fk1_; }
    const SymMat2& B_k() const { return b_stage_.back(); }

    struct Eval {
        Mat2 Nk, Nk_inv, Fk1, Rk;
    };

    /// Evaluate (N_k, N_k^{-1}, F_{k-1}, R_k) at a zone point.
    Eval eval(const std::vector<double>& b_derivs, double xi_abs) const {
        Eval e;
        e.Nk = nk_.eval(b_derivs, xi_abs);
        cplx d = e.Nk.det();
        if (std::abs(d) < 0.1)
            throw std::runtime_error("|det N_k| < 0.1: zone constant too small");
        e.Nk_inv = e.Nk.inverse();
        e.Fk1 = fk1_.eval(b_derivs, xi_abs);
        e.Rk = e.Nk_inv * b_stage_.back().eval(b_derivs, xi_abs);
        return e;
    }

    Eval eval(const CoefficientModel& model, double t, double xi_abs) const {
        check_smoothness(model);
        std::vector<double> bd;
        model.b_all(t, needed_order_, bd);
        return eval(bd, xi_abs);
    }

    /// highest b-derivative order any stored expression evaluates
    int needed_order() const { return needed_order_; }

    void check_smoothness(const CoefficientModel& model) const {
        if (model.ell() < required_smoothness())
            throw std::invalid_argument("model smoothness ell < 2k-1 required by depth k");
    }

    /// Defect of the conjugation identity at a point; an algebraic zero,
    /// so anything beyond rounding signals a broken recursion.
    double conjugation_residual(const CoefficientModel& model, double t, double xi_abs) const {
        check_smoothness(model);
        std::vector<double> bd;
        model.b_all(t, needed_order_, bd);
        Eval e = eval(bd, xi_abs);
        Mat2 D = Mat2::diag(xi_abs, -xi_abs);
        double b0 = bd[0];
        Mat2 R{cplx(0, 0.5 * b0), cplx(0, 0.5 * b0), cplx(0, 0.5 * b0), cplx(0, 0.5 * b0)};
        Mat2 dtNk = nk_dt_.eval(bd, xi_abs);
        Mat2 res = dtNk - (D + R) * e.Nk + e.Nk * (D + e.Fk1 + e.Rk);
        return res.norm();
    }

  private:
    void build() {
        SymbolExpr half_ib = SymbolExpr::b_deriv(0) * cplx(0.0, 0.5);
        SymMat2 R{half_ib, half_ib, half_ib, half_ib};
        SymMat2 D{SymbolExpr::u_pow(-1), {}, {}, SymbolExpr::u_pow(-1) * cplx(-1.0)};
        SymMat2 I = SymMat2::identity();

        n_stage_.push_back(I);  // N^(0)
        b_stage_.push_back(R);  // B^(0)

        SymMat2 n_sum = I;
        SymMat2 f_sum = SymMat2::zero();
        for (int j = 0; j < k_; ++j) {
            SymMat2 F = b_stage_.back().diag_part();
            f_stage_.push_back(F);

            const SymMat2& B = b_stage_.back();
            SymMat2 Nnext;
            Nnext.e12 = B.e12 * SymbolExpr::u_pow(1) * cplx(-0.5);
            Nnext.e21 = B.e21 * SymbolExpr::u_pow(1) * cplx(0.5);
            n_stage_.push_back(Nnext);

            f_sum = f_sum + F;
            n_sum = n_sum + Nnext;

            SymMat2 Bnext =
                R * n_sum - n_sum.Dt() - (n_sum * D - D * n_sum) - n_sum * f_sum;
            b_stage_.push_back(Bnext);
        }
        nk_ = n_sum;
        nk_dt_ = n_sum.Dt();
        fk1_ = f_sum;
        needed_order_ = std::max(nk_dt_.max_deriv_order(), 0);
        for (const auto& s : b_stage_) needed_order_ = std::max(needed_order_, s.max_deriv_order());
        needed_order_ = std::max(needed_order_, fk1_.max_deriv_order());
    }

    int k_;
    int needed_order_ = 0;
    std::vector<SymMat2> n_stage_, f_stage_, b_stage_;
    SymMat2 nk_, nk_dt_, fk1_;
};

/// Sampling spec for empirical symbol-class checks over Z_hyp.
struct ZoneSampleSpec {
    double xi_min = 1e-3, xi_max = 10.0;
    int n_xi = 24;
    std::vector<double> t_factors{1.0, 1.5, 2.5, 5.0, 12.0, 40.0, 200.0};
    double t_floor = 0.0;  // additive floor for t samples when t_xi = 0
};

/// Measured constant sup |D_t^k D_xi^a expr| |xi|^{-m1+a} (1+t)^{m2+k}
/// over sampled zone points, for k <= k_max, a <= a_max.
inline double symbol_class_margin(const SymbolExpr& expr, int m1, int m2,
                                  const ZoneGeometry& geom, const CoefficientModel& model,
                                  const ZoneSampleSpec& spec, int k_max = 1, int a_max = 1) {
    // symbolic derivative table
    std::vector<std::vector<SymbolExpr>> d(static_cast<size_t>(k_max) + 1);
    d[0].push_back(expr);
    for (int a = 0; a < a_max; ++a) d[0].push_back(d[0].back().Dxi());
    for (int k = 1; k <= k_max; ++k) {
        d[static_cast<size_t>(k)].resize(static_cast<size_t>(a_max) + 1);
        for (int a = 0; a <= a_max; ++a)
            d[static_cast<size_t>(k)][static_cast<size_t>(a)] =
                d[static_cast<size_t>(k - 1)][static_cast<size_t>(a)].Dt();
    }
    int need = 0;
    for (auto& row : d)
        for (auto& e : row) need = std::max(need, e.max_deriv_order());
    if (need > model.ell()) need = model.ell();  // caller guarantees enough smoothness

    double sup = 0.0;
    std::vector<double> bd;
    for (double xi : log_grid(spec.xi_min, spec.xi_max, spec.n_xi)) {
        double t0 = geom.t_xi(xi);
        for (double f : spec.t_factors) {
            double t = t0 > 0.0 ? t0 * f : spec.t_floor + (f - 1.0);
            model.b_all(t, need, bd);
            for (int k = 0; k <= k_max; ++k)
                for (int a = 0; a <= a_max; ++a) {
                    double v = std::abs(
                        d[static_cast<size_t>(k)][static_cast<size_t>(a)].eval(bd, xi));
                    double w = std::pow(xi, -m1 + a) * std::pow(1.0 + t, m2 + k);
                    sup = std::max(sup, v * w);
                }
        }
    }
    return sup;
}

inline double symbol_class_margin(const SymMat2& m, int m1, int m2, const ZoneGeometry& geom,
                                  const CoefficientModel& model, const ZoneSampleSpec& spec,
                                  int k_max = 1, int a_max = 1) {
    double s = 0.0;
    for (const SymbolExpr* e : {&m.e11, &m.e12, &m.e21, &m.e22})
        s = std::max(s, symbol_class_margin(*e, m1, m2, geom, model, spec, k_max, a_max));
    return s;
}

/// Doubling search for the smallest zone constant N in {2,4,...,2^16} with
/// sampled sup over Z_hyp(N) of ||N_k - I|| <= safety.
inline ZoneGeometry choose_zone_constant(const CoefficientModel& model,
                                         const DiagonalizationHierarchy& hier,
                                         double safety = 0.5) {
    if (safety <= 0.0 || safety >= 1.0)
        throw std::invalid_argument("safety must be in (0,1)");
    hier.check_smoothness(model);
    SymMat2 dev = hier.N_k() - SymMat2::identity();
    std::vector<double> bd;
    int need = hier.needed_order();
    for (double N = 2.0; N <= 65536.0; N *= 2.0) {
        ZoneGeometry geom{N, hier.depth(), 0.0};
        double sup = 0.0;
        // deviation decays into the zone; boundary samples dominate
        for (double xi : log_grid(1e-4, 16.0 * N, 40)) {
            double t0 = geom.t_xi(xi);
            for (double f : {1.0, 1.5, 3.0, 10.0, 100.0}) {
                double t = t0 > 0.0 ? t0 * f : (f - 1.0);
                model.b_all(t, need, bd);
                sup = std::max(sup, (hier.N_k().eval(bd, xi) - Mat2::identity()).norm());
            }
        }
        if (sup <= safety) {
            geom.margin = sup;
            return geom;
        }
    }
    throw std::runtime_error("zone constant search exhausted at N = 2^16");
}

}  // namespace wavelab
