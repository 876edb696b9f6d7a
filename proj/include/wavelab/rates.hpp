#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavelab/coefficient.hpp"
#include "wavelab/diagonalization.hpp"
#include "wavelab/mat2.hpp"
#include "wavelab/parallel.hpp"
#include "wavelab/peano.hpp"
#include "wavelab/propagator.hpp"
#include "wavelab/zones.hpp"

namespace wavelab {

struct FitResult {
    double exponent = 0.0;
    double stderr_ = 0.0;
    int points = 0;
};

/// Least-squares slope of log(value) against log(1+t) over a t-window.
inline FitResult fit_decay_exponent(const std::vector<double>& ts,
                                    const std::vector<double>& vals, double t_lo, double t_hi) {
    if (ts.size() != vals.size()) throw std::invalid_argument("fit: size mismatch");
    std::vector<double> xs, ys;
    for (size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < t_lo || ts[i] > t_hi) continue;
        if (!(vals[i] > 0.0)) throw std::invalid_argument("fit: non-positive value in window");
        xs.push_back(std::log1p(ts[i]));
        ys.push_back(std::log(vals[i]));
    }
    size_t n = xs.size();
    if (n < 2) throw std::invalid_argument("fit: fewer than two points in window");
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) mx += xs[i], my += ys[i];
    mx /= double(n), my /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    FitResult f;
    f.points = static_cast<int>(n);
    f.exponent = sxy / sxx;
    if (n > 2) {
        double rss = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double r = ys[i] - my - f.exponent * (xs[i] - mx);
            rss += r * r;
        }
        f.stderr_ = std::sqrt(rss / double(n - 2) / sxx);
    }
    return f;
}

enum class Observable { energy, solution };

inline std::string observable_name(Observable o) {
    return o == Observable::energy ? "energy" : "solution";
}

/// Pointwise multiplier norm of the selected observable, from E(t,0,xi).
/// energy:   ||Efr(t,xi)|| with Efr the energy symbol;
/// solution: row norm of the multiplier (u1, <xi>^{-1} u2) -> u(t) built
///           from the first row of E divided by h(t,xi).
inline double observable_norm(Observable obs, const ZoneGeometry& geom, const Mat2& E, double t,
                              double xi_abs) {
    if (obs == Observable::energy) return energy_symbol_from(geom, E, t, xi_abs).norm();
    double ht = geom.h(t, xi_abs), h0 = geom.h(0.0, xi_abs);
    double br = std::sqrt(1.0 + xi_abs * xi_abs);
    cplx s1 = E.a11 * (h0 / ht), s2 = E.a12 * (br / ht);
    return std::sqrt(std::norm(s1) + std::norm(s2));
}

struct DecayReport {
    std::string observable;
    std::vector<double> ts;
    std::vector<double> measured;
    std::vector<double> predicted;
    FitResult fit;                          // over [fit_lo, fit_hi]
    double fit_lo = 0.0, fit_hi = 0.0;
    double ratio_lo = 0.0, ratio_hi = 0.0;  // range of measured/predicted
};

inline void finalize_report(DecayReport& rep, double fit_lo, double fit_hi) {
    rep.fit_lo = fit_lo;
    rep.fit_hi = fit_hi;
    rep.fit = fit_decay_exponent(rep.ts, rep.measured, fit_lo, fit_hi);
    rep.ratio_lo = 1e300;
    rep.ratio_hi = 0.0;
    for (size_t i = 0; i < rep.ts.size(); ++i) {
        double r = rep.measured[i] / rep.predicted[i];
        rep.ratio_lo = std::min(rep.ratio_lo, r);
        rep.ratio_hi = std::max(rep.ratio_hi, r);
    }
}

/// sup over the xi-grid of the observable's multiplier norm along a t-grid
/// (the Plancherel surrogate for the 2->2 operator norm), with the predicted
/// model curve (1/lambda for energy, (1+t)/lambda^2 for solution).
inline DecayReport operator_norm_curve(const CoefficientModel& model,
                                       const DiagonalizationHierarchy& hier,
                                       const ZoneGeometry& geom, Observable obs,
                                       const std::vector<double>& t_grid,
                                       const std::vector<double>& xi_grid, double tol = 1e-9,
                                       int threads = 1, double fit_lo = 1e2,
                                       double fit_hi = 1e4) {
    DecayReport rep;
    rep.observable = observable_name(obs);
    rep.ts = t_grid;
    rep.measured.assign(t_grid.size(), 0.0);
    rep.predicted.resize(t_grid.size());
    for (size_t i = 0; i < t_grid.size(); ++i) {
        double t = t_grid[i];
        rep.predicted[i] = obs == Observable::energy ? 1.0 / model.lambda(t)
                                                     : (1.0 + t) / model.lambda_sq(t);
    }

    std::vector<std::vector<double>> per_xi(xi_grid.size());
    parallel_for(xi_grid.size(), threads, [&](size_t j) {
        auto es = assemble_checkpoints(model, hier, geom, t_grid, 0.0, xi_grid[j], tol,
                                       DissBackend::rk_oracle);
        std::vector<double> col(t_grid.size());
        for (size_t i = 0; i < t_grid.size(); ++i)
            col[i] = observable_norm(obs, geom, es[i], t_grid[i], xi_grid[j]);
        per_xi[j] = std::move(col);
    });
    for (const auto& col : per_xi)
        for (size_t i = 0; i < col.size(); ++i) rep.measured[i] = std::max(rep.measured[i], col[i]);

    finalize_report(rep, fit_lo, fit_hi);
    return rep;
}

/// Radial band-limited Cauchy data in frequency space.
struct RadialProfile {
    double rho_min = 0.0, rho_max = 0.0;
    std::function<double(double)> u1hat;
    std::function<double(double)> u2hat;
};

/// C^inf bump supported on [a,b] (first datum only), peak value ~ amp/e.
inline RadialProfile bump_profile(double a, double b, double amp = 1.0) {
    double c = 0.25 * (b - a) * (b - a);
    auto f = [a, b, c, amp](double r) {
        if (r <= a || r >= b) return 0.0;
        return amp * std::exp(-c / ((r - a) * (b - r)));
    };
    return {a, b, f, [](double) { return 0.0; }};
}

/// Micro-energy initial vector U(0) = (h(0,rho) u1hat, -i u2hat).
inline std::array<cplx, 2> initial_micro_energy(const ZoneGeometry& geom,
                                                const RadialProfile& data, double rho) {
    return {cplx(geom.h(0.0, rho) * data.u1hat(rho)), cplx(0.0, -data.u2hat(rho))};
}

/// Direct radial synthesis (small t): uhat(t,rho) on a Simpson grid from the
/// RK oracle, then the radial inversion
///   n = 3: u(t,r) = (2 pi^2)^{-1} int uhat sin(rho r)/(rho r) rho^2 drho,
///   n = 1: u(t,x) = (1/pi)      int uhat cos(rho x) drho.
inline std::vector<double> radial_synthesis_direct(const CoefficientModel& model,
                                                   const ZoneGeometry& geom, int n,
                                                   const RadialProfile& data, double t,
                                                   const std::vector<double>& r_grid,
                                                   double tol = 1e-10, int threads = 1) {
    if (n != 1 && n != 3) throw std::invalid_argument("radial synthesis supports n in {1,3}");
    double rmax = *std::max_element(r_grid.begin(), r_grid.end());
    double lo = std::max(data.rho_min, 1e-9), hi = data.rho_max;
    size_t m = static_cast<size_t>(
        std::clamp((hi - lo) * std::max(64.0, 8.0 * (t + rmax)), 513.0, 200001.0));
    if (m % 2 == 0) ++m;
    double h = (hi - lo) / double(m - 1);

    std::vector<cplx> uh(m);
    parallel_for(m, threads, [&](size_t j) {
        double rho = lo + h * double(j);
        auto U0 = initial_micro_energy(geom, data, rho);
        auto U = fundamental_solution_oracle(model, geom, t, 0.0, rho, tol).apply(U0);
        uh[j] = U[0] / geom.h(t, rho);
    });

    std::vector<double> out(r_grid.size());
    for (size_t ri = 0; ri < r_grid.size(); ++ri) {
        double r = r_grid[ri];
        cplx acc = 0.0;
        for (size_t j = 0; j < m; ++j) {
            double rho = lo + h * double(j);
            double w = (j == 0 || j == m - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            double kern;
            if (n == 3) {
                double x = rho * r;
                kern = (std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x) * rho * rho;
            } else {
                kern = std::cos(rho * r);
            }
            acc += w * kern * uh[j];
        }
        acc *= h / 3.0;
        out[ri] = std::real(acc) * (n == 3 ? 1.0 / (2.0 * M_PI * M_PI) : 1.0 / M_PI);
    }
    return out;
}

namespace detail {

struct AmplitudeSpline {
    CubicSpline re, im;
    cplx operator()(double rho) const { return {re.eval(rho, 0), im.eval(rho, 0)}; }
};

}  // namespace detail

/// Frequency field at a fixed (large) time in amplitude-phase form
///   uhat(t,rho) = A_+(rho) e^{i rho t} + A_-(rho) e^{-i rho t},
/// with A_+- smooth and slowly varying across the data band, sampled on a
/// coarse grid (one dissipative-zone pass + one remainder-ODE solve per
/// node) and interpolated by cubic splines. Valid once the whole band has
/// left the dissipative zone (t >= t_xi(rho_min)).
class WaveZoneField {
  public:
    WaveZoneField(const CoefficientModel& model, const DiagonalizationHierarchy& hier,
                  const ZoneGeometry& geom, const RadialProfile& data, double t,
                  size_t coarse_nodes = 481, double tol = 1e-9, int threads = 1)
        : rho_min_(std::max(data.rho_min, 1e-9)), rho_max_(data.rho_max), t_(t) {
        if (t < geom.t_xi(rho_min_))
            throw std::invalid_argument("WaveZoneField needs the band outside Z_diss");
        size_t m = std::max<size_t>(coarse_nodes, 33);
        std::vector<double> rho(m);
        double h = (rho_max_ - rho_min_) / double(m - 1);
        for (size_t j = 0; j < m; ++j) rho[j] = rho_min_ + h * double(j);

        std::vector<cplx> ap(m), am(m);
        Mat2 Minv{cplx(0.5), cplx(0.5), cplx(-0.5), cplx(0.5)};
        parallel_for(m, threads, [&](size_t j) {
            double r = rho[j];
            double tb = geom.t_xi(r);
            HypZoneSystem hyp(model, hier, geom, r);
            Mat2 Eb = tb > 0.0 ? fundamental_solution_oracle(model, geom, tb, 0.0, r, tol)
                               : Mat2::identity();
            auto U0 = initial_micro_energy(geom, data, r);
            auto mid = (Minv * Eb).apply(U0);
            auto v =
                (model.lambda(tb) * (hyp.q_ode(t, tb, tol) * hyp.eval(tb).Nk_inv)).apply(mid);
            Mat2 NkT = hyp.eval(t).Nk;
            cplx c1 = NkT.a11 - NkT.a21, c2 = NkT.a12 - NkT.a22;
            double scale = 1.0 / (r * model.lambda(t));
            // split e^{+-i rho (t - tb)} = e^{+-i rho t} e^{-+i rho tb}
            ap[j] = c1 * v[0] * std::polar(scale, -r * tb);
            am[j] = c2 * v[1] * std::polar(scale, +r * tb);
        });
        build_spline(aplus_, rho, ap);
        build_spline(aminus_, rho, am);
    }

    double time() const { return t_; }

    cplx uhat(double rho) const {
        return aplus_(rho) * std::polar(1.0, rho * t_) + aminus_(rho) * std::polar(1.0, -rho * t_);
    }

    /// u(t,r) by oscillatory quadrature with the four explicit phases
    /// rho (+-t +- r) on a fine grid over the band.
    double evaluate(int n, double r) const {
        if (n != 1 && n != 3) throw std::invalid_argument("n in {1,3}");
        if (n == 3 && r < 1e-9) r = 1e-9;
        cplx total = 0.0;
        for (int st : {+1, -1}) {
            const detail::AmplitudeSpline& A = st > 0 ? aplus_ : aminus_;
            for (int sr : {+1, -1}) {
                double phi = st * t_ + sr * r;
                cplx I = oscillatory_band_integral(A, phi, n == 3);
                if (n == 3)
                    total += double(sr) * I;  // sin = (e^{ix} - e^{-ix})/(2i)
                else
                    total += I;
            }
        }
        if (n == 3) return std::real(total / (cplx(0.0, 2.0) * r) / (2.0 * M_PI * M_PI));
        return std::real(total) / (2.0 * M_PI);
    }

  private:
    static void build_spline(detail::AmplitudeSpline& s, const std::vector<double>& x,
                             const std::vector<cplx>& v) {
        std::vector<double> re(v.size()), im(v.size());
        for (size_t i = 0; i < v.size(); ++i) re[i] = v[i].real(), im[i] = v[i].imag();
        s.re.build(x, re);
        s.im.build(x, im);
    }

    cplx oscillatory_band_integral(const detail::AmplitudeSpline& A, double phi,
                                   bool weight_rho) const {
        size_t m = static_cast<size_t>(
            std::clamp((rho_max_ - rho_min_) * (16.0 + 4.0 * std::abs(phi)), 257.0, 400001.0));
        if (m % 2 == 0) ++m;
        double h = (rho_max_ - rho_min_) / double(m - 1);
        cplx acc = 0.0;
        for (size_t j = 0; j < m; ++j) {
            double rho = rho_min_ + h * double(j);
            double w = (j == 0 || j == m - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            cplx g = A(rho);
            if (weight_rho) g *= rho;
            acc += w * g * std::polar(1.0, rho * phi);
        }
        return acc * (h / 3.0);
    }

    double rho_min_, rho_max_, t_;
    detail::AmplitudeSpline aplus_, aminus_;
};

/// Minimal smoothness for dimension-n L^p-L^q experiments.
inline int dimension_min_smoothness(int n) { return 2 * ((n + 1) / 2) + 1; }

inline void validate_dimension_smoothness(const CoefficientModel& model, int n) {
    if (model.ell() < dimension_min_smoothness(n))
        throw std::invalid_argument("model smoothness ell below 2*ceil(n/2)+1 for dimension n");
}

/// Dispersive sup-norm experiment: sup_r |u(t,r)| near the wavefront for
/// band-limited radial data, against the predicted hyperbolic rate
/// lambda^{-1}(t) (1+t)^{-(n-1)/2}.
inline DecayReport dispersive_decay_experiment(const CoefficientModel& model,
                                               const DiagonalizationHierarchy& hier,
                                               const ZoneGeometry& geom, int n,
                                               const std::vector<double>& t_grid,
                                               const RadialProfile& data, double tol = 1e-9,
                                               int threads = 1) {
    if (n != 1 && n != 3) throw std::invalid_argument("n in {1,3}");
    validate_dimension_smoothness(model, n);
    DecayReport rep;
    rep.observable = "dispersive";
    rep.ts = t_grid;
    rep.measured.resize(t_grid.size());
    rep.predicted.resize(t_grid.size());
    for (size_t i = 0; i < t_grid.size(); ++i) {
        double t = t_grid[i];
        WaveZoneField field(model, hier, geom, data, t, 481, tol, threads);
        double sup = 0.0;
        std::vector<double> rs;
        for (double off = -25.0; off <= 15.0; off += 0.5)
            if (t + off > 1e-6) rs.push_back(t + off);
        std::vector<double> vals(rs.size());
        parallel_for(rs.size(), threads, [&](size_t j) { vals[j] = field.evaluate(n, rs[j]); });
        for (double v : vals) sup = std::max(sup, std::abs(v));
        rep.measured[i] = sup;
        rep.predicted[i] =
            std::pow(1.0 + t, -0.5 * (n - 1)) / model.lambda(t);
    }
    finalize_report(rep, t_grid.front(), t_grid.back());
    return rep;
}

}  // namespace wavelab
