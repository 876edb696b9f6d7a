#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavelab/quadrature.hpp"
#include "wavelab/taylor_jet.hpp"

namespace wavelab {

enum class CoeffFamily { zero, scale_invariant, iterated_log, oscillating, tabulated };

struct CoeffParams {
    double mu = 0.0;    // dimensionless strength
    int n = 1;          // iteration depth (iterated_log)
    double alpha = 0.0; // oscillation frequency
};

namespace detail {

inline double iterated_exp(int n) {
    double e = 1.0;
    for (int i = 0; i < n; ++i) e = std::exp(e);
    return e;
}

// natural cubic spline for the tabulated family
struct CubicSpline {
    std::vector<double> x, y, m;  // m: second derivatives

    void build(std::vector<double> xs, std::vector<double> ys) {
        x = std::move(xs);
        y = std::move(ys);
        size_t n = x.size();
        m.assign(n, 0.0);
        if (n < 3) return;
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
        for (size_t i = 1; i + 1 < n; ++i) {
            double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
        // Thomas algorithm, natural ends
        for (size_t i = 2; i + 1 < n; ++i) {
            double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        for (size_t i = n - 2; i >= 1; --i) {
            m[i] = (d[i] - c[i] * (i + 2 < n ? m[i + 1] : 0.0)) / b[i];
            if (i == 1) break;
        }
    }

    double eval(double t, int deriv) const {
        size_t n = x.size();
        if (n < 2) return deriv == 0 && n == 1 ? y[0] : 0.0;
        size_t i = std::upper_bound(x.begin(), x.end(), t) - x.begin();
        i = std::clamp<size_t>(i, 1, n - 1);
        double h = x[i] - x[i - 1];
        double A = (x[i] - t) / h, B = (t - x[i - 1]) / h;
        if (deriv == 0)
            return A * y[i - 1] + B * y[i] +
                   ((A * A * A - A) * m[i - 1] + (B * B * B - B) * m[i]) * h * h / 6.0;
        return (y[i] - y[i - 1]) / h +
               (-(3.0 * A * A - 1.0) * m[i - 1] + (3.0 * B * B - 1.0) * m[i]) * h / 6.0;
    }
};

}  // namespace detail

/// Evaluator bundle for a dissipation coefficient b(t): derivatives up to
/// order ell, the primitive B(t) and the auxiliary function
/// lambda(t) = exp(B(t)/2).
class CoefficientModel {
  public:
    CoefficientModel(CoeffFamily family, CoeffParams p, int ell)
        : family_(family), p_(p), ell_(ell) {
        if (ell < 1) throw std::invalid_argument("smoothness order ell must be >= 1");
        switch (family) {
            case CoeffFamily::zero:
                break;
            case CoeffFamily::scale_invariant:
                if (p.mu < 0.0 || p.mu >= 1.0)
                    throw std::invalid_argument("scale_invariant requires mu in [0,1)");
                break;
            case CoeffFamily::iterated_log:
                if (p.mu <= 0.0 || p.n < 1)
                    throw std::invalid_argument("iterated_log requires mu > 0, n >= 1");
                shift_ = detail::iterated_exp(p.n);
                break;
            case CoeffFamily::oscillating:
                break;
            case CoeffFamily::tabulated:
                throw std::invalid_argument("use the tabulated(...) factory");
        }
    }

    static CoefficientModel tabulated(std::vector<double> ts, std::vector<double> bs, int ell) {
        if (ell > 1)
            throw std::invalid_argument("tabulated models support derivatives up to order 1 only");
        if (ts.size() != bs.size() || ts.size() < 2)
            throw std::invalid_argument("tabulated model needs matching grids of size >= 2");
        for (double v : bs)
            if (v < 0.0) throw std::invalid_argument("tabulated b must be nonnegative (A1)");
        CoefficientModel m(CoeffFamily::zero, {}, std::max(ell, 1));
        m.family_ = CoeffFamily::tabulated;
        m.ell_ = std::max(ell, 1);
        m.spline_.build(std::move(ts), std::move(bs));
        return m;
    }

    CoeffFamily family() const { return family_; }
    const CoeffParams& params() const { return p_; }
    int ell() const { return ell_; }

    /// k-th derivative of b at t, 0 <= k <= ell.
    double b(double t, int k = 0) const {
        if (k < 0 || k > ell_)
            throw std::out_of_range("derivative order exceeds model smoothness ell");
        if (t < 0.0) throw std::domain_error("t must be >= 0");
        switch (family_) {
            case CoeffFamily::zero:
                return 0.0;
            case CoeffFamily::scale_invariant: {
                double f = 1.0, s = (k % 2 == 0) ? 1.0 : -1.0;
                for (int i = 2; i <= k; ++i) f *= i;
                return s * p_.mu * f * std::pow(1.0 + t, -(k + 1));
            }
            case CoeffFamily::iterated_log:
            case CoeffFamily::oscillating:
                return b_jet(t, k).derivative(k);
            case CoeffFamily::tabulated:
                if (t > spline_.x.back()) return 0.0;
                return spline_.eval(t, k);
        }
        return 0.0;
    }

    /// All derivatives 0..k at once (cheap for the symbol evaluators).
    void b_all(double t, int k, std::vector<double>& out) const {
        out.resize(static_cast<size_t>(k) + 1);
        if (family_ == CoeffFamily::iterated_log || family_ == CoeffFamily::oscillating) {
            Jet j = b_jet(t, k);
            for (int i = 0; i <= k; ++i) out[static_cast<size_t>(i)] = j.derivative(i);
        } else {
            for (int i = 0; i <= k; ++i) out[static_cast<size_t>(i)] = b(t, i);
        }
    }

    /// Primitive B(t) = int_0^t b. Closed form for built-ins.
    double primitive(double t) const {
        if (t < 0.0) throw std::domain_error("t must be >= 0");
        switch (family_) {
            case CoeffFamily::zero:
                return 0.0;
            case CoeffFamily::scale_invariant:
                return p_.mu * std::log1p(t);
            case CoeffFamily::iterated_log: {
                // B(t) = mu * log^[n+1](shift + t), zero at t = 0
                double x = shift_ + t;
                for (int j = 0; j <= p_.n; ++j) x = std::log(x);
                return p_.mu * x;
            }
            case CoeffFamily::oscillating: {
                double e = std::exp(1.0);
                auto F = [&](double s) {
                    double L = std::log(e + s);
                    if (p_.alpha == 0.0) return 0.75 * L;
                    return 0.5 * L + std::sin(p_.alpha * L) / (4.0 * p_.alpha);
                };
                return F(t) - F(0.0);
            }
            case CoeffFamily::tabulated: {
                double tmax = std::min(t, spline_.x.back());
                return integrate([&](double s) { return spline_.eval(s, 0); }, 0.0, tmax, 1e-10);
            }
        }
        return 0.0;
    }

    double lambda(double t) const { return std::exp(0.5 * primitive(t)); }
    double lambda_sq(double t) const { return std::exp(primitive(t)); }

  private:
    Jet b_jet(double t, int order) const {
        Jet x = Jet::variable(order, t);
        if (family_ == CoeffFamily::iterated_log) {
            Jet denom = x + shift_;
            Jet y = denom;
            for (int j = 1; j <= p_.n; ++j) {
                y = log(y);
                denom = denom * y;
            }
            return p_.mu / denom;
        }
        // oscillating
        double e = std::exp(1.0);
        Jet z = x + e;
        return (2.0 + cos(log(z) * p_.alpha)) / (z * 4.0);
    }

    CoeffFamily family_;
    CoeffParams p_;
    int ell_;
    double shift_ = 0.0;
    detail::CubicSpline spline_;
};

/// Construct a model from a family tag string (as used in config files).
inline CoefficientModel make_family(const std::string& tag, CoeffParams p, int ell) {
    if (tag == "zero") return CoefficientModel(CoeffFamily::zero, p, ell);
    if (tag == "scale_invariant") return CoefficientModel(CoeffFamily::scale_invariant, p, ell);
    if (tag == "iterated_log") return CoefficientModel(CoeffFamily::iterated_log, p, ell);
    if (tag == "oscillating") return CoefficientModel(CoeffFamily::oscillating, p, ell);
    if (tag == "tabulated")
        throw std::invalid_argument(
            "tabulated models are constructed from samples via CoefficientModel::tabulated");
    throw std::invalid_argument("unknown coefficient family: " + tag);
}

/// Empirical verification of (A1)-(A3) and of the integral comparison
/// int_0^t lambda^{-2} ~ t lambda^{-2}(t).
struct AssumptionReport {
    std::vector<double> c_hat_k;      // sup (1+t)^{1+k} |b^(k)(t)| per k
    double c_hat = 0.0;               // tail max of t b(t)
    std::vector<double> rho_t;        // grid for rho
    std::vector<double> rho;          // rho(t) = int_0^t lambda^{-2} / (t lambda^{-2}(t))
    bool a1 = false, a2 = false, a3 = false;
};

inline std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> g(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
        g[static_cast<size_t>(i)] =
            lo * std::pow(hi / lo, count > 1 ? double(i) / (count - 1) : 0.0);
    return g;
}

inline AssumptionReport check_assumptions(const CoefficientModel& model,
                                          const std::vector<double>& time_grid, int ell) {
    AssumptionReport rep;
    ell = std::min(ell, model.ell());
    rep.c_hat_k.assign(static_cast<size_t>(ell) + 1, 0.0);
    rep.a1 = true;
    for (double t : time_grid) {
        if (model.b(t, 0) < -1e-14) rep.a1 = false;
        for (int k = 0; k <= ell; ++k) {
            double v = std::pow(1.0 + t, 1.0 + k) * std::abs(model.b(t, k));
            rep.c_hat_k[static_cast<size_t>(k)] = std::max(rep.c_hat_k[static_cast<size_t>(k)], v);
        }
    }
    rep.a2 = std::all_of(rep.c_hat_k.begin(), rep.c_hat_k.end(),
                         [](double c) { return std::isfinite(c); });

    // limsup t b(t) on the tail grid
    for (double t : log_grid(1e2, 1e6, 200)) rep.c_hat = std::max(rep.c_hat, t * model.b(t, 0));
    rep.a3 = rep.c_hat < 1.0;

    for (double t : log_grid(10.0, *std::max_element(time_grid.begin(), time_grid.end()), 25)) {
        double num = integrate([&](double s) { return 1.0 / model.lambda_sq(s); }, 0.0, t, 1e-10);
        rep.rho_t.push_back(t);
        rep.rho.push_back(num / (t / model.lambda_sq(t)));
    }
    return rep;
}

/// rho(t) on its own, for the acceptance-level limit checks.
inline double rho_ratio(const CoefficientModel& model, double t) {
    double num = integrate([&](double s) { return 1.0 / model.lambda_sq(s); }, 0.0, t, 1e-9);
    return num / (t / model.lambda_sq(t));
}

}  // namespace wavelab
