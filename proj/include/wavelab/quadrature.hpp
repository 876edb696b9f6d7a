#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace wavelab {

/// Adaptive Gauss-Kronrod on [a,b]. Splits at the requested absolute
/// tolerance; long intervals are handled by a log substitution so tails
/// like lambda^{-2} over [0, 1e20] stay cheap.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    if (b <= a) return 0.0;
    if (b - a <= 1e4) {
        double err = 0.0;
        double v = GK::integrate(f, a, b, 15, abs_tol, &err);
        return v;
    }
    // split [a, a+1] + log-substituted remainder
    double head = integrate(f, a, a + 1.0, abs_tol * 0.5);
    auto g = [&](double u) {
        double t = a + std::exp(u);
        return f(t) * std::exp(u);
    };
    double err = 0.0;
    double tail = GK::integrate(g, 0.0, std::log(b - a), 15, abs_tol * 0.5, &err);
    return head + tail;
}

/// Cumulative composite Simpson on a uniform grid of values v[0..m].
/// out[i] approximates the integral from x0 to x0 + i*h.
/// Values may be matrices or complex numbers; only +,* double needed.
template <class V>
void cumulative_simpson(const std::vector<V>& v, double h, std::vector<V>& out) {
    size_t m = v.size();
    out.resize(m);
    if (m == 0) return;
    out[0] = v[0] * 0.0;
    if (m == 1) return;
    for (size_t i = 2; i < m; i += 2)
        out[i] = out[i - 2] + (v[i - 2] + v[i - 1] * 4.0 + v[i]) * (h / 3.0);
    // odd endpoints: one extra cell via the 3-point closed rule
    for (size_t i = 1; i < m; i += 2) {
        if (i >= 3)
            out[i] = out[i - 1] + (v[i - 2] * -1.0 + v[i - 1] * 8.0 + v[i] * 5.0) * (h / 12.0);
        else if (m > 2)
            out[i] = (v[0] * 5.0 + v[1] * 8.0 + v[2] * -1.0) * (h / 12.0);
        else
            out[i] = (v[0] + v[1]) * (h / 2.0);
    }
}

}  // namespace wavelab
