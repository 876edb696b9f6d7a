#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace wavelab {

/// Truncated Taylor series (jet) arithmetic. c[i] holds f^(i)(t0)/i!.
/// Used to evaluate closed-form coefficient families together with all
/// their time derivatives up to a requested order, exactly to rounding.
class Jet {
  public:
    Jet(int order, double value = 0.0) : c_(static_cast<size_t>(order) + 1, 0.0) {
        c_[0] = value;
    }

    static Jet variable(int order, double t) {
        Jet j(order, t);
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double coeff(int i) const { return c_[static_cast<size_t>(i)]; }
    double value() const { return c_[0]; }

    /// k-th derivative (not divided by k!).
    double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c_[static_cast<size_t>(k)] * f;
    }

    Jet operator+(const Jet& o) const {
        Jet r = *this;
        for (size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
        return r;
    }
    Jet operator-(const Jet& o) const {
        Jet r = *this;
        for (size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
        return r;
    }
    Jet operator+(double s) const {
        Jet r = *this;
        r.c_[0] += s;
        return r;
    }
    Jet operator-(double s) const { return *this + (-s); }
    Jet operator*(double s) const {
        Jet r = *this;
        for (auto& x : r.c_) x *= s;
        return r;
    }
    Jet operator*(const Jet& o) const {
        Jet r(order());
        for (size_t i = 0; i < c_.size(); ++i)
            for (size_t j = 0; i + j < c_.size(); ++j) r.c_[i + j] += c_[i] * o.c_[j];
        return r;
    }
    Jet operator/(const Jet& o) const {
        if (o.c_[0] == 0.0) throw std::domain_error("Jet division by zero constant term");
        Jet q(order());
        for (size_t k = 0; k < c_.size(); ++k) {
            double s = c_[k];
            for (size_t j = 1; j <= k; ++j) s -= o.c_[j] * q.c_[k - j];
            q.c_[k] = s / o.c_[0];
        }
        return q;
    }

    friend Jet operator*(double s, const Jet& j) { return j * s; }
    friend Jet operator/(double s, const Jet& j) { return Jet(j.order(), s) / j; }
    friend Jet operator+(double s, const Jet& j) { return j + s; }
    friend Jet operator-(double s, const Jet& j) { return (j * -1.0) + s; }

    friend Jet log(const Jet& f) {
        if (f.c_[0] <= 0.0) throw std::domain_error("Jet log of non-positive value");
        Jet g(f.order(), std::log(f.c_[0]));
        // g' = f'/f  =>  k g_k = (k f_k - sum_{j=1}^{k-1} j g_j f_{k-j}) / f_0
        for (int k = 1; k <= f.order(); ++k) {
            double s = k * f.c_[static_cast<size_t>(k)];
            for (int j = 1; j < k; ++j) s -= j * g.c_[static_cast<size_t>(j)] * f.c_[static_cast<size_t>(k - j)];
            g.c_[static_cast<size_t>(k)] = s / (k * f.c_[0]);
        }
        return g;
    }

    friend Jet exp(const Jet& f) {
        Jet g(f.order(), std::exp(f.c_[0]));
        // g' = f' g
        for (int k = 1; k <= f.order(); ++k) {
            double s = 0.0;
            for (int j = 1; j <= k; ++j) s += j * f.c_[static_cast<size_t>(j)] * g.c_[static_cast<size_t>(k - j)];
            g.c_[static_cast<size_t>(k)] = s / k;
        }
        return g;
    }

    friend void sincos(const Jet& f, Jet& s, Jet& c) {
        s = Jet(f.order(), std::sin(f.c_[0]));
        c = Jet(f.order(), std::cos(f.c_[0]));
        for (int k = 1; k <= f.order(); ++k) {
            double as = 0.0, ac = 0.0;
            for (int j = 1; j <= k; ++j) {
                as += j * f.c_[static_cast<size_t>(j)] * c.c_[static_cast<size_t>(k - j)];
                ac -= j * f.c_[static_cast<size_t>(j)] * s.c_[static_cast<size_t>(k - j)];
            }
            s.c_[static_cast<size_t>(k)] = as / k;
            c.c_[static_cast<size_t>(k)] = ac / k;
        }
    }

    friend Jet sin(const Jet& f) {
        Jet s(f.order()), c(f.order());
        sincos(f, s, c);
        return s;
    }
    friend Jet cos(const Jet& f) {
        Jet s(f.order()), c(f.order());
        sincos(f, s, c);
        return c;
    }

    friend Jet pow(const Jet& f, double a) { return exp(log(f) * a); }

  private:
    std::vector<double> c_;
};

}  // namespace wavelab
