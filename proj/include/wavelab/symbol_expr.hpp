#pragma once

#include <complex>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavelab/coefficient.hpp"
#include "wavelab/mat2.hpp"

namespace wavelab {

/// Formal Laurent polynomial with complex coefficients in the generators
///   g_m = b^(m)(t)   (m-th time derivative of the coefficient)
///   u   = |xi|^{-1}  (integer powers of either sign)
/// closed under +, *, the derivation D_t = -i d/dt (acting as g_m -> g_{m+1})
/// and the radial derivative D_xi = -i d/d|xi| (acting as u^p -> -p u^{p+1}).
class SymbolExpr {
  public:
    struct Mono {
        std::vector<int> gpow;  // gpow[m] = exponent of g_m (trailing zeros trimmed)
        int upow = 0;

        bool operator<(const Mono& o) const {
            if (upow != o.upow) return upow < o.upow;
            return gpow < o.gpow;
        }
    };

    SymbolExpr() = default;

    static SymbolExpr constant(cplx c) {
        SymbolExpr e;
        if (c != 0.0) e.terms_[Mono{}] = c;
        return e;
    }
    static SymbolExpr b_deriv(int m) {
        SymbolExpr e;
        Mono mo;
        mo.gpow.assign(static_cast<size_t>(m) + 1, 0);
        mo.gpow[static_cast<size_t>(m)] = 1;
        e.terms_[mo] = 1.0;
        return e;
    }
    /// u^p = |xi|^{-p}
    static SymbolExpr u_pow(int p) {
        SymbolExpr e;
        Mono mo;
        mo.upow = p;
        e.terms_[mo] = 1.0;
        return e;
    }

    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }

    /// highest b-derivative order appearing
    int max_deriv_order() const {
        int m = -1;
        for (const auto& [mo, c] : terms_)
            m = std::max(m, static_cast<int>(mo.gpow.size()) - 1);
        return m;
    }

    SymbolExpr operator+(const SymbolExpr& o) const {
        SymbolExpr r = *this;
        for (const auto& [mo, c] : o.terms_) r.add_term(mo, c);
        return r;
    }
    SymbolExpr operator-(const SymbolExpr& o) const {
        SymbolExpr r = *this;
        for (const auto& [mo, c] : o.terms_) r.add_term(mo, -c);
        return r;
    }
    SymbolExpr operator*(const SymbolExpr& o) const {
        SymbolExpr r;
        for (const auto& [m1, c1] : terms_)
            for (const auto& [m2, c2] : o.terms_) r.add_term(mul_mono(m1, m2), c1 * c2);
        return r;
    }
    SymbolExpr operator*(cplx s) const {
        SymbolExpr r;
        if (s == 0.0) return r;
        for (const auto& [mo, c] : terms_) r.terms_[mo] = c * s;
        return r;
    }
    SymbolExpr operator-() const { return *this * cplx(-1.0); }

    /// multiply by |xi|^p (shifts u exponents by -p)
    SymbolExpr mul_xi_pow(int p) const {
        SymbolExpr r;
        for (const auto& [mo, c] : terms_) {
            Mono m = mo;
            m.upow -= p;
            r.terms_[m] = c;
        }
        return r;
    }

    /// D_t = -i d/dt
    SymbolExpr Dt() const {
        SymbolExpr r;
        for (const auto& [mo, c] : terms_) {
            for (size_t m = 0; m < mo.gpow.size(); ++m) {
                if (mo.gpow[m] == 0) continue;
                Mono d = mo;
                d.gpow[m] -= 1;
                if (d.gpow.size() <= m + 1) d.gpow.resize(m + 2, 0);
                d.gpow[m + 1] += 1;
                trim(d);
                r.add_term(d, cplx(0.0, -1.0) * c * double(mo.gpow[m]));
            }
        }
        return r;
    }

    /// D_xi = -i d/d|xi| (radial)
    SymbolExpr Dxi() const {
        SymbolExpr r;
        for (const auto& [mo, c] : terms_) {
            if (mo.upow == 0) continue;
            Mono d = mo;
            d.upow += 1;
            r.add_term(d, cplx(0.0, -1.0) * c * double(-mo.upow));
        }
        return r;
    }

    cplx eval(const std::vector<double>& b_derivs, double xi_abs) const {
        double u = 1.0 / xi_abs;
        cplx s = 0.0;
        for (const auto& [mo, c] : terms_) {
            double p = std::pow(u, mo.upow);
            for (size_t m = 0; m < mo.gpow.size(); ++m)
                for (int j = 0; j < mo.gpow[m]; ++j) p *= b_derivs.at(m);
            s += c * p;
        }
        return s;
    }

    cplx eval(const CoefficientModel& model, double t, double xi_abs) const {
        std::vector<double> bd;
        model.b_all(t, std::max(max_deriv_order(), 0), bd);
        return eval(bd, xi_abs);
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [mo, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << "(" << c.real() << (c.imag() >= 0 ? "+" : "") << c.imag() << "i)";
            for (size_t m = 0; m < mo.gpow.size(); ++m)
                if (mo.gpow[m] > 0) {
                    os << "*b";
                    for (size_t q = 0; q < m; ++q) os << "'";
                    if (mo.gpow[m] > 1) os << "^" << mo.gpow[m];
                }
            if (mo.upow != 0) os << "*|xi|^" << -mo.upow;
        }
        return os.str();
    }

    /// absolute floor: drop coefficients below eps (exact-cancellation cleanup)
    SymbolExpr pruned(double eps = 0.0) const {
        SymbolExpr r;
        for (const auto& [mo, c] : terms_)
            if (std::abs(c) > eps) r.terms_[mo] = c;
        return r;
    }

  private:
    static void trim(Mono& m) {
        while (!m.gpow.empty() && m.gpow.back() == 0) m.gpow.pop_back();
    }
    static Mono mul_mono(const Mono& a, const Mono& b) {
        Mono r;
        r.upow = a.upow + b.upow;
        r.gpow.resize(std::max(a.gpow.size(), b.gpow.size()), 0);
        for (size_t i = 0; i < a.gpow.size(); ++i) r.gpow[i] += a.gpow[i];
        for (size_t i = 0; i < b.gpow.size(); ++i) r.gpow[i] += b.gpow[i];
        trim(r);
        return r;
    }
    void add_term(const Mono& mo, cplx c) {
        auto it = terms_.find(mo);
        if (it == terms_.end()) {
            if (c != 0.0) terms_[mo] = c;
            return;
        }
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }

    std::map<Mono, cplx> terms_;
};

/// 2x2 matrix of symbolic expressions.
struct SymMat2 {
    SymbolExpr e11, e12, e21, e22;

    static SymMat2 zero() { return {}; }
    static SymMat2 identity() {
        return {SymbolExpr::constant(1.0), {}, {}, SymbolExpr::constant(1.0)};
    }

    SymMat2 operator+(const SymMat2& o) const {
        return {e11 + o.e11, e12 + o.e12, e21 + o.e21, e22 + o.e22};
    }
    SymMat2 operator-(const SymMat2& o) const {
        return {e11 - o.e11, e12 - o.e12, e21 - o.e21, e22 - o.e22};
    }
    SymMat2 operator*(const SymMat2& o) const {
        return {e11 * o.e11 + e12 * o.e21, e11 * o.e12 + e12 * o.e22,
                e21 * o.e11 + e22 * o.e21, e21 * o.e12 + e22 * o.e22};
    }
    SymMat2 operator*(cplx s) const { return {e11 * s, e12 * s, e21 * s, e22 * s}; }

    SymMat2 Dt() const { return {e11.Dt(), e12.Dt(), e21.Dt(), e22.Dt()}; }
    SymMat2 diag_part() const { return {e11, {}, {}, e22}; }
    SymMat2 transpose() const { return {e11, e21, e12, e22}; }

    int max_deriv_order() const {
        return std::max(std::max(e11.max_deriv_order(), e12.max_deriv_order()),
                        std::max(e21.max_deriv_order(), e22.max_deriv_order()));
    }

    Mat2 eval(const std::vector<double>& b_derivs, double xi_abs) const {
        return {e11.eval(b_derivs, xi_abs), e12.eval(b_derivs, xi_abs),
                e21.eval(b_derivs, xi_abs), e22.eval(b_derivs, xi_abs)};
    }
    Mat2 eval(const CoefficientModel& model, double t, double xi_abs) const {
        std::vector<double> bd;
        model.b_all(t, std::max(max_deriv_order(), 0), bd);
        return eval(bd, xi_abs);
    }
};

}  // namespace wavelab
