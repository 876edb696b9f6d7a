#pragma once

#include <cmath>
#include <stdexcept>

namespace wavelab {

/// Zone geometry of the extended phase space (t, xi). The boundary curve
/// (1 + t_xi)|xi| = N separates the dissipative zone (t <= t_xi) from the
/// hyperbolic zone (t >= t_xi); the boundary itself belongs to the
/// hyperbolic zone.
struct ZoneGeometry {
    double N = 2.0;      // zone constant
    int k = 1;           // diagonalization depth it was chosen for
    double margin = 0.0; // achieved sup ||N_k - I|| at selection time

    double t_xi(double xi_abs) const {
        if (xi_abs <= 0.0) throw std::domain_error("t_xi requires |xi| > 0");
        return std::max(N / xi_abs - 1.0, 0.0);
    }

    bool in_hyperbolic(double t, double xi_abs) const { return t >= t_xi(xi_abs); }
    bool in_dissipative(double t, double xi_abs) const { return t < t_xi(xi_abs); }

    /// Micro-energy weight h(t,xi): N/(1+t) in Z_diss, |xi| in Z_hyp.
    double h(double t, double xi_abs) const {
        return in_hyperbolic(t, xi_abs) ? xi_abs : N / (1.0 + t);
    }
};

}  // namespace wavelab
