// Explicit source-free solution for short pulse data.  Matching the incoming
// and outgoing characteristics against the data at t = 1 and the regularity
// condition psi = 0 on the axis determines the profile F uniquely up to a
// constant, fixed here so that F vanishes between the pulse and the tail.

#include "nullpulse/linear_oracle.hpp"

#include <cmath>

#include "nullpulse/errors.hpp"

namespace nullpulse {

LinearOracle::LinearOracle(const ShortPulseData& data) : data_(data) {
    full_mass_ = Phi(1.0);
}

double LinearOracle::Phi(double y) const {
    // Substituting the profile coordinate s = (1 - r)/(2 delta) turns the
    // radial integral into the exact bump antiderivative.
    const double s = (1.0 - y) / (2.0 * data_.delta);
    const double b1 = data_.profile.antiderivative(1.0);
    return 2.0 * data_.delta * data_.amplitude * std::sqrt(data_.delta) *
           (b1 - data_.profile.antiderivative(s));
}

double LinearOracle::F(double x) const {
    if (x < 0.5) {
        const double rho = 1.0 - 2.0 * x;
        return rho * data_.phi0(rho) - 0.5 * Phi(rho);
    }
    return -0.5 * Phi(2.0 * x - 1.0);
}

double LinearOracle::F_deriv(double x, int k) const {
    if (k == 0) return F(x);
    if (k > 7) throw config_error("oracle profile derivatives implemented to order 7");
    if (x < 0.5) {
        const double rho = 1.0 - 2.0 * x;
        const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        return sgn * std::pow(2.0, k) *
               (rho * data_.phi0_deriv(rho, k) + (k - 0.5) * data_.phi0_deriv(rho, k - 1));
    }
    const double sig = 2.0 * x - 1.0;
    return -std::pow(2.0, k - 1) * data_.phi0_deriv(sig, k - 1);
}

double LinearOracle::phi(double u, double ub) const {
    const double r = ub - u;
    if (r == 0.0) return -F_deriv(u, 1);
    return psi(u, ub) / r;
}

double LinearOracle::lphi(double u, double ub) const {
    const double r = ub - u;
    if (r == 0.0) return -0.5 * F_deriv(u, 2);
    return lpsi(u, ub) / r - psi(u, ub) / (r * r);
}

double LinearOracle::lbphi(double u, double ub) const {
    const double r = ub - u;
    if (r == 0.0) return -0.5 * F_deriv(u, 2);
    return lbpsi(u, ub) / r + psi(u, ub) / (r * r);
}

} // namespace nullpulse
