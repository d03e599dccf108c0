#ifndef NULLPULSE_LINEAR_ORACLE_HPP
#define NULLPULSE_LINEAR_ORACLE_HPP

#include "nullpulse/pulse_data.hpp"

namespace nullpulse {

/// Closed-form solution of the source-free radial wave equation for short
/// pulse data, in the form r phi = F(u) - F(ubar).  The outgoing profile F is
/// assembled from the bump and its exact antiderivative, so every value and
/// derivative here is analytic, independent of any marching scheme.
class LinearOracle {
public:
    explicit LinearOracle(const ShortPulseData& data);

    /// Outgoing profile.  Vanishes on [delta, 1 - delta] and is constant
    /// beyond x = 1, which is where the interior of the light cone goes quiet.
    double F(double x) const;
    /// k-th derivative of F, for k <= 7.
    double F_deriv(double x, int k) const;

    /// int_0^infty phi0, the total mass carried by the pulse.
    double total_mass() const { return full_mass_; }

    double psi(double u, double ub) const { return F(u) - F(ub); }
    double phi(double u, double ub) const;
    double lpsi(double /*u*/, double ub) const { return -F_deriv(ub, 1); }
    double lbpsi(double u, double /*ub*/) const { return F_deriv(u, 1); }
    double lphi(double u, double ub) const;
    double lbphi(double u, double ub) const;

private:
    /// int_0^y phi0.
    double Phi(double y) const;

    ShortPulseData data_;
    double full_mass_ = 0.0;
};

} // namespace nullpulse

#endif
