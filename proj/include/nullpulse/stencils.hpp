#ifndef NULLPULSE_STENCILS_HPP
#define NULLPULSE_STENCILS_HPP

namespace nullpulse {

/// Derivative at `at` of the quadratic through (x0,f0), (x1,f1), (x2,f2).
/// Covers centered and one-sided second order stencils on nonuniform nodes.
inline double quad_deriv(double x0, double f0, double x1, double f1,
                         double x2, double f2, double at) {
    return f0 * (2.0 * at - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
           f1 * (2.0 * at - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
           f2 * (2.0 * at - x0 - x1) / ((x2 - x0) * (x2 - x1));
}

} // namespace nullpulse

#endif
