#ifndef NULLPULSE_DIAGNOSTICS_HPP
#define NULLPULSE_DIAGNOSTICS_HPP

#include <string>
#include <utility>
#include <vector>

#include "nullpulse/grid.hpp"
#include "nullpulse/null_forms.hpp"
#include "nullpulse/pulse_data.hpp"
#include "nullpulse/solver.hpp"
#include "nullpulse/vectorfields.hpp"

namespace nullpulse {

/// Least-squares power law v = amplitude * t^exponent fitted in log-log
/// coordinates over a window of a (t, v) series.
struct DecayFit {
    double exponent = 0.0;
    double amplitude = 0.0;
    double rms = 0.0;  ///< residual rms in log space, reported never hidden
    int n = 0;
    double t_lo = 0.0, t_hi = 0.0;
};

/// Throws fit_error when the window holds fewer than 8 samples or any
/// non-positive value.
DecayFit fit_decay(const std::vector<std::pair<double, double>>& series,
                   double t_lo, double t_hi);

enum class FluxKind { Outgoing, Incoming, WeightedOutgoing };

/// Quadrature of the squared null derivative over a slice; the slice weights
/// already carry the 4 pi r^2 area density.  WeightedOutgoing inserts
/// |ubar|^alpha into the integrand.  Throws partial_flux_error when the slice
/// reaches above the computed levels (a run stopped by blow-up).
double cone_flux(const SolutionSheet& sheet, int field, const ConeSlice& slice,
                 FluxKind kind, double alpha = 0.0);

struct SupSample {
    double value = 0.0;
    double u = 0.0, ubar = 0.0;
};

/// Largest |quantity| over the slice points, with its location.
SupSample sup_on_slice(const SolutionSheet& sheet, int field,
                       const ConeSlice& slice, Quantity q);

/// (t, sup over the time slice restricted to u in [u_lo, u_hi]) series.
std::vector<std::pair<double, double>> sup_series(const SolutionSheet& sheet,
                                                  int field, Quantity q,
                                                  const std::vector<double>& ts,
                                                  double u_lo = -1e300,
                                                  double u_hi = 1e300);

/// Weighted commuted energy of exact order k on the outgoing cone u = const,
/// from the data surface up to ubar_hi:
///   sum over words w of length k of
///     delta^(l(w) - 1/2) * || |ubar|^(alpha/2) L(w phi) ||_{L2},
/// where l(w) counts the translations in w.  Every arrangement of the letters
/// enters as its own summand.  Angular terms vanish identically here and
/// contribute nothing.
double outgoing_cone_norm(const SolutionSheet& sheet, int field, int order,
                          double u, double ubar_hi, double alpha, double delta);

/// Incoming counterpart on ubar = const, u from the quiet margin up to u_hi:
///   sum over words of length k of delta^l(w) * || Lbar(w phi) ||_{L2}.
double incoming_cone_norm(const SolutionSheet& sheet, int field, int order,
                          double ubar, double u_hi, double delta);

/// Sums of the above over orders 0..max_order.
double outgoing_cone_norm_total(const SolutionSheet& sheet, int field,
                                int max_order, double u, double ubar_hi,
                                double alpha, double delta);
double incoming_cone_norm_total(const SolutionSheet& sheet, int field,
                                int max_order, double ubar, double u_hi,
                                double delta);

/// One row of the inner-cone smallness certificate: the sup over the cone
/// u = delta of a weighted commuted derivative, |ubar|^{3/2} |L(w phi)| for
/// outgoing rows and |ubar| |Lbar(w phi)| for incoming rows, with the
/// location of the sup.
struct CertificateRow {
    std::string word;
    std::string deriv;  ///< "L" or "Lbar"
    double weight_power = 0.0;
    double sup = 0.0;
    double at_ubar = 0.0;
};

/// All 26 rows: 13 words of length <= 2 times the two null derivatives.
std::vector<CertificateRow> cdelta_certificate(const SolutionSheet& sheet,
                                               int field, double delta,
                                               double ubar_hi);

/// Multiplier fields for the energy identity, written as coefficient pairs
/// (x_L, x_Lbar) on the null decomposition X = x_L L + x_Lbar Lbar:
/// time translation (1/2, 1/2), the incoming derivative (0, 1), and the
/// ubar^alpha-weighted outgoing derivative (ubar^alpha, 0).
enum class Multiplier { TimeTranslation, Incoming, WeightedOutgoing };

std::string to_string(Multiplier m);

/// Both sides of the multiplier energy identity on the null rectangle
/// u in [u_a, u_b], data surface <= ubar <= ubar_b:
///   lhs  = flux through the late cone u = u_b plus flux through the top
///          incoming cone ubar = ubar_b,
///   rhs  = flux through the early cone u = u_a, plus the data surface
///          contribution (analytic, from the closed-form data), minus the
///          bulk integral of (K + Q * X phi) 8 pi r^2 du dubar.
/// The bulk uses the same cell-centered derivative formulas as the marching
/// scheme, so the residual contracts at the scheme's order under refinement.
struct IdentityBalance {
    double lhs = 0.0, rhs = 0.0;
    double residual = 0.0;  ///< |lhs - rhs| / max(|lhs|, |rhs|, tiny)
    double flux_out_late = 0.0;
    double flux_in_top = 0.0;
    double flux_out_early = 0.0;
    double surface = 0.0;
    double bulk = 0.0;
};

IdentityBalance energy_identity_residual(const SolutionSheet& sheet,
                                         const ShortPulseData& data,
                                         const SystemCoupling& coupling,
                                         int field, Multiplier mult, double alpha,
                                         double u_a, double u_b, double ubar_b);

/// Klainerman-Sobolev style pointwise bound on the region u >= delta of a
/// time slice: at each sample x the computed |phi(x)| is compared against
///   (1+u)^{-1/2} |phi(B)| + (1+ubar)^{-1} (1+u)^{-1/2} * S,
/// where B is the point of the slice on the cone u = delta and S sums the
/// L2(slice) norms of w phi over all words of length <= 3.  The reported
/// ratio must stay below an order-one constant for the bound to hold.
struct PointwiseBoundReport {
    double t = 0.0;
    double worst_ratio = 0.0;
    double u = 0.0, ubar = 0.0;  ///< location of the worst ratio
    double boundary_value = 0.0; ///< |phi| at B
    double word_norm_sum = 0.0;  ///< S
    int n_points = 0;
};

/// One report per requested time.  Word arrays are built once and reused for
/// every slice, so memory stays at a few node arrays.
std::vector<PointwiseBoundReport> klainerman_sobolev_check(
    const SolutionSheet& sheet, int field, const std::vector<double>& ts,
    double delta);

/// Classical energy of the data slice, integral of phi0'^2 over 4 pi r^2 dr.
double initial_cone_energy(const ShortPulseData& data);

/// Energy not yet radiated through the incoming cone at each sampled level:
///   R(ubar) = E(data) - half the incoming flux through that cone.
struct FluxTailPoint {
    double ubar = 0.0;
    double remaining = 0.0;
};

std::vector<FluxTailPoint> flux_tail(const SolutionSheet& sheet, int field,
                                     const ShortPulseData& data, int stride);

/// Conservation accounting for the pulse strip: classical energy on the time
/// slice restricted to u <= delta, plus what has escaped through the inner
/// cone u = delta by that time, against the data energy.
struct StripBalance {
    double slice_energy = 0.0;
    double escaped_flux = 0.0;
    double initial_energy = 0.0;
    double residual = 0.0;
};

StripBalance strip_energy_balance(const SolutionSheet& sheet, int field,
                                  const ShortPulseData& data, double t);

/// Largest |psi| over nodes ahead of the pulse (u < 0), which the evolution
/// must keep at exactly zero.
double vacuum_region_sup(const SolutionSheet& sheet);

/// Pointwise check of the reduced coordinate identities
///   (t^2 - r^2) d_t f = t S f - r B f,
///   (t^2 - r^2) d_r f = t B f - r S f
/// on analytic test functions with closed-form derivatives, sampled away from
/// the light cone t = r.  Returns the largest absolute error.
double analytic_field_identity_error();

} // namespace nullpulse

#endif
