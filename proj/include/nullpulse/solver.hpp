#ifndef NULLPULSE_SOLVER_HPP
#define NULLPULSE_SOLVER_HPP

#include <functional>
#include <string>
#include <vector>

#include "nullpulse/grid.hpp"
#include "nullpulse/linear_oracle.hpp"
#include "nullpulse/null_forms.hpp"
#include "nullpulse/pulse_data.hpp"

namespace nullpulse {

class SolutionSheet;

/// Knobs for the characteristic march.
struct EvolutionParams {
    int corrector_max = 40;         ///< fixed-point sweeps per cell
    double corrector_tol = 1e-12;   ///< relative update tolerance
    /// |incoming derivative| that stops the march.  A cell corrector that
    /// stops contracting while the local derivative exceeds a twentieth of
    /// this value is reported as a blow-up too, so the march ends cleanly
    /// whichever symptom of gradient collapse appears first.
    double blowup_threshold = 1e3;
    int progress_every = 0;         ///< invoke `progress` every this many levels (0 = never)
    std::function<void(const SolutionSheet&, int)> progress;
};

/// Where and how the march died, if it did.
struct BlowUpReport {
    bool detected = false;
    int level = -1;
    double u = 0.0;
    double ubar = 0.0;
    double t = 0.0;
    double peak = 0.0;
    std::string quantity;  ///< "non_finite", "incoming_derivative", or "corrector_divergence"
};

/// Nodal quantities the sheet can evaluate.
enum class Quantity { Psi, Phi, LPhi, LbarPhi };

/// Ragged per-level storage of psi = r*phi for every field, plus accessors
/// that reconstruct phi and its null derivatives from the stored values.
///
/// Levels [0, valid_levels) hold computed data.  A sheet starts empty and is
/// filled by continue_march; evolve() is the one-call wrapper.
class SolutionSheet {
public:
    SolutionSheet(const DoubleNullGrid& grid, int n_fields);

    const DoubleNullGrid& grid() const { return *grid_; }
    int n_fields() const { return n_fields_; }
    int valid_levels() const { return valid_levels_; }
    const BlowUpReport& blowup() const { return blowup_; }

    /// True when every level with ubar(j) <= ub is computed.
    bool covers_ubar(double ub) const;

    double psi(int field, int i, int j) const {
        return psi_[field][grid_->node_index(i, j)];
    }

    /// phi = psi / r; on the axis the limit is taken with a one-sided
    /// u-derivative of psi along the row.
    double phi(int field, int i, int j) const;

    /// Outgoing derivative (d/dt + d/dr)phi, differenced along the u = const
    /// column through second order stencils on phi itself.
    double lphi(int field, int i, int j) const;

    /// Incoming derivative (d/dt - d/dr)phi, differenced along the level row.
    double lbphi(int field, int i, int j) const;

    double value(Quantity q, int field, int i, int j) const;

    /// Bilinear interpolation at an off-node point.  Exact on nodes and on
    /// grid lines; near the data surface rim where a corner of the enclosing
    /// cell is missing the weights renormalize over the available corners,
    /// which degrades to first order there.
    double interp(Quantity q, int field, double u, double ub) const;

private:
    friend void continue_march(SolutionSheet&, const ShortPulseData&,
                               const SystemCoupling&, const EvolutionParams&);
    friend SolutionSheet load_checkpoint(const DoubleNullGrid&, const std::string&,
                                         const std::string&);

    const DoubleNullGrid* grid_;
    int n_fields_;
    std::vector<std::vector<double>> psi_;  ///< [field][node_index]
    int valid_levels_ = 0;
    BlowUpReport blowup_;
};

/// March from level valid_levels up to the top of the grid, or until blow-up.
void continue_march(SolutionSheet& sheet, const ShortPulseData& data,
                    const SystemCoupling& coupling, const EvolutionParams& params);

/// Fresh march over the whole grid.
SolutionSheet evolve(const ShortPulseData& data, const SystemCoupling& coupling,
                     const DoubleNullGrid& grid, const EvolutionParams& params = {});

/// Persist the computed levels of a sheet: raw psi values plus a manifest
/// that pins the grid hash and a caller-chosen config fingerprint.
void write_checkpoint(const SolutionSheet& sheet, const std::string& dir,
                      const std::string& config_fingerprint);

/// Restore a sheet previously written against the same grid and fingerprint.
SolutionSheet load_checkpoint(const DoubleNullGrid& grid, const std::string& dir,
                              const std::string& config_fingerprint);

/// Grid-refinement study results.  In oracle mode `errors[k]` is the distance
/// of run k from the closed-form solution; in self mode it is the distance
/// between runs k and k+1, so there is one fewer entry than runs.
struct ConvergenceReport {
    std::string mode;              ///< "oracle" or "self"
    std::vector<double> spacings;  ///< fine spacing of each grid, descending
    std::vector<double> errors;
    std::vector<double> orders;    ///< log2 ratios of consecutive errors
    bool exact = false;            ///< all errors at roundoff of the data scale
};

/// Run the same problem on `n_grids` grids (the given one plus bisections),
/// compare on shared nodes, and report observed orders.  The sup over psi is
/// taken on all nodes; the sup over the null derivatives of phi only on nodes
/// with r >= 0.1, since the 1/r reconstruction near the axis loses an order
/// in a shrinking collar and would mask the interior rate.
ConvergenceReport convergence_study(const ShortPulseData& data,
                                    const SystemCoupling& coupling,
                                    const DoubleNullGrid& base_grid, int n_grids,
                                    const EvolutionParams& params = {},
                                    const LinearOracle* oracle = nullptr);

} // namespace nullpulse

#endif
