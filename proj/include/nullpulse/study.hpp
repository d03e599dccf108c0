#ifndef NULLPULSE_STUDY_HPP
#define NULLPULSE_STUDY_HPP

#include <string>
#include <utility>
#include <vector>

#include "nullpulse/run_config.hpp"

namespace nullpulse {

/// Least-squares slope of log v against log x for short parameter scans.
/// Throws fit_error on fewer than 2 usable points or non-positive values.
double power_law_slope(const std::vector<std::pair<double, double>>& series);

/// Copy of a configuration re-targeted at another pulse width: data rebuilt,
/// h_fine scaled to delta / h_over_delta, preset couplings re-instantiated.
RunConfig with_delta(const RunConfig& base, double delta);

/// Copy with another amplitude and a different preset coupling, used by the
/// null versus non-null comparison.
RunConfig with_amplitude_preset(const RunConfig& base, double amplitude,
                                const std::string& preset);

/// Headline numbers of one evolution, aggregated by the scan drivers.
struct RunSummary {
    double delta = 0.0;
    double amplitude = 0.0;
    bool blew_up = false;
    double t_star = 0.0;       ///< blow-up time, or the top computed level
    double top_ubar = 0.0;
    double region3_sup = 0.0;
    double e_initial[3] = {0.0, 0.0, 0.0};
    double initial_energy = 0.0;
    double lphi_exponent = 0.0;
    double lbphi_exponent = 0.0;
    double plateau_lphi_t2 = 0.0;
    double plateau_lbphi_t1 = 0.0;
    double cdelta_lbar_sup = 0.0;
    double order2_norm = 0.0;
    double ks_worst = 0.0;
    double identity_worst = 0.0;
    /// Residual per multiplier: time translation, incoming, weighted outgoing.
    double identity_residual[3] = {0.0, 0.0, 0.0};
    double flux_tail_final = 0.0;  ///< fraction of the data energy left
};

/// Evolves one configuration and writes the complete diagnostics set into
/// out_dir: manifest.json, supnorm.csv, decay_fits.csv, flux_incoming.csv,
/// cdelta_certificate.csv, weighted_norms.csv, energy_identity.csv,
/// pointwise_bound.csv, region3.csv, and blowup.csv when a singularity was
/// detected.  Checkpoints land under out_dir/checkpoint and are resumed from
/// when present and matching.
RunSummary run_one(const RunConfig& c, const std::string& out_dir);

/// Drivers behind the CLI subcommands.  Each returns a process exit code:
/// zero for a completed command, the number of failed verdicts for the scans
/// that emit verdict tables.
int cmd_run(const RunConfig& c, const std::string& out_dir);
int cmd_study(const RunConfig& c, const std::string& out_dir);
int cmd_convergence(const RunConfig& c, const std::string& out_dir);
int cmd_compare(const RunConfig& c, const std::string& out_dir);

} // namespace nullpulse

#endif
