#ifndef NULLPULSE_RUN_CONFIG_HPP
#define NULLPULSE_RUN_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nullpulse/null_forms.hpp"
#include "nullpulse/pulse_data.hpp"

namespace nullpulse {

/// Parameter scan driven by the study command: one full run per pulse width,
/// all on grids with h_fine = delta / h_over_delta.
struct StudyPlan {
    std::vector<double> deltas{0.1, 0.05, 0.025};
    int h_over_delta = 32;
};

/// Grid-refinement ladder for the convergence command.
struct ConvergencePlan {
    int levels = 3;
};

/// Amplitude ladder for the null versus non-null comparison command.
struct ComparePlan {
    std::vector<double> amplitudes{1.0, 2.0, 4.0};
};

/// Everything one evolution plus its diagnostics needs, parsed from a JSON
/// file and validated up front so failures happen before any computation.
struct RunConfig {
    ShortPulseData data;

    double ubar_max = 40.0;
    double h_fine = 0.0015625;
    double h_coarse = 0.02;
    double u_cap = -1.0;  ///< non-positive means the grid default

    SystemCoupling coupling;
    std::string coupling_preset;  ///< "q0", "dt_squared", "zero", or "custom"
    double coupling_scale = 1.0;

    double alpha = 0.9;
    int max_order = 2;

    double decay_t_lo = 5.0;
    double decay_t_hi = 40.0;
    double identity_ubar = 8.0;

    int checkpoint_every = 0;

    StudyPlan study;
    ConvergencePlan convergence;
    ComparePlan compare;
};

/// Instantiates one of the named couplings: "q0" scales the metric form,
/// "dt_squared" the pure time-derivative square, "zero" has no source.  The
/// same form feeds every component diagonally.
SystemCoupling make_preset_coupling(const std::string& preset, double scale,
                                    int n_fields);

/// Parses and validates a configuration from JSON text.  Unknown keys and
/// out-of-range values throw config_error naming the key.
RunConfig parse_run_config(const std::string& json_text);

/// Reads the file and delegates to parse_run_config.
RunConfig load_run_config(const std::string& path);

/// Deterministic serialization with sorted keys and shortest round-trip
/// number formatting.  parse(canonical(c)) reproduces canonical(c) byte for
/// byte, and the checkpoint fingerprint is derived from these bytes.
std::string canonical_json(const RunConfig& c);

/// FNV-1a hash of the canonical serialization, as 16 hex digits.
std::string config_fingerprint(const RunConfig& c);

} // namespace nullpulse

#endif
