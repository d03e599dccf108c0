#ifndef NULLPULSE_ERRORS_HPP
#define NULLPULSE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nullpulse {

/// Bad or out-of-range values in a run configuration.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error("config: " + msg) {}
};

/// Non-finite numeric input where a finite value is required.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error("input: " + msg) {}
};

/// A quadratic form whose restriction to radial arguments is not a radial function.
class reduction_error : public std::runtime_error {
public:
    explicit reduction_error(const std::string& msg) : std::runtime_error("reduction: " + msg) {}
};

/// Grid construction failures (infeasible bands, bad spacings).
class grid_error : public std::runtime_error {
public:
    explicit grid_error(const std::string& msg) : std::runtime_error("grid: " + msg) {}
};

/// Quadrature step too coarse to resolve the data shell.
class resolution_error : public std::runtime_error {
public:
    explicit resolution_error(const std::string& msg) : std::runtime_error("resolution: " + msg) {}
};

/// Cell update failures during marching (corrector divergence and similar).
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& msg) : std::runtime_error("solver: " + msg) {}
};

/// A cone or slice integral that crosses the invalidated part of a sheet.
class partial_flux_error : public std::runtime_error {
public:
    explicit partial_flux_error(const std::string& msg) : std::runtime_error("flux: " + msg) {}
};

/// Power-law fitting on unusable samples.
class fit_error : public std::runtime_error {
public:
    explicit fit_error(const std::string& msg) : std::runtime_error("fit: " + msg) {}
};

} // namespace nullpulse

#endif
