#pragma once

#include <stdexcept>
#include <string>

namespace burstpdmp {

// Error taxonomy mirrored by the CLI exit codes:
//   config_error -> 2, numeric_error -> 3, check_failure -> 4.

// Invalid or inconsistent user input (config fields, parameter ranges,
// unsupported closures).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical procedure failed to meet its contract (quadrature did not
// converge, ODE step underflow, proposal cap hit, mass drift).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A self-check or verification assertion failed.
struct check_failure : std::runtime_error {
    explicit check_failure(const std::string& msg) : std::runtime_error(msg) {}
};

// Moment equations close only for constant burst rates; state-dependent
// rates must go through the Monte Carlo estimators.
struct unsupported_closure_error : config_error {
    explicit unsupported_closure_error(const std::string& msg) : config_error(msg) {}
};

}  // namespace burstpdmp
