#pragma once

#include <stdexcept>
#include <string>

namespace ordermc {

// Bad user-facing configuration: out-of-range parameter, malformed file,
// unknown config key, missing required input.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sampling could not complete: the raw-draw cap was reached before enough
// constrained hits were collected (constrained subset likely has volume
// near zero, or the constraint predicate is wrong).
struct sampling_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numeric routine failed: eigenvalue iteration did not converge, or a
// quantity was requested at a point where it is not defined (e.g. an
// H-infinity norm of an unstable realization).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A combinatorial enumeration exceeded its configured term budget.
struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ordermc
