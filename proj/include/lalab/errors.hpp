#pragma once

#include <stdexcept>
#include <string>

namespace lalab {

/// Invalid or inconsistent user-supplied configuration. CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure: pole-region parameters, singular systems,
/// non-finite inputs. CLI exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lalab
