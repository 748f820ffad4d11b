#pragma once

#include <stdexcept>

namespace abm {

/// Iterative numerical procedure failed to converge (PSOR, implied-vol search).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested grid cannot represent the problem (valuation spot outside the domain).
struct GridError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Quoted price violates the no-arbitrage band and cannot be inverted.
struct ArbitrageError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Malformed or insufficient input data (price series, CSV rows).
struct DataError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace abm
