// errors.hpp — Exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace trimachine {

// Precondition violated by the caller (bad index, bad dimension, zero gap ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A computed quantity failed one of its own consistency checks.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bohr frequencies could not be separated into well-defined clusters.
struct ClusteringError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The generator has no unique stationary state.
struct DegenerateSteadyStateError : std::runtime_error {
    int nullspace_dim;
    DegenerateSteadyStateError(const std::string& msg, int dim)
        : std::runtime_error(msg), nullspace_dim(dim) {}
};

// Heat currents with a sign pattern forbidden by magnetization conservation.
struct ImpossibleRegimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed configuration (unknown key, missing key, wrong type).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace trimachine
