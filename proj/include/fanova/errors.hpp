#pragma once

#include <stdexcept>
#include <string>

namespace fanova {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument values: empty candidate lists, nonpositive dimensions,
// degrees of freedom that make an approximation undefined.
struct ConfigError : Error {
    using Error::Error;
};

// Evaluation point outside the basis domain.
struct DomainError : Error {
    using Error::Error;
};

// Least-squares fit with a rank-deficient evaluation matrix.
struct SingularFitError : Error {
    using Error::Error;
};

// Structural problems in a dataset: missing cells, inconsistent
// coefficient lengths, unbalanced subject/treatment coverage.
struct DatasetError : Error {
    using Error::Error;
};

// Hypothesis not testable under the given layout (e.g. group effect
// with a single group).
struct HypothesisError : Error {
    using Error::Error;
};

// Sample-size gate violated (model would be singular by construction).
struct DimensionError : Error {
    using Error::Error;
};

// An error SSCP or covariance matrix that should be positive definite
// is not.
struct SingularMatrixError : Error {
    using Error::Error;
};

// Not enough residual degrees of freedom to estimate a covariance.
struct NotEstimableError : Error {
    using Error::Error;
};

// Malformed input file.
struct ParseError : Error {
    using Error::Error;
};

} // namespace fanova
