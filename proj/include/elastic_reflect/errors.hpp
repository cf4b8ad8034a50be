#pragma once

#include <stdexcept>
#include <string>

namespace elastic_reflect {

// Three error categories, mirrored by the CLI exit codes:
// validation -> 1, numeric -> 2, io -> 3.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// model
struct NonPositiveVolatility : ValidationError {
    using ValidationError::ValidationError;
};
struct EmptyDomain : ValidationError {
    using ValidationError::ValidationError;
};
struct OutOfDomain : ValidationError {
    using ValidationError::ValidationError;
};
struct NegativeLocalTime : ValidationError {
    using ValidationError::ValidationError;
};

// phi_solver
struct AnchorDivergence : NumericError {
    using NumericError::NumericError;
};
struct NonPositive : NumericError {
    using NumericError::NumericError;
};
struct DescendingHit : ValidationError {
    using ValidationError::ValidationError;
};

// laplace
struct QuadratureFailure : NumericError {
    using NumericError::NumericError;
};
struct BoundaryOrder : NumericError {
    using NumericError::NumericError;
};

// simulator
struct ExcessiveJumps : NumericError {
    using NumericError::NumericError;
};
struct MethodUnavailable : ValidationError {
    using ValidationError::ValidationError;
};

// estimator
struct EmptySamples : ValidationError {
    using ValidationError::ValidationError;
};

}  // namespace elastic_reflect
