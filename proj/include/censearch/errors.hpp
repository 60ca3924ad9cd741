#pragma once

#include <stdexcept>
#include <string>

namespace censearch {

/// Base class for all censearch errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// m < 1, n < m, or a removal vector of the wrong length.
struct BadDimensions : Error {
    using Error::Error;
};

/// Removal vector does not sum to n - m.
struct SumMismatch : Error {
    using Error::Error;
};

/// A removal count is negative.
struct NegativeRemoval : Error {
    using Error::Error;
};

/// Fisher information matrix is numerically singular; indicates a
/// precision failure, not a property of any valid scheme.
struct SingularInformation : Error {
    using Error::Error;
};

/// A value outside the support of the requested distribution.
struct UnsupportedValue : Error {
    using Error::Error;
};

/// The current chain state has zero proposal density; a chain-state bug.
struct InvalidDensity : Error {
    using Error::Error;
};

/// An argument that must be strictly positive was not.
struct NonPositive : Error {
    using Error::Error;
};

/// Exhaustive enumeration would exceed the configured evaluation budget.
struct BudgetExceeded : Error {
    using Error::Error;
};

/// Too many replications failed to produce a maximum-likelihood fit for
/// the aggregate to be trustworthy.
struct NoConvergence : Error {
    using Error::Error;
};

}  // namespace censearch
