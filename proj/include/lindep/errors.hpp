#pragma once

#include <stdexcept>
#include <string>

namespace lindep {

// Base class for all errors thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: points off the curve, torsion generators, malformed
// rationals, inconsistent job documents. CLI exit code 2.
struct InvalidInputError : Error {
    using Error::Error;
};

// A configured computation budget ran out (e.g. Pollard rho attempts).
// CLI exit code 3.
struct BudgetError : Error {
    using Error::Error;
};

// An internal invariant failed. Indicates a bug, never a user mistake.
struct InternalError : Error {
    using Error::Error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw InternalError("internal invariant violated: " + what);
}

} // namespace lindep
