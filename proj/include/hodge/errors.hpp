#pragma once

#include <stdexcept>
#include <string>

namespace hodge {

/// Malformed or inconsistent input (bad files, invalid complexes, bad arguments).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Geometric degeneracy: collinear/cocircular configurations that cannot be resolved,
/// affinely dependent simplex vertices.
class DegeneracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failures (eigensolver convergence, unresolvable classification).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hodge
