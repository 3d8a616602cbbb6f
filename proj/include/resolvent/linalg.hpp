#pragma once

#include "resolvent/types.hpp"

namespace resolvent::linalg {

/// Rotates each column so that its first component above `threshold` is real-positive.
void canonicalize_phases(ComplexMatrix& columns, double threshold = 1e-12);

/// max |A - A^dagger|.
double hermiticity_residual(const ComplexMatrix& a);

/// |<a|b>|^2 / (|a|^2 |b|^2): fidelity up to a global phase.
double fidelity(const ComplexVector& a, const ComplexVector& b);

/// ||P v||^2 / ||v||^2 where P projects onto span(basis columns, assumed orthonormal).
double subspace_fidelity(const ComplexMatrix& orthonormal_basis, const ComplexVector& v);

} // namespace resolvent::linalg
