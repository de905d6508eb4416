#pragma once

/** \file errors.hpp
 *
 * Exception types thrown by the library.  Every failure of a structural
 * identity that the algebra is supposed to guarantee (closure of a
 * quasi-solvable space, exactness of an operator identity, ...) gets its own
 * type so that callers and tests can tell a numerical problem from a broken
 * precondition.
 */

#include <stdexcept>
#include <string>

namespace fingap {

/// Base class of all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// --- lattice / elliptic evaluation -------------------------------------

/// Periods do not span a lattice we can work with (Im(tau) <= 0, nome too
/// close to the unit circle, coincident roots, nonzero root sum, ...).
struct DegenerateLattice : Error { using Error::Error; };

/// Evaluation point is too close to a pole of the requested function.
struct PoleProximity : Error { using Error::Error; };

// --- exact algebra ------------------------------------------------------

/// Two operands live over different root fields or scalar fields.
struct FieldMismatch : Error { using Error::Error; };

/// Functions handed to the annihilator are linearly dependent.
struct DependentBasis : Error { using Error::Error; };

/// An operator resisted the (a_j, c_j) right-division rewrite.
struct ReductionFailure : Error { using Error::Error; };

// --- spectral module ----------------------------------------------------

/// Exponent vector does not give a finite-dimensional invariant space.
struct NotQuasiSolvable : Error { using Error::Error; };

/// H did not map the candidate invariant space into itself exactly.
struct ClosureFailure : Error { using Error::Error; };

/// An intertwining identity H' L = L H failed exactly.
struct IntertwineFailure : Error { using Error::Error; };

/// The product-of-solutions ansatz did not yield a one-dimensional
/// solution space with the expected degree pattern.
struct AnsatzFailure : Error { using Error::Error; };

/// One of the defining relations of the commuting pair (A, H) failed.
struct RelationFailure : Error { using Error::Error; };

/// Two independently computed quantities that must agree do not.
struct MismatchFailure : Error { using Error::Error; };

/// Band-edge extraction found roots off the real axis.
struct ComplexRoots : Error { using Error::Error; };

/// Operation requires a rectangular (real) lattice.
struct NonRectangular : Error { using Error::Error; };

// --- monodromy / Bethe --------------------------------------------------

/// Requested energy sits on a branch point of sqrt(-Q).
struct EdgeEnergy : Error { using Error::Error; };

/// Integration path in the energy plane passes too close to a root of Q.
struct PathPole : Error { using Error::Error; };

/// Branch tracking could not be continued unambiguously.
struct BranchAmbiguity : Error { using Error::Error; };

/// Base point is unusable (e.g. not a root of Q when one is required).
struct BadBasepoint : Error { using Error::Error; };

/// Integration path in x passes too close to a pole of the potential.
struct PolePath : Error { using Error::Error; };

/// An iteration (Newton, Aberth, series, ODE step control) failed to
/// converge within its budget.
struct NonConvergence : Error { using Error::Error; };

/// Bethe roots collided with each other or with a singular point.
struct Collision : Error { using Error::Error; };

/// A computed quantity diverged (step size underflow, overflow, ...).
struct Divergence : Error { using Error::Error; };

/// The two-by-two expression P2(E) vanishes; the closed form is singular.
struct SingularP2 : Error { using Error::Error; };

/// A random sample point landed too close to a pole of the expression
/// being evaluated.
struct SamplePole : Error { using Error::Error; };

// --- BC_N ---------------------------------------------------------------

/// The numerical validation gate of an algebraic identity failed.
struct IdentityValidationFailed : Error { using Error::Error; };

// --- I/O ----------------------------------------------------------------

/// Unknown or malformed serialization format.
struct UnsupportedFormat : Error { using Error::Error; };

} // namespace fingap
