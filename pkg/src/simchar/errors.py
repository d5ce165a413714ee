"""Exception types raised by the simchar library."""


class SimcharError(Exception):
    """Base class for all library-specific errors."""


class NonOrientable(SimcharError):
    """No consistent global orientation of the top-dimensional simplices exists."""


class DegenerateSimplex(SimcharError):
    """A simplex has zero affine volume."""


class BoundaryDetected(SimcharError):
    """A codimension-one simplex does not have exactly two top-dimensional cofaces."""


class DegreeOutOfRange(SimcharError):
    """Requested degree is outside 0..dim of the complex."""


class PerturbationEscapedSimplex(SimcharError):
    """A perturbed barycenter left the open simplex after the retry budget."""


class IndexOutOfRange(SimcharError):
    """Requested cohomology class index exceeds the Betti number."""


class DegreeMismatch(SimcharError):
    """Cochain/chain degrees are incompatible for the requested pairing."""


class NoParentLink(SimcharError):
    """The chain's complex does not descend from the form's base complex."""


class SingularGram(SimcharError):
    """A Gram matrix failed to be positive definite (upstream defect)."""


class EmptySubspace(SimcharError):
    """A restricted determinant was requested on a zero-dimensional subspace."""


class NotPositiveDefinite(SimcharError):
    """The imaginary part of a theta-function argument is not positive definite."""


class NonConvergent(SimcharError):
    """Grid doubling did not stabilise a torus average within tolerance."""


class UnsupportedAction(SimcharError):
    """A custom action without a numeric fallback was passed to a closed-form path."""


class TruncationInsufficient(SimcharError):
    """The lattice-sum tail bound exceeds tolerance at the maximal window radius."""


class TooLarge(SimcharError):
    """Brute-force oracle invoked beyond its size limits."""


class NotACycle(SimcharError):
    """A chain expected to be closed has nonzero boundary."""


class NotASpark(SimcharError):
    """A triple violates the spark equation beyond tolerance."""


class ExactnessViolation(SimcharError):
    """A node of the exact-sequence grid fails its rank identity."""


class UnknownManifold(SimcharError):
    """Catalog identifier not recognised."""
