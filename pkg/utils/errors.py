# utils/errors.py
#
# Exception types shared by every component. app.py turns any HKQError into
# exit code 2, so raise one of these (not a bare ValueError) for bad input.


class HKQError(Exception):
    """Base class for all errors raised by this package."""


class SpecInvalid(HKQError, ValueError):
    """θ has a zero row, rank(θ) < k, bad dimensions or a malformed spec file."""


class ZeroQuaternion(HKQError, ValueError):
    """Monopole coordinates requested at W = 0."""


class ZeroRadius(HKQError, ValueError):
    """Some r_β vanishes (chart excludes monopole centres)."""


class StringLocus(HKQError, ValueError):
    """Point lies on the Dirac string of the chosen gauge."""


class IsotropyViolation(HKQError, ValueError):
    """The subalgebra 𝔩 is not isotropic for all three Kähler forms."""


class SingularTheta(HKQError, ValueError):
    """θ must be invertible for this preset."""


class OddDimension(HKQError, ValueError):
    pass


class DomainBoundary(HKQError, ValueError):
    """Finite-difference stencil leaves the metric field's domain."""


class ShapeMismatch(HKQError, ValueError):
    pass


class ProblemTooLarge(HKQError, ValueError):
    pass
