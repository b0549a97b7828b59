"""Exception and warning types shared across the package.

Errors signal contract violations (bad inputs, unsupported configurations) or
numerical failures (divergent quadrature, loss of positivity beyond tolerance).
Warnings flag results that are well-defined but outside the regime where the
perturbative formulas are trustworthy.
"""


class ScalardetError(Exception):
    """Base class for all package-specific errors."""


class GridError(ScalardetError):
    """Invalid momentum or spacetime grid specification."""


class NullSeparationSingularity(ScalardetError):
    """Closed-form Wightman function evaluated on the light cone with eps=0."""


class DimensionOverflow(ScalardetError):
    """Truncated Fock space would exceed the supported dimension cap."""


class UnsupportedOrder(ScalardetError):
    """Correlator or joint-density order outside the implemented range."""


class NonGaussianState(ScalardetError):
    """State family outside the supported set for the requested operation."""


class ZeroDenominator(ScalardetError):
    """Localization-matrix denominator underflowed to zero."""


class NegativeDensity(ScalardetError):
    """Probability density below the negativity floor (beyond clamp tolerance)."""


class GridTooCoarse(ScalardetError):
    """Grid spacing too large to resolve the requested sampling widths."""


class ZeroDetection(ScalardetError):
    """Total detection probability too small to condition on."""


class NonStationaryConfiguration(ScalardetError):
    """Trajectory/state combination without a stationary pullback."""


class QuadratureDivergence(ScalardetError):
    """Grid-doubling check exceeded the requested tolerance."""


class ConfigError(ScalardetError):
    """Invalid or inconsistent run configuration."""


class SupportMismatch(ScalardetError):
    """Two-event density has weight on cells where the single density vanishes.

    Carries the offending cell indices in `cells`.
    """

    def __init__(self, message: str, cells=()):
        super().__init__(message)
        self.cells = tuple(int(c) for c in cells)


class CommutatorViolation(ScalardetError):
    """Free Hamiltonian fails to commute with a projector it should preserve."""


class NegativeEigenvalue(ScalardetError):
    """Operator that must be positive semidefinite has an eigenvalue below floor."""


class CompletenessViolation(ScalardetError):
    """Effect family fails to resolve the identity within tolerance."""


class ScalardetWarning(UserWarning):
    """Base class for package warnings."""


class PerturbativeRegimeWarning(ScalardetWarning):
    """Detection probability large enough to strain the perturbative expansion."""


class ScaleSeparationWarning(ScalardetWarning):
    """Sampling widths not well separated from the kernel's internal scales."""


class CoarseGridWarning(ScalardetWarning):
    """Grid resolution below the recommended floor; results may be unconverged."""


class NonForwardState(ScalardetWarning):
    """Arrival-time state has non-positive mean momentum toward the detector."""
