"""Exception types shared across the toolkit."""


class CvcharError(Exception):
    """Base class for all toolkit errors."""


class NegativeRadicand(CvcharError):
    """The symplectic-eigenvalue radicand is negative: not a valid two-mode CM."""


class NoRealSolution(CvcharError):
    """Standard-form invariant system has no real solution."""


class DomainError(CvcharError):
    """Argument outside the mathematical domain of the function."""


class DuanUndefined(CvcharError):
    """Duan gain a^2 = sqrt((n-1)/(m-1)) undefined for n <= 1 or m <= 1."""


class DegenerateSample(CvcharError):
    """Sample unusable for a normality test (zero spread or duplicate-heavy)."""


class SampleSizeOutOfRange(CvcharError):
    """Shapiro-Wilk approximation valid only for 3 <= n <= 5000."""


class EmptyBin(CvcharError):
    """A phase bin received no samples."""


class EmptyTrace(CvcharError):
    """Estimation requested on a trace without samples."""


class EfficiencyOutOfRange(CvcharError):
    """Tomographic kernels are unbounded for eta <= 0.5."""


class MissingEstimate(CvcharError):
    """A required per-mode estimate is absent."""


class OrderTooLarge(CvcharError):
    """Laguerre recurrence order above the stability cap."""


class QuadratureNotConverged(CvcharError):
    """Photon-number quadrature failed to converge within the node cap."""
