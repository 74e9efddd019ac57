"""Exception hierarchy for impedance_lab."""


class ImpedanceLabError(Exception):
    """Base class for all library errors."""


class NonHermitian(ImpedanceLabError):
    """Matrix violates the Hermitian symmetry tolerance."""


class IndefiniteMatrix(ImpedanceLabError):
    """A nominally PSD matrix has a negative eigenvalue too large to clamp."""


class DomainError(ImpedanceLabError, ValueError):
    """Argument outside the mathematical domain of the operation."""


class BadBracket(ImpedanceLabError, ValueError):
    """Scalar maximizer called with lo >= hi."""


class SingularCircuit(ImpedanceLabError):
    """Z_2 + Z_A is (numerically) zero; the bilinear map is undefined."""


class SingularInversion(ImpedanceLabError):
    """1 - sqrt(R_1/R_2)*F is (numerically) zero; Z_A cannot be recovered."""


class NonPassive(ImpedanceLabError, ValueError):
    """An impedance with non-positive real part where passivity is required."""


class InfeasibleTraining(ImpedanceLabError, ValueError):
    """Training length too short to build orthogonal sequence blocks."""


class ShapeMismatch(ImpedanceLabError, ValueError):
    """Array dimensions inconsistent with the training/channel configuration."""


class Degenerate(ImpedanceLabError):
    """Sample cross-covariance is numerically zero: F estimate diverges."""


class OptimizerFailure(ImpedanceLabError):
    """Scalar likelihood search failed to bracket a maximum."""


class SingularSystem(ImpedanceLabError):
    """Regularized MMSE system is ill-conditioned beyond tolerance."""


class SingularFIM(ImpedanceLabError):
    """Fisher information matrix is not invertible."""


class ConfigError(ImpedanceLabError, ValueError):
    """Experiment configuration is invalid; message names the offending field."""
