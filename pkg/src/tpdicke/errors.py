"""Exception types shared across the package."""


class TpDickeError(Exception):
    """Base class for all package errors."""


class ConfigError(TpDickeError):
    """Bad CLI flag, config file entry, or parameter combination."""


class SectorMismatch(TpDickeError):
    """Operator requested in a sector it does not preserve."""


class BasisMismatch(TpDickeError):
    """Operator and spectrum were built over different bases."""


class NumericalFailure(TpDickeError):
    """Eigensolver (or another numerical kernel) failed to converge."""


class MissingVectors(TpDickeError):
    """Operation needs eigenvectors but the spectrum holds none."""


class SpectralCollapse(TpDickeError):
    """Coupling at or beyond the collapse threshold for the requested block."""

    def __init__(self, message, gamma_threshold=None):
        super().__init__(message)
        self.gamma_threshold = gamma_threshold


class Unbounded(TpDickeError):
    """No finite collapse threshold exists (m_x = 0 block)."""


class TooFewLevels(TpDickeError):
    """Not enough energy levels for the requested statistic."""


class TooFewSamples(TpDickeError):
    """Not enough samples for the requested statistic."""


class ZeroSpacing(TpDickeError):
    """Consecutive degenerate levels make a spacing ratio 0/0."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DomainViolation(TpDickeError):
    """Phase-space point outside the Bloch disk Q^2 + P^2 <= 4."""


class BoundarySingularity(TpDickeError):
    """Point too close to the Bloch-disk edge for derivatives."""


class OutsideShell(TpDickeError):
    """No real root q solves h(q, p, Q, P) = epsilon at this point."""


class EmptyShell(TpDickeError):
    """No sampled point admits a real root on the energy shell."""


class StepFailure(TpDickeError):
    """Adaptive integrator could not complete the requested time span."""


class DomainExit(TpDickeError):
    """Trajectory reached the Bloch-disk boundary within tolerance."""
