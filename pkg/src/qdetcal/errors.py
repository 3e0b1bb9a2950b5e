"""Exception hierarchy shared by every module."""


class QdetcalError(Exception):
    """Base class for all errors raised by qdetcal."""


class DomainError(QdetcalError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class SingularOutcome(QdetcalError):
    """An outcome has zero probability but non-zero derivative, so the Fisher information diverges."""


class ZeroInformation(QdetcalError):
    """The Fisher information is zero; no finite Cramer-Rao bound exists."""


class ConvergenceFailure(QdetcalError):
    """A numerical routine could not reach its tolerance."""


class EnergyMismatch(QdetcalError, ValueError):
    """Curves in a fixed-energy comparison do not carry the same total mean energy."""


class BracketError(QdetcalError):
    """A root-finding bracket endpoint could not be evaluated."""


class NoThreshold(QdetcalError):
    """Even a perfectly heralded photon does not reach the reference Fisher information."""


class BoundaryEstimate(QdetcalError):
    """Observed data push the maximum-likelihood estimate onto the boundary of [0, 1]."""

    def __init__(self, message: str, value: float):
        super().__init__(message)
        self.value = value
