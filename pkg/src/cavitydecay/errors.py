"""Exception and warning types raised across the package."""


class CavityError(Exception):
    """Base class for all numerical errors raised by cavitydecay."""


class DomainError(CavityError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class SingularityError(DomainError):
    """A special function was asked for its value at a singular point."""


class CavityPoleError(CavityError, ZeroDivisionError):
    """A layer-matching denominator vanished.

    Only reachable for a lossless wall, where the cavity resonance is a true
    pole of the scattering coefficients.
    """

    def __init__(self, omega, where=""):
        self.omega = omega
        msg = f"vanishing denominator {where} at omega={omega!r}".replace("  ", " ")
        super().__init__(msg)


class OverlapError(CavityError):
    """Half height of a line was not reached before a neighbouring line."""


class BracketError(CavityError):
    """A root-finding bracket does not enclose a sign change."""


class KernelResolutionError(CavityError, ValueError):
    """Time step too coarse for the frequency window of the memory kernel."""


class ConvergenceWarning(UserWarning):
    """A numerical result is likely under-resolved."""
