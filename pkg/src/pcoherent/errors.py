"""Exception types shared across the package."""


class NumericalFailure(RuntimeError):
    """A solver or iterative routine could not produce a trustworthy answer."""


class NoConvergence(NumericalFailure):
    """An iteration cap was exhausted before the convergence test passed."""


class IncoherentError(ValueError):
    """A prevision or dual object was requested from an incoherent assessment set."""

    def __init__(self, message="incoherent", certificate=None):
        super().__init__(message)
        self.certificate = certificate


class UndefinedConditional(ValueError):
    """Conditioning on an event (projector) of zero probability."""
