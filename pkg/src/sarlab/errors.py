"""Exception hierarchy shared by all sarlab modules."""


class SarlabError(Exception):
    """Base class for every error raised by sarlab."""


class SingularMatrix(SarlabError):
    """A matrix that must be positive definite is singular or ill-conditioned."""

    def __init__(self, role, cond=None):
        self.role = role
        self.cond = cond
        msg = f"singular matrix: {role}"
        if cond is not None:
            msg += f" (condition number {cond:.3g})"
        super().__init__(msg)


class NoObservableSignal(SarlabError):
    """Eve's observations carry no correlation with the target channel."""


class UnsupportedModel(SarlabError):
    """The requested computation is not defined for this channel model."""


class QuadratureError(SarlabError):
    """Numerical integration failed to converge to the requested tolerance."""


class InternalConsistencyError(SarlabError):
    """A quantity that must be non-negative came out clearly negative."""


class ConfigError(SarlabError):
    """Invalid experiment configuration."""
