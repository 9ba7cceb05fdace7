"""Exception types shared across the package."""


class WarpcheckError(Exception):
    """Base class for all warpcheck errors."""


class JetDomainError(WarpcheckError):
    """A jet operation was evaluated outside its domain (division by zero,
    log/sqrt of a non-positive value, ...)."""

    def __init__(self, op: str, value: float, pos: int | None = None):
        self.op = op
        self.value = value
        self.pos = pos  # byte offset into the source expression, when known
        at = f" at offset {pos}" if pos is not None else ""
        super().__init__(f"domain error in '{op}' (argument value {value!r}){at}")


class DegenerateMetricError(WarpcheckError):
    """Metric is singular or not positive definite at the evaluation point."""


class DegeneratePlaneError(WarpcheckError):
    """Vectors supposed to span a 2-plane are linearly dependent."""


class DependentSeedsError(WarpcheckError):
    """Frame seed vectors are linearly dependent."""


class ImmersionDegenerateError(WarpcheckError):
    """Immersion differential drops rank at the evaluation point."""


class InvalidWarpingError(WarpcheckError):
    """Warping function is non-positive at a sampled point."""


class InvalidNormalError(WarpcheckError):
    """Vector passed as a normal has a non-negligible tangential component."""


class ConfigurationError(WarpcheckError):
    """Inconsistent or incomplete declaration (missing structure tensors,
    missing warped-block declaration, unknown names, ...)."""
