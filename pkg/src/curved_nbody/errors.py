"""Exception types shared across the package.

Everything derives from CurvedNBodyError so callers can catch the whole
family with one clause. CLI code maps these to exit code 1 (operational)
or 2 (checked-and-false), depending on context.
"""


class CurvedNBodyError(Exception):
    """Base class for all package errors."""


class SingularPairError(CurvedNBodyError):
    """Two bodies coincide (or are antipodal on the sphere) within tolerance."""

    def __init__(self, i: int, j: int, value: float, message: str | None = None):
        self.i, self.j, self.value = i, j, value
        super().__init__(
            message or f"singular pair ({i}, {j}): sigma-inner product {value!r}"
        )


class DegenerateVectorError(CurvedNBodyError):
    """A raw 4-vector cannot be scaled onto the manifold."""


class OffShellError(CurvedNBodyError):
    """Input data violates its stated quadric constraint beyond tolerance."""


class ZeroGeneratorError(CurvedNBodyError):
    """An isometry generator with alpha = beta = 0 where a motion is required."""


class SingularEncounterError(CurvedNBodyError):
    """Integration ran into the singular set; carries the partial trajectory."""

    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


class SingularApproachError(CurvedNBodyError):
    """A search iterate entered the singular-set tolerance zone."""


class NoConvergenceError(CurvedNBodyError):
    """Iteration limit exhausted before meeting the requested tolerance."""


class DegenerateDenominatorError(CurvedNBodyError):
    """The multiplier formula's denominator vanishes (all bodies on the axes)."""


class NotACentralConfigError(CurvedNBodyError):
    """A configuration failed the central-configuration residual check."""


class InadmissibleBetaError(CurvedNBodyError):
    """Requested rate parameter lies outside the family's admissible range."""


class OutOfRangeError(CurvedNBodyError):
    """A size parameter lies outside the solvable range."""


class ParamOutOfDomainError(CurvedNBodyError):
    """Fixture parameters outside the documented domain."""
