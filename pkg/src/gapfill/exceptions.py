"""Exception and warning types raised by gapfill."""


class GapfillError(Exception):
    """Base class for all gapfill errors."""


class IllConditioned(GapfillError):
    """Gram matrix of the cosine family is numerically singular."""

    def __init__(self, condition, threshold):
        self.condition = condition
        self.threshold = threshold
        super().__init__(
            f"Gram matrix condition estimate {condition:.3e} exceeds {threshold:.1e}; "
            "try a smaller band parameter n or fewer missing times"
        )


class DegenerateProjection(GapfillError):
    """The constant function lies numerically inside the cosine span."""


class MaskViolation(GapfillError):
    """A nonzero kernel tap would multiply a missing sample."""

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class ZeroSignal(GapfillError):
    """Signal energy is too small to normalise an error."""


class GridTooCoarse(GapfillError):
    """Spectral grid does not resolve the band near +-pi."""


class NonRealSignal(GapfillError):
    """Synthesised samples carry a significant imaginary part."""


class WindowTooSmall(UserWarning):
    """Observation window does not cover the kernel support; truncation applied."""
