"""Exception hierarchy shared across the package."""


class SaqError(Exception):
    """Base class for domain errors raised by saq."""


class ParseError(SaqError, ValueError):
    def __init__(self, message, text=None, position=None):
        self.message = message
        self.text = text
        self.position = position
        if text is not None and position is not None:
            message = f"{message} at position {position}: {text!r}"
        super().__init__(message)


class DimensionError(SaqError, ValueError):
    pass


class BudgetError(SaqError):
    pass


class RankDeficiencyError(SaqError):
    def __init__(self, message, rank=None, expected=None):
        super().__init__(message)
        self.rank = rank
        self.expected = expected


class PerpendicularityError(SaqError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class NoConvergence(SaqError):
    pass


class InequalityBoundary(SaqError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotCovered(SaqError):
    def __init__(self, message, reason):
        super().__init__(message)
        self.reason = reason


class Ambiguous(SaqError):
    def __init__(self, message, feet=()):
        super().__init__(message)
        self.reason = "ambiguous"
        self.feet = list(feet)


class ValidationRequired(SaqError):
    pass


class IncompleteCoverage(SaqError):
    def __init__(self, atlas):
        super().__init__(
            f"{atlas.coverage.samples - atlas.coverage.covered} of "
            f"{atlas.coverage.samples} samples are not covered"
        )
        self.atlas = atlas
