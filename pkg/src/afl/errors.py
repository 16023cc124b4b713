"""Exception hierarchy.

Two families matter to callers: :class:`InputError` (bad or unsuitable
data, CLI exit code 2) and :class:`NumericFailure` (a numerical routine
could not meet its tolerance, CLI exit code 3).
"""


class AflError(Exception):
    pass


class InputError(AflError, ValueError):
    pass


class NumericFailure(AflError, ArithmeticError):
    pass


class ValidationError(InputError):
    """Payload failed schema or range validation."""


class ValueMismatch(InputError):
    pass


class DegenerateData(InputError):
    pass


class ConstantMap(InputError):
    pass


class NotWellDefined(InputError):
    """Immersion requested for data that only lives on the universal cover."""


class EvaluationAtSingularity(InputError):
    pass


class NonConvergence(NumericFailure):
    pass


class ContourTooClose(NumericFailure):
    pass


class PathHitsSingularity(NumericFailure):
    pass


class ToleranceNotMet(NumericFailure):
    pass
