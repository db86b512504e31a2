"""Exception types shared across the package.

Every error carries a short ``code`` string so the CLI can map failures to
exit statuses without inspecting messages.
"""


class KSRGError(Exception):
    code = "ERROR"


class ParameterDomainError(KSRGError, ValueError):
    code = "REJECT_DOMAIN"


class InconsistentParametersError(KSRGError, ValueError):
    code = "REJECT_INCONSISTENT"


class CapacityError(KSRGError):
    code = "CAPACITY"


class GeometryError(KSRGError, ValueError):
    code = "GEOMETRY"


class OutOfRangeError(KSRGError, ValueError):
    code = "OUT_OF_RANGE"


class InsufficientEventsError(KSRGError):
    code = "INSUFFICIENT_EVENTS"

    def __init__(self, message, result=None):
        # partial experiment result (rows without a fit), when available
        self.result = result
        super().__init__(message)


class ConfigParseError(KSRGError, ValueError):
    code = "PARSE"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateDistanceWarning(UserWarning):
    """Two vertices share a position; the connection probability was capped at p."""
