class CapsimException(Exception):
    """Base class for all capsim specific exceptions."""

    ...


class ContractViolationError(CapsimException):
    """Raised when an auction rule or an input breaks the model contract (negative spend, spend above the declared
    bound, spend by an inactive campaign)."""

    def __init__(self, message):
        self.message = message
        super().__init__(message)


class DimensionMismatchError(ContractViolationError):
    """Raised when vectors that must have one entry per campaign disagree in length."""

    def __init__(self, what, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"DimensionMismatchError: {what} has {actual} components, expected {expected}."
        )


class EmptySampleError(CapsimException):
    """Raised when an operation needs at least one event and receives none."""

    def __init__(self, what="event sample"):
        super().__init__(f"EmptySampleError: The {what} is empty.")


class CalibrationError(CapsimException):
    """Raised when base-budget calibration cannot bracket the target capped fraction."""

    def __init__(self, target, low_fraction, high_fraction):
        self.target = target
        super().__init__(
            f"CalibrationError: Target capped fraction {target} is outside the bracket "
            f"[{high_fraction}, {low_fraction}] reachable within the configured base budget bounds."
        )


class BidLogParseError(CapsimException):
    """Raised when a bid log row cannot be parsed."""

    def __init__(self, line, msg):
        self._line = line
        super().__init__(f"BidLogParseError: Line {line}: {msg}")

    @property
    def line(self):
        return self._line


class DayNotFoundError(CapsimException):
    """Raised when a bid log has no records for the requested day."""

    def __init__(self, day):
        self.day = day
        super().__init__(f"DayNotFoundError: No bid log records found for day {day}.")


class UnknownExperimentError(CapsimException):
    """Raised when an experiment name is not in the registry."""

    def __init__(self, name):
        self.name = name
        super().__init__(
            f"UnknownExperimentError: No experiment registered under the name '{name}'."
        )
