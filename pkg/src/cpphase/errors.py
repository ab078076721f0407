"""Exception types shared across the toolkit."""


class CpphaseError(Exception):
    """Base class for all toolkit errors."""


class SpecError(CpphaseError, ValueError):
    """Invalid model or run specification."""


class DomainError(CpphaseError, ValueError):
    """Argument outside the operation's domain (vertex, interval, parameter)."""


class GenerationError(CpphaseError, RuntimeError):
    """A sampled configuration cannot be turned into a valid graph."""


class MarginError(CpphaseError, ValueError):
    """Diagnostic requested too close to the window boundary."""


class DecompositionUnavailableError(CpphaseError, RuntimeError):
    """Fewer than two usable cut points; the window is too small or no cuts exist."""


class InsufficientDataError(CpphaseError, RuntimeError):
    """Not enough samples / blocks to produce the requested statistic."""


class BudgetExceededError(CpphaseError, RuntimeError):
    """The run would exceed (or has exceeded) the configured event budget."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class BracketError(CpphaseError, ValueError):
    """An initial bisection bracket does not straddle the target."""


class BlockRangeError(CpphaseError, RuntimeError):
    """A trajectory left the decomposed vertex range; partial output attached."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
