"""Exception types shared across the toolkit."""


class LexControlError(Exception):
    """Base class for all toolkit errors."""


class FormatError(LexControlError):
    """A dataset file violates the 3-column tab-separated layout."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LFParseError(LexControlError):
    """A logical form fails to parse; carries the character offset."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"offset {offset}: {message}")


class PlanError(LexControlError):
    """A substitution plan is invalid or cannot be applied."""


class ConsistencyError(LexControlError):
    """Sentence and logical form disagree about a controlled item."""


class ScanError(LexControlError):
    """Corpus scan misconfiguration (bad pattern set, missing report entry)."""


class EvalError(LexControlError):
    """Evaluation inputs are malformed or misaligned."""
