"""Shared exception types."""


class ParseError(ValueError):
    """Malformed input text. Carries the 1-based line number when known."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        prefix = ""
        if source is not None:
            prefix += f"{source}:"
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class ResourceBudgetError(RuntimeError):
    """A configured resource budget (word length, node count, ...) was exceeded.

    Raised instead of silently truncating output.
    """


class MonodromyMismatchError(ValueError):
    """Two factorizations that were required to have equal total monodromy do not."""


class ReplayError(RuntimeError):
    """A derivation replay failed to find a commutation path; this should never
    happen on the supported inputs and indicates a genuine inconsistency."""
