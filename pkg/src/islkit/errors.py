"""Exception types shared across the toolkit."""


class IslkitError(Exception):
    """Base class for all islkit errors."""


class ParseError(IslkitError):
    """Raised on malformed input text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ModeError(IslkitError):
    """A formula uses a constructor that is illegal for the requested language mode."""


class FixpointGrammarError(IslkitError):
    """The designated fixpoint variable occurs in a position the binder grammar forbids."""


class BudgetExceededError(IslkitError):
    """A configured resource cap was hit; ``partial`` may carry partial progress."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class KernelConsistencyError(IslkitError):
    """An internal cross-check (truth lemma, frame validation) failed; indicates a bug."""
