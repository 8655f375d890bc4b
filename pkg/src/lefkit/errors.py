"""Exception types shared across lefkit."""


class LefkitError(Exception):
    """Base class; ``code`` is the machine-readable id surfaced by the CLI."""

    code = "error"


class MalformedTable(LefkitError, ValueError):
    code = "malformed-table"


class NotAssociative(LefkitError, ValueError):
    code = "not-associative"


class BoundExceeded(LefkitError):
    code = "bound-exceeded"


class CapExceeded(LefkitError):
    code = "cap-exceeded"

    def __init__(self, message, count):
        super().__init__(message)
        self.count = count


class StepCapExceeded(LefkitError):
    code = "step-cap-exceeded"


class NotTerminating(LefkitError):
    code = "not-terminating"


class ParseError(LefkitError, ValueError):
    code = "parse-error"


class AlphabetError(LefkitError, ValueError):
    code = "alphabet-error"


class DuplicateElement(LefkitError, ValueError):
    code = "duplicate-element"


class UndecidedEquality(LefkitError):
    code = "undecided-equality"


class WordTooLong(LefkitError, ValueError):
    code = "word-too-long"


class UniverseMismatch(LefkitError, ValueError):
    code = "universe-mismatch"


class EmptyPreimage(LefkitError):
    code = "empty-preimage"


class PreconditionFailed(LefkitError):
    code = "precondition-failed"


class CorruptCertificate(LefkitError):
    code = "corrupt-certificate"
