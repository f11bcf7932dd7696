"""Exception hierarchy shared by every kova module."""


class KovaError(Exception):
    """Base class; carries a short machine-readable ``kind``."""

    kind = "error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class DimensionMismatch(KovaError, ValueError):
    kind = "dimension-mismatch"


class ModeMismatch(KovaError, ValueError):
    kind = "mode-mismatch"


class IndexOutOfRange(KovaError, IndexError):
    kind = "index-out-of-range"


class RankCapExceeded(KovaError, ValueError):
    kind = "rank-cap-exceeded"


class NotSemiQuasihomogeneous(KovaError, ValueError):
    kind = "not-semi-quasihomogeneous"


class UnverifiedBalance(KovaError, ValueError):
    kind = "unverified-balance"


class AnsatzTooLarge(KovaError, MemoryError):
    kind = "ansatz-too-large"


class VerificationFailure(KovaError, RuntimeError):
    """An internal post-condition failed; always a bug, never bad input."""

    kind = "verification-failure"


class ParseError(KovaError, ValueError):
    """DSL error with 1-based line/column."""

    kind = "parse-error"

    def __init__(self, message, line=None, column=None, kind=None):
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message, line=line, column=column)
        self.line = line
        self.column = column
        if kind is not None:
            self.kind = kind


class LexicalError(ParseError):
    kind = "lexical"


class SyntaxError_(ParseError):
    kind = "syntax"


class UndeclaredIdentifier(ParseError):
    kind = "undeclared-identifier"


class DuplicateEquation(ParseError):
    kind = "duplicate-equation"


class NonPolynomial(ParseError):
    kind = "non-polynomial"
