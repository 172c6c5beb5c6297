"""Exception types shared across the toolkit."""


class MisuseMineError(Exception):
    """Base class for all errors raised by this package."""


class RepositoryAccessError(MisuseMineError):
    """A git invocation failed or the repository is not readable."""


class NoBlamedLines(MisuseMineError):
    """The fixing commit touched no pre-existing line that could be blamed."""


class JavaSyntaxError(MisuseMineError, SyntaxError):
    """Source text could not be segmented into declarations."""

    def __init__(self, message, line=0, column=0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.msg = message
        self.lineno = line
        self.offset = column

    def __str__(self):
        return f"{self.msg} (line {self.lineno}, column {self.offset})"


class ProviderError(MisuseMineError):
    """A search provider could not answer a query."""


class EmptyKeywordSet(MisuseMineError, ValueError):
    pass


class EmptyInput(MisuseMineError, ValueError):
    pass


class EmptyPattern(MisuseMineError, ValueError):
    pass


class SizeLimitExceeded(MisuseMineError, ValueError):
    pass


class AllZeroDifferences(MisuseMineError, ValueError):
    pass


class DegenerateTable(MisuseMineError, ValueError):
    pass


class LengthMismatch(MisuseMineError, ValueError):
    pass
