"""Exception hierarchy.

The CLI maps :class:`ConfigurationError` to exit code 2 and :class:`DataError`
(parse and schema problems) to exit code 3.
"""


class GrayscaleError(Exception):
    pass


class InputError(GrayscaleError, ValueError):
    """An argument violates an operation's precondition."""


class DegenerateInputError(InputError):
    """All-zero scores, zero-norm vectors and similar degenerate values."""


class ConfigurationError(GrayscaleError):
    """A required dependency, file or option is missing or inconsistent."""


class DataError(GrayscaleError):
    pass


class ParseError(DataError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class SchemaError(ParseError):
    """A record parsed but its content breaks the corpus schema."""


class MissingEmbeddingError(DataError, KeyError):
    def __init__(self, word, tried):
        self.word = word
        self.tried = tuple(tried)
        super().__init__(f"no embedding for {word!r} (tried: {', '.join(self.tried)})")

    def __str__(self):
        return self.args[0]


class UndefinedMetricError(GrayscaleError, ValueError):
    pass
