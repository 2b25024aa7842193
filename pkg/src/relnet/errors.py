"""
Exception hierarchy for relnet.

Every error raised on purpose by the library derives from RelNetError.
The CLI maps each class to an error tag and an exit code.
"""

from typing import Optional


class RelNetError(Exception):
    """Base class for all relnet errors."""

    tag = "runtime"
    exit_code = 4


class ConfigError(RelNetError, ValueError):
    """Invalid or inconsistent configuration."""

    tag = "config"
    exit_code = 2


class ParseError(RelNetError, ValueError):
    """
    Syntax error in one of the dataset files.

    Args:
        message: What went wrong
        source: File name (or "<string>")
        line: 1-based line number
        column: 1-based column number
        expected: The token the parser was waiting for, if known
    """

    tag = "parse"
    exit_code = 3

    def __init__(
        self,
        message: str,
        source: str = "<string>",
        line: int = 0,
        column: int = 0,
        expected: Optional[str] = None
    ):
        self.source = source
        self.line = line
        self.column = column
        self.expected = expected
        location = f"{source}:{line}:{column}"
        if expected:
            message = f"{message} (expected {expected})"
        super().__init__(f"{location}: {message}")


class SchemaError(RelNetError, ValueError):
    """Undeclared predicate, unsupported arity or unsound rule template."""

    tag = "schema"
    exit_code = 3


class TypeMismatchError(RelNetError, ValueError):
    """An argument's entity type differs from the predicate declaration."""

    tag = "type"
    exit_code = 3


class NumericalError(RelNetError, ArithmeticError):
    """Non-finite activation, logit, loss or gradient."""

    tag = "numerical"
    exit_code = 4


class MetricUndefinedError(RelNetError, ValueError):
    """A ranking metric was asked for on input it is not defined for."""

    tag = "metric"
    exit_code = 4


class PipelineStageError(RelNetError):
    """
    Failure inside one stage of the experiment pipeline.

    The exit code and tag follow the wrapped cause so a parse error in the
    "load" stage still exits with the parse-error code.
    """

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        self.tag = getattr(cause, "tag", "runtime")
        self.exit_code = getattr(cause, "exit_code", 4)
        super().__init__(f"stage '{stage}' failed: {cause}")
