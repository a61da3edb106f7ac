"""
Command results and the exit-code convention.

Payload (CSV or hex lines) goes to standard output, diagnostics to standard
error; the two never share a stream.
"""

import functools
import logging
from enum import IntEnum
from typing import Any, Callable, List, Optional, TypeVar

import click
from pydantic import BaseModel, Field

from hellogram.core.errors import HellogramError

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


class ExitCode(IntEnum):
    SUCCESS = 0
    OPERATIONAL_ERROR = 1
    USAGE_ERROR = 2


class CommandOutcome(BaseModel):
    exit_code: ExitCode = ExitCode.SUCCESS
    diagnostics: List[str] = Field(default_factory=list)
    payload: Optional[str] = None

    @classmethod
    def from_error(cls, error: Exception) -> "CommandOutcome":
        if isinstance(error, HellogramError):
            message = f"error [{error.code}]: {error.message}"
        elif isinstance(error, OSError) and error.filename:
            message = f"error: {error.filename}: {error.strerror or error}"
        else:
            message = f"error: {error}"
        return cls(exit_code=ExitCode.OPERATIONAL_ERROR, diagnostics=[message])

    def note(self, message: str) -> "CommandOutcome":
        self.diagnostics.append(message)
        return self

    def emit(self) -> None:
        if self.payload is not None:
            click.echo(self.payload, nl=False)
        for line in self.diagnostics:
            click.echo(line, err=True)


def operational(fn: F) -> F:
    """Report HellogramError and OSError as exit code 1 with a one-line diagnostic."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except (HellogramError, OSError) as e:
            if isinstance(e, HellogramError):
                logger.debug(f"[CLI] {fn.__name__} failed: {e.to_dict()}")
            outcome = CommandOutcome.from_error(e)
            outcome.emit()
            raise click.exceptions.Exit(int(outcome.exit_code)) from e

    return wrapper  # type: ignore[return-value]
