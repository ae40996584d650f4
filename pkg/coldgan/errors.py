"""Exception hierarchy and process exit codes."""

from __future__ import annotations

from enum import IntEnum
from typing import Mapping


class ExitCode(IntEnum):
    """Process exit codes returned by the CLI."""

    OK = 0
    CONFIG = 2
    DATA = 3
    NUMERIC = 4


class ColdGanError(Exception):
    """Base class for every error the toolkit raises on purpose."""

    exit_code: ExitCode = ExitCode.DATA


class ConfigError(ColdGanError):
    exit_code = ExitCode.CONFIG


class DataError(ColdGanError):
    exit_code = ExitCode.DATA


class ParseError(DataError):
    """A rating line that does not match its declared format."""

    def __init__(self, line_number: int, message: str) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class RatingScaleError(DataError):
    """A rating outside the dataset's declared scale, or a negative timestamp."""

    def __init__(self, line_number: int, message: str) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class EmptyDatasetError(DataError):
    pass


class UnknownUserError(DataError, LookupError):
    pass


class DomainError(DataError, ValueError):
    """An argument outside the domain an operation is defined on."""


class ShapeError(DataError, ValueError):
    pass


class EvaluationError(DataError):
    """No test user could be evaluated."""

    def __init__(self, message: str, excluded: int) -> None:
        super().__init__(message)
        self.excluded = excluded


class NumericError(ColdGanError):
    exit_code = ExitCode.NUMERIC


class NonFiniteLossError(NumericError):
    """Training produced a NaN or infinite loss."""

    def __init__(self, epoch: int, batch: int, losses: Mapping[str, float]) -> None:
        detail = ", ".join(f"{name}={value!r}" for name, value in losses.items())
        super().__init__(f"non-finite loss at epoch {epoch}, batch {batch}: {detail}")
        self.epoch = epoch
        self.batch = batch
        self.losses = dict(losses)
