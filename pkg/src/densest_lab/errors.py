"""Exception hierarchy shared by the library and the CLI exit codes."""
from __future__ import annotations

import os

BUDGET_ENV = "DENSEST_LAB_BUDGET"
DEFAULT_BUDGET = 2 ** 26


class LabError(Exception):
    exit_code = 1


class InvalidInputError(LabError, ValueError):
    """Malformed files, bad parameters, precondition violations."""

    exit_code = 2


class ParameterError(InvalidInputError):
    pass


class OracleTooLarge(LabError):
    """An exact enumeration would exceed the configured work budget."""

    exit_code = 3


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidInputError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise InvalidInputError(f"{BUDGET_ENV} must be positive")
    return value


def check_budget(work: int, budget: int | None, what: str) -> None:
    limit = default_budget() if budget is None else budget
    if work > limit:
        raise OracleTooLarge(f"oracle too large: {what} needs {work} evaluations, budget is {limit}")
