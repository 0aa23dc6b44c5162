from __future__ import annotations

from typing import Any, Iterable, Optional


class SplapError(Exception):
    """
    Base error for the numerical layer.

    Attributes:
        code (str): Catalog-facing result code (looked up under `errors.<code>`
            unless the command spec maps it to a dedicated key).
        params (dict): Values substituted into the catalog template.
        trace (list[str]): Diagnostic lines (continuation stages, bracket
            history, worst subinterval); printed one per line on failure.
        exit_code (int): Process exit code used by `main.py`.
    """
    default_code: str = "numerical_failure"
    exit_code: int = 3

    def __init__(self, message: str = "", *, code: Optional[str] = None,
                 params: Optional[dict[str, Any]] = None,
                 trace: Optional[Iterable[str]] = None):
        super().__init__(message)
        self.code = code or self.default_code
        self.params = {"error": message, **(params or {})}
        self.trace = [str(t) for t in (trace or [])]


# mathematical nonexistence
class NonexistenceError(SplapError):
    default_code = "nonexistent"
    exit_code = 2


# usage / configuration
class ConfigError(SplapError):
    default_code = "config_error"
    exit_code = 1

class DomainError(SplapError):
    default_code = "domain_error"
    exit_code = 1

class RangeError(SplapError):
    default_code = "range_error"
    exit_code = 1


# numerical failure
class QuadratureError(SplapError):
    default_code = "quadrature_failed"

class EigenError(SplapError):
    default_code = "eigen_failed"

class DominationError(SplapError):
    default_code = "domination_failed"

class SolveError(SplapError):
    default_code = "solve_failed"

class PositivityError(SplapError):
    default_code = "positivity_lost"
