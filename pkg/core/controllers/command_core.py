import time
from enum import Enum, auto
from typing import Any, Callable, Dict, Optional

from core.controllers.command_result import CommandResult
from core.errors.command_errors import CommandError, ExecutionError, TellError
from core.errors.math_errors import SplapError


class CommandState(Enum):
    """INIT -> EXECUTION -> TELL -> DONE, or one of the error states."""

    INIT = auto()
    EXECUTION = auto()
    TELL = auto()
    DONE = auto()

    INIT_ERROR = auto()
    EXECUTION_ERROR = auto()
    TELL_ERROR = auto()
    FAILED = auto()


_PHASE_ERR = {
    "INIT": CommandState.INIT_ERROR,
    "EXECUTION": CommandState.EXECUTION_ERROR,
    "TELL": CommandState.TELL_ERROR,
}

# an unexpected exception inside a numerical handler counts as a solver failure
_NUMERICAL_EXIT = 3


class Command:
    """
    One parsed subcommand, built by `command_factory.summon()`.

    `execute()` runs the handler, reports the outcome through the message
    catalog and always returns a `CommandResult`: numerical errors become
    failed results carrying their own exit code, and the wall time of the
    handler is attached as `payload["seconds"]`.
    """

    def __init__(self, ctx, name: str, raw: str, spec: Dict[str, Any], params: Dict[str, Any],
                 handler: Callable[..., Optional[CommandResult]], numerical: bool):
        self.ctx = ctx
        self.name = name
        self.raw = raw
        self.spec = spec
        self.params = params or {}
        self.handler = handler
        self.numerical = numerical
        self.state = CommandState.INIT

    @property
    def _messages(self) -> Dict[str, str]:
        return self.spec.get("messages") or {}

    def _error_key(self, code: Optional[str]) -> str:
        """Command-specific key, then `errors.<code>`, then the generic one."""
        if code and code in self._messages:
            return self._messages[code]
        if code and self.ctx.msg and self.ctx.msg.has(f"errors.{code}"):
            return f"errors.{code}"
        return self._messages.get("error") or "system.unexpected_error"

    def _report_error(self, error: Exception) -> None:
        params = getattr(error, "params", None) or {}
        self.ctx.log.key(self._error_key(getattr(error, "code", None)), **{"error": str(error), **params})
        for line in getattr(error, "trace", None) or []:
            self.ctx.log.key("errors.trace_line", line=line)

    def _report_result(self, result: CommandResult) -> None:
        key = self._messages.get(result.code)
        if key:
            self.ctx.log.key(key, **result.params)

    def _fail(self, phase: str, error: Exception, result: CommandResult) -> CommandResult:
        self.state = _PHASE_ERR.get(phase, CommandState.FAILED)
        self._report_error(error)
        return result

    def execute(self) -> CommandResult:
        self.state = CommandState.EXECUTION
        started = time.perf_counter()
        try:
            result = self.handler(self.ctx, **self.params)
        except SplapError as e:
            return self._fail("EXECUTION", e, CommandResult(
                code=e.code, outcome=False, params=e.params,
                payload={"trace": e.trace}, exit_code=e.exit_code))
        except CommandError as e:
            return self._fail(e.phase, e, CommandResult(
                code=e.code or "command_error", outcome=False, params=e.params, exit_code=1))
        except Exception as e:
            return self._fail("EXECUTION", ExecutionError(f"{type(e).__name__}: {e}"), CommandResult(
                code="unexpected_error", outcome=False, params={"error": str(e)},
                exit_code=_NUMERICAL_EXIT if self.numerical else 1))

        if result is None:
            result = CommandResult(code="success", outcome=True)
        seconds = time.perf_counter() - started
        result.payload.setdefault("seconds", seconds)

        self.state = CommandState.TELL
        try:
            self._report_result(result)
        except CommandError as e:
            return self._fail("TELL", e, CommandResult(code="tell_error", outcome=False, exit_code=1))
        except Exception as e:
            return self._fail("TELL", TellError(str(e)), CommandResult(code="tell_error", outcome=False, exit_code=1))

        self.ctx.log.debug(f"{self.name}: {result.code} in {seconds:.3f}s (exit {result.exit_code})")
        self.state = CommandState.DONE if result.outcome else CommandState.FAILED
        return result
