import sys
from typing import List, Optional

from core.controllers.command_factory import summon_argv
from core.errors.command_errors import CommandError
from core.errors.math_errors import SplapError
from core.nexus import SplapNexus


USAGE_EXIT = 1


def run(argv: List[str], ctx: Optional[SplapNexus] = None) -> int:
    """
    Run one command line and return its exit code.

    0 success, 1 usage or config error, 2 nonexistence, 3 solver failure,
    4 acceptance-suite failure.
    """
    ctx = ctx or SplapNexus().bind_core()
    try:
        if not argv:
            ctx.log.key("system.no_command")
            return USAGE_EXIT
        try:
            cmd = summon_argv(argv, ctx)
        except CommandError as e:
            ctx.log.key(f"errors.{e.code}" if e.code else "errors.command_error", **e.params)
            return USAGE_EXIT
        except SplapError as e:
            ctx.log.key(f"errors.{e.code}", **e.params)
            return e.exit_code

        # usage was printed
        if cmd is None:
            return USAGE_EXIT
        return cmd.execute().exit_code
    finally:
        ctx.close()


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
