from core.controllers.command_result import CommandResult


def load_help_text(ctx) -> list[str]:
    """Lines of the help file named by `paths.help`."""
    path = ctx.path("paths.help", "assets/help.txt")
    with open(path, "r", encoding="utf-8") as f:
        return [line.rstrip("\n") for line in f]


def help_handler(ctx) -> CommandResult:
    """
    Handler for the 'help' command.

    Writes the help text line by line to stdout.
    """
    for line in load_help_text(ctx):
        ctx.presenter.help(line)
    return CommandResult(code="success", outcome=True)
