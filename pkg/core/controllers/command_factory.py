from __future__ import annotations

import importlib
import shlex
from typing import Any, Dict, List, Optional, Tuple

from .command_core import Command
from core.errors.command_errors import ParseError, UnknownCommandError
from .registry import COMMANDS


def _resolve_import(path: str):
    """Import 'pkg.module.func' and return the attribute."""
    mod_path, _, attr = path.rpartition(".")
    if not mod_path:
        raise ParseError(f"Invalid import path: '{path}'")
    try:
        mod = importlib.import_module(mod_path)
    except ImportError as e:
        raise ParseError(f"Cannot import module '{mod_path}'. {e}") from e
    try:
        return getattr(mod, attr)
    except AttributeError as e:
        raise ParseError(f"Attribute '{attr}' not found in '{mod_path}'") from e


def _find_spec(name: str) -> Optional[dict]:
    """Registry entry by command name or alias."""
    if name in COMMANDS:
        return COMMANDS[name]
    return next((s for s in COMMANDS.values() if name in (s.get("aliases") or ())), None)


def _split_positionals(keys: List[str]) -> Tuple[List[str], Optional[str], bool]:
    """
    ['a', 'pairs*'] -> (['a'], 'pairs', False). A trailing '+' makes the
    variadic positional required, '*' makes it optional.
    """
    if keys and keys[-1][-1:] in ("+", "*"):
        return list(keys[:-1]), keys[-1][:-1], keys[-1][-1] == "+"
    return list(keys), None, False


def _parse_by_schema(argv: List[str], schema: Any) -> Dict[str, Any]:
    """
    Parse command arguments against a registry `params` schema:

        {
            "positionals": ["pairs*"],
            "options": {"--out": "out", "--list": {"to": "list_only", "flag": True}},
            "defaults": {...}
        }

    Options may appear anywhere, as `--opt value` or `--opt=value`; every
    other token fills the positionals in order, the variadic one last.
    """
    if not schema:
        return {}
    if not isinstance(schema, dict):
        raise ParseError("Unsupported schema type for params")

    fixed, variadic, required = _split_positionals(schema.get("positionals") or [])
    options: Dict[str, Any] = schema.get("options") or {}
    params: Dict[str, Any] = {k: None for k in fixed}
    params.update(schema.get("defaults") or {})

    collected: List[str] = []
    slot, i = 0, 0
    while i < len(argv):
        tok = argv[i]
        i += 1
        if tok.startswith("--"):
            name, eq, inline = tok.partition("=")
            opt = options.get(name)
            if opt is None:
                raise ParseError(f"Unknown option: {name}")
            if isinstance(opt, dict) and opt.get("flag"):
                if eq:
                    raise ParseError(f"Option {name} takes no value")
                params[opt.get("to") or name.lstrip("-")] = True
                continue
            dest = opt if isinstance(opt, str) else opt.get("to")
            if eq:
                value = inline
            elif i < len(argv) and not argv[i].startswith("--"):
                value = argv[i]
                i += 1
            else:
                raise ParseError(f"Missing value for option: {name}")
            params[dest] = value
        elif slot < len(fixed):
            params[fixed[slot]] = tok
            slot += 1
        elif variadic:
            collected.append(tok)
        else:
            raise ParseError(f"Unexpected argument: {tok}")

    if variadic:
        if required and not collected:
            raise ParseError(f"Expected at least one value for '{variadic}'")
        params[variadic] = collected
    return params


def summon_argv(argv: List[str], ctx, raw: Optional[str] = None) -> Optional[Command]:
    """
    Turn a tokenized command line into a ready-to-run Command.

    Looks the name up in the registry, prints the usage line and returns
    None for `--help` or a command that needs arguments but got none,
    otherwise parses the arguments and binds the handler.

    Raises:
        ParseError: empty input, bad arguments or a broken handler path.
        UnknownCommandError: no command or alias by that name.
    """
    if not argv:
        raise ParseError("Empty input")

    name, args = argv[0], list(argv[1:])
    spec = _find_spec(name)
    if not spec:
        raise UnknownCommandError(name)

    if (spec.get("require_args") and not args) or args in (["-h"], ["--help"]):
        ctx.log.key("usage.line", usage=spec.get("usage") or name)
        return None

    params = _parse_by_schema(args, spec.get("params"))

    handler_path = spec.get("handler")
    if not handler_path:
        raise ParseError(f"Missing handler path for command '{name}'")

    return Command(
        ctx=ctx,
        name=name,
        raw=raw if raw is not None else shlex.join(argv),
        spec=dict(spec),
        params=params,
        handler=_resolve_import(handler_path),
        numerical=bool(spec.get("numerical", False)),
    )


def summon(raw: str, ctx) -> Optional[Command]:
    """`summon_argv` for a raw input line, tokenized with shlex."""
    return summon_argv(shlex.split(raw), ctx, raw=raw)
