from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from functools import update_wrapper
from pathlib import Path
from typing import Any, Dict, Optional

from rich.markup import escape


class MsgLevel(str, Enum):
    """Severity of a console / log message."""
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    SUCCESS = "SUCCESS"
    DEBUG = "DEBUG"
    HELP = "HELP"


@dataclass
class ResolvedMessage:
    """
    Fully resolved message ready to render.

    Attributes:
        level: Message severity.
        badge: Short label shown before the text.
        color: Body color.
        text:  Final text, parameters substituted.
    """
    level: MsgLevel
    badge: str
    color: str
    text: str


class _SafeDict(dict):
    """Leaves unknown placeholders in place instead of raising."""
    def __missing__(self, key: str) -> str:
        return "{" + key + "}"


class MessageCatalog:
    """
    Message catalog loaded from `loc/<lang>/messages.json`.

    Keys are dotted paths (`exact1d.written`, `errors.nonexistent`); each
    leaf holds `text` with `{placeholders}` and optionally `level`, `badge`
    and `color`. Unknown keys render as the key itself.
    """
    def __init__(self, data: Dict[str, Any], lang: str = "en", version: str = "1.0") -> None:
        self.data = data
        self.lang = lang
        self.version = version
        self.default_level = MsgLevel.INFO

    @classmethod
    def from_file(cls, path: str | Path) -> "MessageCatalog":
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
        meta = raw.get("meta", {})
        return cls(raw, lang=meta.get("lang", "en"), version=meta.get("version", "1.0"))

    def has(self, key: str) -> bool:
        return self._lookup_node(key) is not None

    def get(self, key: str, /, **params: Any) -> ResolvedMessage:
        """
        Resolve a key and substitute `params` into its template.

        Numbers are formatted by the template's own format spec
        (`{value:.6g}`); a failing spec falls back to the raw template.
        """
        node = self._lookup_node(key)
        if node is None:
            return ResolvedMessage(self.default_level, self.default_level.value,
                                   LEVEL_BODY_COLOR[self.default_level], key)

        level = _coerce_level(node.get("level") or self.default_level.value)
        badge = node.get("badge") or level.value
        color = node.get("color") or LEVEL_BODY_COLOR[level]
        template = node.get("text") or key
        try:
            text = template.format_map(_SafeDict(params))
        except (ValueError, TypeError, IndexError):
            text = template
        return ResolvedMessage(level, badge, color, text)

    def _lookup_node(self, key: str) -> Optional[Dict[str, Any]]:
        node: Any = self.data
        for part in key.split("."):
            if not isinstance(node, dict) or part not in node:
                return None
            node = node[part]
        return node if isinstance(node, dict) and "text" in node else None


@dataclass
class FormatterFuncs:
    """
    Bundle of per-level formatting functions.

    Each takes (text, *, badge=None, body_style=None, timestamp=True) and
    returns rich markup.
    """
    info: Any
    warn: Any
    error: Any
    success: Any
    debug: Any
    help: Any


LEVEL_BODY_COLOR: Dict[MsgLevel, str] = {
    MsgLevel.INFO: "cyan",
    MsgLevel.WARNING: "yellow",
    MsgLevel.ERROR: "red",
    MsgLevel.SUCCESS: "green",
    MsgLevel.DEBUG: "magenta",
    MsgLevel.HELP: "white",
}


def _coerce_level(level_str: str) -> MsgLevel:
    ls = level_str.upper()
    if ls == "WARN":
        return MsgLevel.WARNING
    try:
        return MsgLevel(ls)
    except ValueError:
        return MsgLevel.INFO


def _timestamp() -> str:
    return datetime.now().strftime("%H:%M:%S")


# ---------------------------------------------------------------------
# Renderer
# ---------------------------------------------------------------------

def _render(level: MsgLevel, text: str, *, badge: Optional[str] = None,
            body_style: Optional[str] = None, timestamp: bool = True) -> str:
    """
    Render `[time] [BADGE]: text` as rich markup.

    The body text is escaped; square brackets in interval notation or
    trace lines print literally.
    """
    badge_text = badge or level.value
    color = body_style or LEVEL_BODY_COLOR[level]
    badge_markup = f"[bold {color}]{escape(badge_text)}[/]"
    body = f"[{color}]{escape(text)}[/]"
    if level is MsgLevel.HELP:
        return body
    ts = f"[dim]{_timestamp()}[/] " if timestamp else ""
    return f"{ts}{badge_markup}: {body}"


def _make_wrapper(level: MsgLevel):
    def wrapper(text: str = "", *, badge: Optional[str] = None,
                body_style: Optional[str] = None, timestamp: bool = True, **_: Any) -> str:
        return _render(level, text, badge=badge, body_style=body_style, timestamp=timestamp)
    wrapper.__name__ = f"format_{level.name.lower()}"
    wrapper.__doc__ = f"Format a {level.name} message."
    return update_wrapper(wrapper, _render, assigned=())


format_info = _make_wrapper(MsgLevel.INFO)
format_warning = _make_wrapper(MsgLevel.WARNING)
format_error = _make_wrapper(MsgLevel.ERROR)
format_success = _make_wrapper(MsgLevel.SUCCESS)
format_debug = _make_wrapper(MsgLevel.DEBUG)
format_help = _make_wrapper(MsgLevel.HELP)

DEFAULT_FORMATTERS = FormatterFuncs(
    info=format_info, warn=format_warning, error=format_error,
    success=format_success, debug=format_debug, help=format_help,
)
