from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Callable, Deque, Optional, TextIO, Tuple

from rich.console import Console
from rich.text import Text

from .message_styler import (
    MessageCatalog, FormatterFuncs, ResolvedMessage, MsgLevel,
    format_info, format_warning, format_error, format_success, format_debug, format_help
)

# A sink takes a rendered (rich markup) string plus metadata: level, raw_text.
Writer = Callable[..., None]


# ----------------------------
# Buffer payloads
# ----------------------------

@dataclass
class _PendingKey:
    """Catalog key emitted before a catalog was attached."""
    key: str
    kwargs: dict

@dataclass
class _PendingRendered:
    text: str
    level: str
    raw_text: str


class _Log:
    """
    Process-wide logging facade.

    Numerical modules import the module singleton `log` and call `log.debug`;
    the command layer resolves catalog keys with `log.key`. Nothing is
    printed until `configure` attaches a sink; earlier messages are buffered.

    Typical setup (done by the nexus):
        log.configure(writer=console_writer(), catalog=MessageCatalog.from_file(...),
                      debug=vault.get("debug", False, bool))
        log.configure_from_config(vault.as_dict())
    """
    def __init__(self, config=None) -> None:
        self.config = config
        self._catalog: Optional[MessageCatalog] = None
        self._formatters = FormatterFuncs(
            info=format_info, warn=format_warning, error=format_error,
            success=format_success, debug=format_debug, help=format_help
        )
        # debug lines are dropped unless enabled
        self.debug_enabled: bool = False

        self._buffer: Deque[Tuple[str, Any]] = deque(maxlen=512)
        self._sinks: list[Writer] = []

        self._file_handle: Optional[TextIO] = None
        self._rotate_max_bytes: Optional[int] = None
        self._rotate_backup_count: int = 0


    # ---------------------------------------------------------------------
    # Rendering helpers
    # ---------------------------------------------------------------------

    def _render_resolved(self, msg: ResolvedMessage) -> str:
        level_map = {
            MsgLevel.ERROR: self._formatters.error,
            MsgLevel.WARNING: self._formatters.warn,
            MsgLevel.SUCCESS: self._formatters.success,
            MsgLevel.DEBUG: self._formatters.debug,
            MsgLevel.HELP: self._formatters.help,
            MsgLevel.INFO: self._formatters.info,
        }
        fmt = level_map.get(msg.level, self._formatters.info)
        return fmt(msg.text, badge=msg.badge, body_style=msg.color)

    def _fanout(self, rendered: str, level: str, raw_text: str) -> None:
        """Write to every sink, or buffer when none is attached."""
        if not self._sinks:
            self._buffer.append(("rendered", _PendingRendered(rendered, level, raw_text)))
            return
        for sink in list(self._sinks):
            try:
                sink(rendered, level=level, raw_text=raw_text)
            except Exception:
                # a broken sink must not break the run
                pass


    # ---------------------------------------------------------------------
    # Configuration
    # ---------------------------------------------------------------------

    def set_writer(self, writer: Writer) -> None:
        """Attach an extra sink (tests use this to capture output)."""
        self._sinks.append(writer)
        self._flush()

    def remove_writer(self, writer: Writer) -> None:
        if writer in self._sinks:
            self._sinks.remove(writer)

    def set_catalog(self, catalog: MessageCatalog) -> None:
        self._catalog = catalog
        self._flush()

    def configure(self, *, writer: Writer, catalog: MessageCatalog, debug: bool = False) -> None:
        """
        Attach the console sink and the catalog.

        Args:
            writer: sink accepting (rendered, level=..., raw_text=...).
            catalog: message catalog loaded from loc/<lang>/messages.json.
            debug: let `debug` lines through.
        """
        self._sinks.append(writer)
        self._catalog = catalog
        self.debug_enabled = debug
        self._flush()

    def configure_from_config(self, cfg: dict[str, Any]) -> None:
        """
        Enable the plain-text file sink when `logging` is true.

        Expected structure:
            {
              "logging": true,
              "paths": { "syslog": "logs/splap.log" },
              "log": { "rotate": { "max_bytes": 524288, "backup_count": 3 } }
            }
        """
        if not cfg.get("logging") or self._file_handle:
            return
        path = (cfg.get("paths") or {}).get("syslog") or "logs/splap.log"
        rot = (cfg.get("log") or {}).get("rotate") or {}
        self._rotate_max_bytes = int(rot.get("max_bytes") or 0) or None
        self._rotate_backup_count = int(rot.get("backup_count") or 0)

        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        self._file_handle = open(path, "a", encoding="utf-8")
        self._sinks.append(self._write_file)

    def reset(self) -> None:
        """Detach sinks and catalog; closes the file sink."""
        self.close()
        self._sinks.clear()
        self._buffer.clear()
        self._catalog = None
        self.debug_enabled = False


    # ---------------------------------------------------------------------
    # File rotation & writing
    # ---------------------------------------------------------------------

    def _maybe_rotate_file(self) -> None:
        """
        Rotate when the file exceeds the size limit:

            splap.log -> splap.log.1 -> splap.log.2 -> ...
        """
        if not (self._file_handle and self._rotate_max_bytes):
            return
        path = self._file_handle.name
        try:
            if os.path.getsize(path) < self._rotate_max_bytes:
                return
            self._file_handle.close()
            self._file_handle = None
            if self._rotate_backup_count > 0:
                for i in range(self._rotate_backup_count - 1, 0, -1):
                    src, dst = f"{path}.{i}", f"{path}.{i + 1}"
                    if os.path.exists(src):
                        os.replace(src, dst)
                os.replace(path, f"{path}.1")
            else:
                open(path, "w").close()
        except OSError:
            pass
        finally:
            if self._file_handle is None:
                self._file_handle = open(path, "a", encoding="utf-8")

    def _write_file(self, rendered: str, **meta) -> None:
        if not self._file_handle:
            return
        ts = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        lvl = (meta.get("level") or "INFO").upper()
        raw = meta.get("raw_text")
        if raw is None:
            raw = Text.from_markup(rendered).plain
        self._maybe_rotate_file()
        self._file_handle.write(f"[{ts}] [{lvl}] {raw}\n")
        self._file_handle.flush()

    def close(self) -> None:
        if self._file_handle:
            try:
                self._file_handle.close()
            finally:
                if self._write_file in self._sinks:
                    self._sinks.remove(self._write_file)
                self._file_handle = None


    # ---------------------------------------------------------------------
    # Public logging API
    # ---------------------------------------------------------------------

    def key(self, key: str, /, **params: Any) -> None:
        """
        Write by catalog key; level and style come from the catalog entry.

        Keys emitted before a catalog is attached are buffered and resolved
        on `set_catalog` / `configure`.
        """
        if not self._catalog:
            self._buffer.append(("key", _PendingKey(key, params)))
            return
        msg = self._catalog.get(key, **params)
        if msg.level is MsgLevel.DEBUG and not self.debug_enabled:
            return
        self._fanout(self._render_resolved(msg), msg.level.value, msg.text)

    def info(self, text: str, **kwargs: Any) -> None:
        self._emit("info", text, **kwargs)

    def warn(self, text: str, **kwargs: Any) -> None:
        self._emit("warn", text, **kwargs)

    def error(self, text: str, **kwargs: Any) -> None:
        self._emit("error", text, **kwargs)

    def success(self, text: str, **kwargs: Any) -> None:
        self._emit("success", text, **kwargs)

    def debug(self, text: str, **kwargs: Any) -> None:
        if self.debug_enabled:
            self._emit("debug", text, **kwargs)

    def help(self, text: str, **kwargs: Any) -> None:
        self._emit("help", text, timestamp=False, **kwargs)


    # ---------------------------------------------------------------------
    # Internal
    # ---------------------------------------------------------------------

    def _emit(self, level: str, text: str, **kwargs: Any) -> None:
        fmt = getattr(self._formatters, level, self._formatters.info)
        self._fanout(fmt(text, **kwargs), level.upper(), text)

    def _flush(self) -> None:
        """Drain the buffer once both a sink and (for keys) a catalog exist."""
        if not self._sinks:
            return
        pending: Deque[Tuple[str, Any]] = deque()
        while self._buffer:
            kind, payload = self._buffer.popleft()
            if kind == "key":
                if not self._catalog:
                    pending.append((kind, payload))
                    continue
                self.key(payload.key, **payload.kwargs)
            else:
                self._fanout(payload.text, payload.level, payload.raw_text)
        self._buffer.extend(pending)


def console_writer(console: Optional[Console] = None) -> Writer:
    """Sink printing rich markup to stderr."""
    console = console or Console(stderr=True, highlight=False, soft_wrap=True)

    def write(rendered: str, **meta) -> None:
        console.print(rendered)
    return write


log = _Log(config=None)
