from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Optional

from rich.console import Console

from core.config.config_vault import ConfigVault
from core.errors.math_errors import ConfigError
from core.log import _Log, console_writer, log as numerics_log
from core.message_styler import MessageCatalog


class SplapNexus:
    """
    Context nexus for SPLap that grants access to settings and tools across the app:
      - __init__: load configuration only
      - bind_core: attach the message catalog and the two log facades
        (`log` for status on stderr, `presenter` for results on stdout)
    """

    # construction
    def __init__(self, config_path: Optional[Path] = None) -> None:
        self.base_dir = Path(__file__).resolve().parent.parent
        self.config = ConfigVault(path=config_path or self.base_dir / "config.json")

        self.msg: Optional[MessageCatalog] = None
        self.log: Optional[_Log] = None
        self.presenter: Optional[_Log] = None

        # phase flags
        self._core_bound: bool = False

    # binding phases
    def bind_core(self, *, writer: Any = None, out_writer: Any = None) -> "SplapNexus":
        """
        Wire the catalog and the log facades.

        Args:
            writer: status sink; defaults to a rich console on stderr.
            out_writer: result sink; defaults to a rich console on stdout.
        """
        if self._core_bound:
            raise RuntimeError("Core already bound. Call bind_core only once.")
        self.msg = MessageCatalog.from_file(self.path("paths.messages", "loc/en/messages.json"))
        debug = self.config.get("debug", False, bool)

        # the numerics modules log through the module singleton
        self.log = numerics_log
        self.log.reset()
        self.log.configure(writer=writer or console_writer(), catalog=self.msg, debug=debug)
        cfg = self.config.as_dict()
        if cfg.get("logging"):
            cfg = {**cfg, "paths": {**cfg.get("paths", {}), "syslog": str(self.path("paths.syslog", "logs/splap.log"))}}
        self.log.configure_from_config(cfg)

        self.presenter = _Log(config=self.config)
        self.presenter.configure(writer=out_writer or console_writer(Console(highlight=False, soft_wrap=True)),
                                 catalog=self.msg, debug=debug)
        for problem in self.config.problems:
            self.log.warn(f"config: {problem}")
        self._core_bound = True
        return self

    # convenience helpers
    def path(self, key: str, default: str) -> Path:
        """Config path resolved against the repository root."""
        return self.config.resolve(key, default, self.base_dir)

    @property
    def out_dir(self) -> Path:
        return self.path("paths.output", "out/")

    @property
    def seed(self) -> int:
        """SPLAP_SEED wins over the configured seed."""
        env = os.environ.get("SPLAP_SEED")
        if env is not None and env.strip():
            try:
                return int(env)
            except ValueError:
                raise ConfigError(f"SPLAP_SEED must be an integer (got {env!r})", params={"key": "SPLAP_SEED"})
        return self.config.get("seed", 0, int)

    @property
    def ready(self) -> bool:
        return self._core_bound

    def close(self) -> None:
        if self.log is not None:
            self.log.close()
