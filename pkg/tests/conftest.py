import json
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from core.log import log  # noqa: E402
from core.nexus import SplapNexus  # noqa: E402
from core.numerics.params import Params  # noqa: E402


class Capture:
    """Log sink that keeps (level, plain text) pairs."""

    def __init__(self) -> None:
        self.lines: list[tuple[str, str]] = []

    def __call__(self, rendered: str, *, level: str = "INFO", raw_text: str = "", **_) -> None:
        self.lines.append((str(level).upper(), raw_text))

    @property
    def texts(self) -> list[str]:
        return [t for _, t in self.lines]

    def joined(self) -> str:
        return "\n".join(self.texts)


@pytest.fixture
def nexus(tmp_path, monkeypatch):
    """
    Nexus bound to capture sinks, with output, reports and the log file
    redirected under tmp_path. `nexus.status` holds stderr lines,
    `nexus.stdout` the machine-readable ones.
    """
    monkeypatch.delenv("SPLAP_SEED", raising=False)
    cfg = json.loads((ROOT / "config.json").read_text(encoding="utf-8"))
    cfg["logging"] = False
    cfg["paths"].update(output=str(tmp_path / "out"), reports=str(tmp_path / "reports"),
                        syslog=str(tmp_path / "splap.log"))
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")

    status, stdout = Capture(), Capture()
    ctx = SplapNexus(config_path=path).bind_core(writer=status, out_writer=stdout)
    ctx.status, ctx.stdout = status, stdout
    yield ctx
    ctx.close()
    log.reset()


@pytest.fixture
def pure():
    """p = 2, gamma = 3: v0(t) = sqrt(2 t)."""
    return Params(p=2.0, gamma=3.0)


@pytest.fixture
def p3g2():
    return Params(p=3.0, gamma=2.0)
