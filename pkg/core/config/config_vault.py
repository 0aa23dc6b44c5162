from __future__ import annotations
import copy
import json
import os
import shutil
import tempfile
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Union

DEFAULT_CONFIG: Dict[str, Any] = {
    "version": "0.2.0",
    "paths": {
        "help": "assets/help.txt",
        "messages": "loc/en/messages.json",
        "syslog": "logs/splap.log",
        "output": "out/",
        "reports": "tests/reports/",
        "config_keys_test": "tests/config.txt",
        "cmd_cases": "tests/cmd_cases.json"
    },
    "logging": True,
    "debug": False,
    "log": {"rotate": {"max_bytes": 262144, "backup_count": 5}},
    "exact1d": {"t_max": 100.0, "table_points": 2048},
    "eigen": {"tol": 1e-10, "samples": 4001},
    "barriers": {"harnack_constant": 10.0},
    "solver": {
        "nx": 128, "ny": 256, "rtol": 1e-9, "max_newton": 60,
        "delta_max": 1e-1, "delta_min": 1e-6
    },
    "analysis": {"ineq_trials": 100000},
    "sweep": {"workers": 4},
    "seed": 20240601
}

CONFIG_PATH = Path(__file__).resolve().parent.parent.parent / "config.json"

_MISSING = object()


def _walk(d: Dict[str, Any], path: str) -> Any:
    cur: Any = d
    for part in path.split("."):
        if not isinstance(cur, dict) or part not in cur:
            return _MISSING
        cur = cur[part]
    return cur


def _put(d: Dict[str, Any], path: str, value: Any) -> None:
    *parents, leaf = path.split(".")
    for part in parents:
        d = d.setdefault(part, {})
    d[leaf] = value


def _merge(base: Dict[str, Any], patch: Dict[str, Any]) -> Dict[str, Any]:
    out = dict(base)
    for k, v in (patch or {}).items():
        out[k] = _merge(out[k], v) if isinstance(v, dict) and isinstance(out.get(k), dict) else v
    return out


def _numeric_leaves(d: Dict[str, Any], prefix: str = "") -> Iterable[tuple]:
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _numeric_leaves(v, key + ".")
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            yield key, v


def _write_atomic(path: Path, data: Dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=path.name + ".", dir=str(path.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=4, ensure_ascii=False)
        shutil.move(tmp_name, str(path))
    finally:
        if os.path.exists(tmp_name):
            os.remove(tmp_name)


class ConfigVault:
    """
    Application settings for SPLap, stored as JSON with dotted keys.

    On load the file is merged over `DEFAULT_CONFIG`. Numerical settings whose
    value on disk is not a number (or is negative) fall back to the default,
    and each fallback is recorded in `problems` so the caller can report it
    once a log sink exists. An unreadable file falls back to the defaults as
    a whole.
    """

    def __init__(self, path: Union[str, Path] = CONFIG_PATH, defaults: Dict[str, Any] = DEFAULT_CONFIG):
        self._path = Path(path)
        self._defaults = defaults
        self._data: Dict[str, Any] = {}
        self.problems: List[str] = []
        self.load()

    def load(self) -> Dict[str, Any]:
        self.problems = []
        if not self._path.exists():
            self._data = copy.deepcopy(self._defaults)
            self.save()
            return self._data
        try:
            on_disk = json.loads(self._path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            self.problems.append(f"{self._path.name} is not valid JSON ({e.msg}, line {e.lineno}); using defaults")
            on_disk = {}
        self._data = _merge(copy.deepcopy(self._defaults), on_disk if isinstance(on_disk, dict) else {})
        self._repair_numbers()
        return self._data

    def _repair_numbers(self) -> None:
        for key, fallback in _numeric_leaves(self._defaults):
            value = _walk(self._data, key)
            ok = isinstance(value, (int, float)) and not isinstance(value, bool) and value >= 0
            if isinstance(fallback, int) and not isinstance(fallback, bool) and isinstance(value, float):
                ok = ok and value.is_integer()
            if not ok:
                self.problems.append(f"{key}={value!r} is not a valid number; using {fallback!r}")
                _put(self._data, key, fallback)

    def save(self) -> None:
        _write_atomic(self._path, self._data)

    # access
    def get(self, path: str, default: Any = None, cast: Optional[Callable[[Any], Any]] = None) -> Any:
        """
        Dotted lookup, e.g. `get("solver.ny", 256, int)`. A failed cast
        returns `default`.
        """
        val = _walk(self._data, path)
        if val is _MISSING:
            return default
        if cast is not None and val is not None:
            try:
                return cast(val)
            except (TypeError, ValueError):
                return default
        return val

    def missing(self, keys: Iterable[str]) -> List[str]:
        """Dotted keys from `keys` that are absent."""
        return [k for k in keys if _walk(self._data, k) is _MISSING]

    def resolve(self, key: str, default: str, base: Optional[Path] = None) -> Path:
        """A `paths.*` entry as a Path; relative entries resolve against `base` (the config file's folder by default)."""
        p = Path(self.get(key, default, str))
        return p if p.is_absolute() else (base or self._path.parent) / p

    def edit(self, key_or_patch: Union[str, Dict[str, Any]], value: Any = None) -> None:
        """Set one dotted key, or deep-merge a dict patch."""
        if isinstance(key_or_patch, dict):
            self._data = _merge(self._data, key_or_patch)
        elif isinstance(key_or_patch, str):
            _put(self._data, key_or_patch, value)
        else:
            raise TypeError("edit() expects a dict patch or a dotted key and a value.")

    def as_dict(self) -> Dict[str, Any]:
        return dict(self._data)

    @property
    def path(self) -> Path:
        return self._path
