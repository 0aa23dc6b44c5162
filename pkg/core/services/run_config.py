from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

from core.errors.math_errors import ConfigError
from core.numerics.params import FunctionSpec, Params


# ---------------------------------------------------------------------
# Value parsers
# ---------------------------------------------------------------------

def _float(text: str) -> float:
    return float(text)

def _int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"{text!r} is not an integer")
    return int(value)

def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{text!r} is not a boolean")

def _floats(text: str) -> Tuple[float, ...]:
    parts = [s for s in text.replace(";", ",").split(",") if s.strip()]
    if not parts:
        raise ValueError("empty list")
    return tuple(float(s) for s in parts)

def _str(text: str) -> str:
    return text.strip()


PARSERS: Dict[str, Callable[[str], Any]] = {
    "float": _float,
    "int": _int,
    "bool": _bool,
    "floats": _floats,
    "str": _str,
}


@dataclass(frozen=True)
class ConfigKey:
    """
    One accepted key of a subcommand.

    Attributes:
        kind: float | int | bool | floats | str | function | choice.
        default: used when neither file nor command line sets the key.
        setting: dotted ConfigVault path whose value replaces `default`.
        choices: allowed values for kind "choice".
    """
    kind: str
    default: Any = None
    setting: Optional[str] = None
    choices: Tuple[str, ...] = ()


def _k(kind: str, default: Any = None, setting: Optional[str] = None, choices: Iterable[str] = ()) -> ConfigKey:
    return ConfigKey(kind=kind, default=default, setting=setting, choices=tuple(choices))


_COMMON = {
    "p": _k("float", 2.0),
    "gamma": _k("float", 3.0),
    "N": _k("int", 1),
    "g": _k("function", "zero"),
    "seed": _k("int", 0, "seed"),
}

SCHEMAS: Dict[str, Dict[str, ConfigKey]] = {
    "exact1d": {
        **_COMMON,
        "M": _k("float", 0.0),
        "t_max": _k("float", 100.0, "exact1d.t_max"),
        "points": _k("int", 2048, "exact1d.table_points"),
        "residual": _k("choice", "identity", choices=("identity", "fd")),
    },
    "solve": {
        **_COMMON,
        "height": _k("float", 1.0),
        "period": _k("float", 1.0),
        "nx": _k("int", 128, "solver.nx"),
        "ny": _k("int", 256, "solver.ny"),
        "grading": _k("float", None),
        "top": _k("choice", "v0", choices=("v0", "const", "vM", "neumann")),
        "top_value": _k("float", 1.0),
        "top_slope": _k("float", 1.0),
        "M": _k("float", 1.0),
        "s": _k("float", 1.0),
        "eps": _k("float", 0.0),
        "perturbation": _k("float", 0.0),
        "mode": _k("int", 1),
        "rtol": _k("float", 1e-9, "solver.rtol"),
        "max_newton": _k("int", 60, "solver.max_newton"),
        "delta_max": _k("float", 1e-1, "solver.delta_max"),
        "delta_min": _k("float", 1e-6, "solver.delta_min"),
    },
    "sweep": {
        "p": _k("floats", (2.0,)),
        "gamma": _k("floats", (3.0,)),
        "M": _k("floats", (0.0,)),
        "g": _k("function", "zero"),
        "seed": _k("int", 0, "seed"),
        "t_max": _k("float", 100.0, "exact1d.t_max"),
        "points": _k("int", 2048, "exact1d.table_points"),
        "workers": _k("int", 4, "sweep.workers"),
    },
    "eigen": {
        "N": _k("int", 1),
        "p": _k("float", 2.0),
        "R": _k("float", 1.0),
        "tol": _k("float", 1e-10, "eigen.tol"),
        "samples": _k("int", 4001, "eigen.samples"),
        "seed": _k("int", 0, "seed"),
    },
    "barrier": {
        **_COMMON,
        "kind": _k("choice", "v0_shift",
                   choices=("wmu", "eigen_power", "linear_lower", "annulus", "v0_shift")),
        "rho": _k("float", 1.0),
        "c": _k("float", 1.0),
        "mu": _k("float", 1.0),
        "f": _k("function", "zero"),
        "c0": _k("float", 1.0),
        "t0": _k("float", 1.0),
        "R": _k("float", 1.0),
        "u0": _k("float", 1.0),
        "CH": _k("float", 10.0, "barriers.harnack_constant"),
        "s": _k("float", 1.0),
        "eps": _k("float", 0.0),
        "height": _k("float", 1.0),
    },
    "check": {
        "tol_scale": _k("float", 1.0),
        "seed": _k("int", 0, "seed"),
        "trials": _k("int", 100000, "analysis.ineq_trials"),
    },
}


# ---------------------------------------------------------------------
# RunConfig
# ---------------------------------------------------------------------

@dataclass
class RunConfig:
    """
    Per-run settings: defaults <- config file <- command line (CLI wins);
    SPLAP_SEED overrides `seed`.

    Attributes:
        command: subcommand the keys belong to.
        values: resolved key -> typed value.
        sources: key -> "default" | "<file>:<line>" | "cli" | "env".
        base_dir: directory that relative table paths resolve against.
    """
    command: str
    values: Dict[str, Any] = field(default_factory=dict)
    sources: Dict[str, str] = field(default_factory=dict)
    base_dir: Optional[Path] = None

    @classmethod
    def build(cls, ctx, command: str, pairs: Optional[List[str]] = None,
              config_file: Optional[str] = None) -> "RunConfig":
        """
        Raises:
            ConfigError: unknown key, malformed line (1-based line number in
                the message and params), or a value of the wrong type.
        """
        schema = SCHEMAS[command]
        base_dir = Path(getattr(ctx, "base_dir", Path.cwd()))
        rc = cls(command=command, base_dir=base_dir)

        for key, spec in schema.items():
            default = spec.default
            if spec.setting is not None and ctx is not None:
                default = ctx.config.get(spec.setting, default)
            rc._store(key, default, "default", parse=False)

        if config_file:
            path = Path(config_file)
            if not path.is_absolute():
                path = Path.cwd() / path
            try:
                lines = path.read_text(encoding="utf-8").splitlines()
            except OSError as e:
                raise ConfigError(f"cannot read config file {config_file}: {e}", params={"key": "--config"})
            rc.base_dir = path.parent
            for lineno, line in enumerate(lines, start=1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                rc._assign(text, f"{config_file}:{lineno}", lineno)

        for pair in pairs or []:
            rc._assign(pair, "cli", None)

        if "seed" in schema and ctx is not None:
            if os.environ.get("SPLAP_SEED", "").strip():
                rc.values["seed"] = ctx.seed
                rc.sources["seed"] = "env"
        return rc

    # parsing
    def _assign(self, text: str, source: str, lineno: Optional[int]) -> None:
        where = f" (line {lineno})" if lineno is not None else ""
        if "=" not in text:
            raise ConfigError(f"malformed entry {text!r}{where}: expected key=value",
                              params={"key": text, "line": lineno})
        key, raw = (s.strip() for s in text.split("=", 1))
        if key not in SCHEMAS[self.command]:
            raise ConfigError(f"unknown key '{key}' for {self.command}{where}",
                              params={"key": key, "line": lineno})
        try:
            self._store(key, raw, source, parse=True)
        except ConfigError as e:
            raise ConfigError(f"bad value for '{key}'{where}: {e}", params={"key": key, "line": lineno}) from e
        except (ValueError, TypeError) as e:
            raise ConfigError(f"bad value for '{key}'{where}: {e}", params={"key": key, "line": lineno}) from e

    def _store(self, key: str, value: Any, source: str, *, parse: bool) -> None:
        spec = SCHEMAS[self.command][key]
        if parse:
            value = self._parse(spec, key, value)
        elif spec.kind == "function" and isinstance(value, str):
            value = FunctionSpec.parse(value, self.base_dir)
        elif spec.kind == "floats" and isinstance(value, (int, float)):
            value = (float(value),)
        elif spec.kind == "floats" and isinstance(value, list):
            value = tuple(float(v) for v in value)
        self.values[key] = value
        self.sources[key] = source

    def _parse(self, spec: ConfigKey, key: str, raw: str) -> Any:
        if spec.kind == "function":
            return FunctionSpec.parse(raw, self.base_dir)
        if spec.kind == "choice":
            if raw not in spec.choices:
                raise ValueError(f"{raw!r} is not one of {', '.join(spec.choices)}")
            return raw
        if spec.kind == "float" and raw.lower() in ("none", ""):
            return None
        return PARSERS[spec.kind](raw)

    # access
    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self.values.get(key, default)

    def explicit(self, key: str) -> bool:
        """True when the key came from a file, the command line or the environment."""
        return self.sources.get(key, "default") != "default"

    @property
    def seed(self) -> int:
        return int(self.values.get("seed", 0))

    def params(self, **overrides: Any) -> Params:
        """Params(p, gamma, N, g) from the resolved keys."""
        data = {"p": self.get("p"), "gamma": self.get("gamma"),
                "N": self.get("N", 1), "g": self.get("g")}
        data.update(overrides)
        return Params(**data)

    def describe(self) -> str:
        parts = []
        for key in sorted(self.values):
            value = self.values[key]
            if isinstance(value, FunctionSpec):
                value = value.describe()
            parts.append(f"{key}={value}")
        return " ".join(parts)
