from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from core.errors.math_errors import ConfigError, DomainError


# ---------------------------------------------------------------------
# Function specs
# ---------------------------------------------------------------------

def _plateau(t, a, b):
    t = np.asarray(t, dtype=float)
    return np.where(t < a, -t, np.where(t <= b, -a, -t + (b - a)))

def _plateau_prime(t, a, b):
    t = np.asarray(t, dtype=float)
    return np.where((t >= a) & (t <= b), 0.0, -1.0)


# name -> (number of coefficients, value(t, *c), derivative(t, *c))
PRESETS: Dict[str, Tuple[int, Callable, Callable]] = {
    "zero":    (0, lambda t: np.zeros_like(t), lambda t: np.zeros_like(t)),
    "const":   (1, lambda t, a: np.full_like(t, a), lambda t, a: np.zeros_like(t)),
    "linear":  (1, lambda t, a: a * t, lambda t, a: np.full_like(t, a)),
    "power":   (2, lambda t, a, q: a * t ** q, lambda t, a, q: a * q * t ** (q - 1.0)),
    "inverse": (1, lambda t, a: a / t, lambda t, a: -a / t ** 2),
    "exp":     (2, lambda t, a, k: a * np.exp(-k * t), lambda t, a, k: -a * k * np.exp(-k * t)),
    "plateau": (2, _plateau, _plateau_prime),
}


@dataclass(frozen=True)
class FunctionSpec:
    """
    A scalar function on [0, inf) given by a named preset or by samples.

    Presets are listed in `PRESETS`; a tabulated spec interpolates its
    samples piecewise linearly and carries the Lipschitz constant implied by
    the largest sample slope.

    Text form (as accepted by `parse`): `name[:a,b,...]` or `table:path.csv`.
    """
    kind: str = "zero"
    coeffs: Tuple[float, ...] = ()
    samples_t: Optional[Tuple[float, ...]] = None
    samples_v: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if self.kind == "table":
            if not self.samples_t or len(self.samples_t) < 2:
                raise ConfigError("tabulated function needs at least two samples",
                                  params={"key": "table"})
            if len(self.samples_t) != len(self.samples_v or ()):
                raise ConfigError("tabulated function has ragged samples",
                                  params={"key": "table"})
            if np.any(np.diff(self.samples_t) <= 0):
                raise ConfigError("tabulated abscissae must increase strictly",
                                  params={"key": "table"})
            return
        if self.kind not in PRESETS:
            raise ConfigError(f"unknown function preset '{self.kind}'", params={"key": self.kind})
        arity = PRESETS[self.kind][0]
        if len(self.coeffs) != arity:
            raise ConfigError(f"preset '{self.kind}' takes {arity} coefficient(s)",
                              params={"key": self.kind})

    # construction
    @classmethod
    def parse(cls, text: str, base_dir: Optional[Path] = None) -> "FunctionSpec":
        """Parse `name[:a,b,...]`; `table:<csv>` reads `t,value` rows."""
        name, _, rest = text.strip().partition(":")
        name = name.strip().lower()
        if name == "table":
            path = Path(rest.strip())
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            return cls.from_table(path)
        try:
            coeffs = tuple(float(c) for c in rest.split(",") if c.strip())
        except ValueError as e:
            raise ConfigError(f"bad coefficient in '{text}'", params={"key": name}) from e
        return cls(kind=name, coeffs=coeffs)

    @classmethod
    def from_table(cls, path: Path) -> "FunctionSpec":
        try:
            with open(path, "r", encoding="utf-8", newline="") as f:
                rows = [r for r in csv.reader(f) if r and not r[0].startswith("#")]
        except OSError as e:
            raise ConfigError(f"cannot read table '{path}'", params={"key": "table"}) from e
        if rows and not _is_number(rows[0][0]):
            rows = rows[1:]
        ts = tuple(float(r[0]) for r in rows)
        vs = tuple(float(r[1]) for r in rows)
        return cls(kind="table", samples_t=ts, samples_v=vs)

    # evaluation
    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "table":
            return np.interp(t, self.samples_t, self.samples_v)
        return PRESETS[self.kind][1](t, *self.coeffs)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "table":
            ts = np.asarray(self.samples_t)
            slopes = np.diff(self.samples_v) / np.diff(ts)
            idx = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(slopes) - 1)
            return slopes[idx]
        return PRESETS[self.kind][2](t, *self.coeffs)

    @property
    def is_zero(self) -> bool:
        if self.kind == "zero":
            return True
        if self.kind in ("const", "linear", "inverse"):
            return self.coeffs[0] == 0.0
        return False

    @property
    def lipschitz(self) -> Optional[float]:
        """Lipschitz constant of a tabulated spec; None for presets."""
        if self.kind != "table":
            return None
        return float(np.max(np.abs(np.diff(self.samples_v) / np.diff(self.samples_t))))

    def describe(self) -> str:
        if self.kind == "table":
            return f"table[{len(self.samples_t)}]"
        if not self.coeffs:
            return self.kind
        return f"{self.kind}:{','.join(f'{c:g}' for c in self.coeffs)}"


ZERO = FunctionSpec()


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


# ---------------------------------------------------------------------
# Nonlinearity f(t) = coeff * t^(-gamma) + g(t)
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class Nonlinearity:
    """Right-hand side f(t) = coeff * t^(-gamma) + g(t); coeff = 0 drops the singular part."""
    coeff: float = 1.0
    gamma: float = 1.0
    g: FunctionSpec = ZERO

    def singular(self, t):
        t = np.asarray(t, dtype=float)
        if self.coeff == 0.0:
            return np.zeros_like(t)
        with np.errstate(divide="ignore"):
            return self.coeff * t ** (-self.gamma)

    def __call__(self, t):
        return self.singular(t) + self.g(t)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        sing = 0.0 if self.coeff == 0.0 else -self.gamma * self.coeff * t ** (-self.gamma - 1.0)
        return sing + self.g.derivative(t)

    def singular_integral(self, a, b):
        """Integral of the singular part over [a, b], 0 < a <= b."""
        if self.coeff == 0.0:
            return np.zeros_like(np.asarray(a, dtype=float))
        a = np.asarray(a, dtype=float)
        if self.gamma == 1.0:
            return self.coeff * np.log(b / a)
        e = 1.0 - self.gamma
        return self.coeff * (b ** e - a ** e) / e


# ---------------------------------------------------------------------
# Params
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class Params:
    """
    Exponents of -Delta_p u = u^(-gamma) + g(u) in dimension N.

    Attributes:
        p: p-Laplacian exponent, p > 1.
        gamma: singularity exponent, gamma > 0.
        N: spatial dimension, N >= 1.
        g: regular perturbation (zero by default).
    """
    p: float
    gamma: float
    N: int = 1
    g: FunctionSpec = field(default=ZERO)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and self.p > 1.0):
            raise DomainError(f"p must exceed 1 (got {self.p})", params={"key": "p"})
        if not (math.isfinite(self.gamma) and self.gamma > 0.0):
            raise DomainError(f"gamma must be positive (got {self.gamma})", params={"key": "gamma"})
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be a positive integer (got {self.N})", params={"key": "N"})

    @property
    def beta_u(self) -> float:
        """Boundary exponent p / (gamma + p - 1)."""
        return self.p / (self.gamma + self.p - 1.0)

    @property
    def beta_grad(self) -> float:
        """Gradient blow-up exponent (1 - gamma) / (gamma + p - 1)."""
        return (1.0 - self.gamma) / (self.gamma + self.p - 1.0)

    @property
    def kappa(self) -> float:
        """(p / (p - 1))^(1/p), the constant of the quadrature identity."""
        return (self.p / (self.p - 1.0)) ** (1.0 / self.p)

    @property
    def nonlinearity(self) -> Nonlinearity:
        return Nonlinearity(coeff=1.0, gamma=self.gamma, g=self.g)

    def f(self, t):
        return self.nonlinearity(t)

    @property
    def is_pure(self) -> bool:
        return self.g.is_zero

    def with_(self, **changes) -> "Params":
        data = {"p": self.p, "gamma": self.gamma, "N": self.N, "g": self.g}
        data.update(changes)
        return Params(**data)

    def label(self) -> str:
        return f"p={self.p:g} gamma={self.gamma:g} N={self.N}"
