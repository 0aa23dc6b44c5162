from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from core.errors.math_errors import QuadratureError, RangeError
from core.log import log


EPSABS = 1e-14
EPSREL = 1e-12
LIMIT = 200


# ---------------------------------------------------------------------
# Implicit profiles  F(v) = int_0^v s^a phi(s) ds = kappa * t
# ---------------------------------------------------------------------

@dataclass
class ImplicitProfile:
    """
    A strictly increasing profile v(t) defined implicitly by a primitive.

    The integrand is split as s^a * phi(s) with a >= 0 and phi smooth and
    positive on [0, inf); the algebraic factor is integrated exactly by a
    weighted rule on the first panel, so the boundary layer at v = 0 costs
    nothing extra.

    Attributes:
        phi: smooth factor of the integrand.
        a: exponent of the algebraic factor at s = 0.
        kappa: constant multiplying t in the identity.
        v: tabulated values (v[0] = 0, strictly increasing).
        F: cumulative primitive at `v`.
        t: abscissae, F / kappa.
    """
    phi: Callable[[float], float]
    a: float
    kappa: float
    v: np.ndarray = field(default_factory=lambda: np.zeros(0))
    F: np.ndarray = field(default_factory=lambda: np.zeros(0))
    label: str = "profile"

    # construction
    @classmethod
    def tabulate(cls, phi, a: float, kappa: float, t_max: float, points: int,
                 band: Optional[tuple[float, float, float]] = None,
                 label: str = "profile") -> "ImplicitProfile":
        """
        Build the table up to t_max.

        Args:
            points: number of table nodes, v = 0 included.
            band: optional (lo, hi, spacing) in v where nodes are refined to
                at most `spacing`, joined to the geometric nodes at ratio 1.05.

        Raises:
            QuadratureError: a panel integral did not converge.
        """
        prof = cls(phi=phi, a=a, kappa=kappa, label=label)
        v_max = prof._solve_upper(kappa * t_max)
        nodes = np.geomspace(v_max * 1e-6, v_max, points - 1)
        if band is not None:
            q = nodes[1] / nodes[0]
            refined = _graded_band(*band, geometric_ratio=q)
            outside = (nodes < refined[0] / q) | (nodes > refined[-1] * q)
            nodes = np.union1d(nodes[outside], refined[refined < v_max])
        nodes = np.concatenate(([0.0], nodes))

        F = np.zeros_like(nodes)
        worst = (0.0, None)
        for i in range(1, len(nodes)):
            val, err = prof._panel(nodes[i - 1], nodes[i])
            F[i] = F[i - 1] + val
            if err > worst[0]:
                worst = (err, (nodes[i - 1], nodes[i]))
        prof.v, prof.F = nodes, F
        log.debug(f"{label}: {len(nodes)} nodes, v_max={v_max:.6g}, worst panel error {worst[0]:.2e}")
        return prof

    @classmethod
    def from_nodes(cls, phi, a: float, kappa: float, v, F, label: str = "profile") -> "ImplicitProfile":
        return cls(phi=phi, a=a, kappa=kappa, v=np.asarray(v, dtype=float),
                   F=np.asarray(F, dtype=float), label=label)

    # properties
    @property
    def t(self) -> np.ndarray:
        return self.F / self.kappa

    @property
    def t_max(self) -> float:
        return float(self.F[-1] / self.kappa)

    # integrals
    def integrand(self, s):
        s = np.asarray(s, dtype=float)
        return s ** self.a * np.vectorize(self.phi, otypes=[float])(s)

    def _panel(self, lo: float, hi: float) -> tuple[float, float]:
        if hi <= lo:
            return 0.0, 0.0
        if lo == 0.0 and self.a > 0.0:
            res = integrate.quad(self.phi, 0.0, hi, weight="alg", wvar=(self.a, 0.0),
                                 epsabs=EPSABS, epsrel=EPSREL, limit=LIMIT, full_output=1)
        else:
            a, phi = self.a, self.phi
            res = integrate.quad(lambda s: s ** a * phi(s), lo, hi,
                                 epsabs=EPSABS, epsrel=EPSREL, limit=LIMIT, full_output=1)
        # warnings with an error estimate inside tolerance are accepted
        if len(res) > 3 and res[1] > max(1e-12, 1e-9 * abs(res[0])):
            raise QuadratureError(
                f"{self.label}: integral did not converge on [{lo:.6g}, {hi:.6g}]",
                params={"lo": lo, "hi": hi},
                trace=[f"worst subinterval [{lo:.17g}, {hi:.17g}] abserr={res[1]:.3e}",
                       str(res[3]).strip()],
            )
        return float(res[0]), float(res[1])

    def primitive(self, v: float) -> float:
        """F(v) by an independent quadrature from 0 (no table)."""
        if v <= 0.0:
            return 0.0
        split = v * 1e-3
        return self._panel(0.0, split)[0] + self._panel(split, v)[0]

    def _solve_upper(self, target: float) -> float:
        hi = 1.0
        for _ in range(200):
            if self.primitive(hi) >= target:
                break
            hi *= 2.0
        else:
            raise QuadratureError(f"{self.label}: primitive stays below {target:.6g}",
                                  params={"target": target})
        lo = 0.0 if hi == 1.0 else hi / 2.0
        return optimize.brentq(lambda v: self.primitive(v) - target, lo, hi,
                               xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)

    # evaluation
    def value(self, t: float) -> float:
        """
        Invert the identity at t by a bracketed root solve seeded by the table.

        Raises:
            RangeError: t outside [0, t_max].
        """
        t = float(t)
        t_max = self.t_max
        if t < 0.0 or t > t_max * (1.0 + 1e-12):
            raise RangeError(f"t={t:.6g} outside [0, {t_max:.6g}]",
                             params={"value": t, "lo": 0.0, "hi": t_max})
        if t == 0.0:
            return 0.0
        target = self.kappa * t
        i = int(np.searchsorted(self.F, target))
        if i >= len(self.v):
            lo_i, hi_v = len(self.v) - 2, 2.0 * self.v[-1]
        else:
            lo_i, hi_v = max(i - 1, 0), self.v[i]
            if self.F[i] == target:
                return float(self.v[i])
        base, lo_v = self.F[lo_i], self.v[lo_i]
        return optimize.brentq(lambda v: base + self._panel(lo_v, v)[0] - target,
                               lo_v, hi_v, xtol=1e-15 * max(1.0, hi_v),
                               rtol=4 * np.finfo(float).eps, maxiter=200)

    def values(self, t) -> np.ndarray:
        return np.array([self.value(ti) for ti in np.atleast_1d(t)], dtype=float)

    def slope(self, v):
        """dv/dt = kappa / (v^a phi(v)); +inf at v = 0 when a > 0."""
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore"):
            return self.kappa / self.integrand(v)

    def identity_residual(self) -> float:
        """max_i |primitive(v_i) - kappa t_i| / max(1, kappa t_i) over the table."""
        worst = 0.0
        for vi, Fi in zip(self.v[1:], self.F[1:]):
            worst = max(worst, abs(self.primitive(vi) - Fi) / max(1.0, Fi))
        return worst


def _graded_band(lo: float, hi: float, spacing: float, geometric_ratio: float,
                 ratio: float = 1.05) -> np.ndarray:
    """
    Uniform nodes of `spacing` on [lo, hi], flanked by nodes whose spacing
    grows by `ratio` until it matches a geometric grid of ratio `geometric_ratio`.
    """
    core = np.arange(lo, hi + 0.5 * spacing, spacing)
    left, h, x = [], spacing, core[0]
    while x - h * ratio > 0.0 and h < x * (geometric_ratio - 1.0):
        h *= ratio
        x -= h
        left.append(x)
    right, h, x = [], spacing, core[-1]
    while h < x * (geometric_ratio - 1.0):
        h *= ratio
        x += h
        right.append(x)
    return np.concatenate((left[::-1], core, right))
