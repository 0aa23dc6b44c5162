"""
Half-line solutions of -(|v'|^(p-2) v')' = v^(-gamma), v(0) = 0.

For gamma > 1 every solution conserves the energy
    ((p-1)/p) v'^p - v^(1-gamma)/(gamma-1) = M >= 0
and is fixed by M through the quadrature identity
    int_0^v (M + s^(1-gamma)/(gamma-1))^(-1/p) ds = (p/(p-1))^(1/p) t.
M = 0 is the closed form v0 = A t^beta_u; M > 0 profiles grow linearly.
For gamma <= 1 there is no solution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from core.errors.math_errors import DomainError, NonexistenceError, RangeError
from core.log import log
from core.numerics.params import Params
from core.numerics.quadrature import ImplicitProfile
from core.numerics.stencils import derivative, interior


TABLE_POINTS = 2048
T_MAX = 100.0

# v'(0) is reported as this flag when gamma > 1
INFINITE_SLOPE = math.inf


# ---------------------------------------------------------------------
# Closed form
# ---------------------------------------------------------------------

def _require_exists(params: Params) -> None:
    if params.gamma <= 1.0:
        raise NonexistenceError(
            f"nonexistent (gamma<=1): no half-line solution for gamma={params.gamma:g}",
            params={"gamma": params.gamma, "p": params.p},
        )


def v0_constant(params: Params) -> float:
    """A in v0(t) = A t^beta_u."""
    _require_exists(params)
    p, g = params.p, params.gamma
    base = (g + p - 1.0) ** p / (p ** (p - 1.0) * (p - 1.0) * (g - 1.0))
    return base ** (1.0 / (g + p - 1.0))


def eval_v0(params: Params, t):
    """
    v0(t) = A t^(p/(gamma+p-1)).

    Raises:
        NonexistenceError: gamma <= 1.
        DomainError: negative t.
    """
    A = v0_constant(params)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("v0 is defined for t >= 0", params={"key": "t"})
    out = A * t ** params.beta_u
    return float(out) if out.ndim == 0 else out


def eval_v0_prime(params: Params, t):
    A = v0_constant(params)
    b = params.beta_u
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        out = A * b * t ** (b - 1.0)
    return float(out) if out.ndim == 0 else out


def asymptotic_slope(params: Params, M: float) -> float:
    """lim v_M'(t) = (M p / (p-1))^(1/p)."""
    return (M * params.p / (params.p - 1.0)) ** (1.0 / params.p)


# ---------------------------------------------------------------------
# Quadrature family
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSolution:
    """
    The solution v_M, tabulated on a graded grid.

    Attributes:
        params: exponents (gamma > 1).
        M: energy constant.
        t_max: last tabulated abscissa.
        t, v: the table (t[0] = v[0] = 0, both strictly increasing).
        profile: the implicit profile the table was built from; evaluation
            between nodes goes through it.
    """
    params: Params
    M: float
    t_max: float
    t: np.ndarray = field(compare=False, repr=False)
    v: np.ndarray = field(compare=False, repr=False)
    profile: ImplicitProfile = field(compare=False, repr=False)

    @property
    def v_prime(self) -> np.ndarray:
        return self.profile.slope(self.v)

    def energy_term(self, v):
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore"):
            return v ** (1.0 - self.params.gamma) / (self.params.gamma - 1.0)


def _energy_factor(params: Params, M: float):
    """phi with (M + s^(1-g)/(g-1))^(-1/p) = s^a phi(s), a = (g-1)/p."""
    g, p = params.gamma, params.p

    def phi(s: float) -> float:
        return ((g - 1.0) / (1.0 + M * (g - 1.0) * s ** (g - 1.0))) ** (1.0 / p)
    return phi


def build_vM(params: Params, M: float, t_max: float = T_MAX,
             points: int = TABLE_POINTS) -> QuadratureSolution:
    """
    Tabulate v_M on (0, t_max] by cumulative quadrature.

    Raises:
        NonexistenceError: gamma <= 1.
        DomainError: M < 0 or t_max <= 0.
        QuadratureError: a panel integral failed; the trace names it.
    """
    _require_exists(params)
    if M < 0.0 or not math.isfinite(M):
        raise DomainError(f"energy constant must be >= 0 (got {M})", params={"key": "M"})
    if t_max <= 0.0:
        raise DomainError(f"t_max must be positive (got {t_max})", params={"key": "t_max"})

    a = (params.gamma - 1.0) / params.p
    prof = ImplicitProfile.tabulate(_energy_factor(params, M), a, params.kappa, t_max, points,
                                    label=f"v_M[M={M:g}]")
    log.debug(f"build_vM {params.label()} M={M:g}: {len(prof.v)} nodes up to t={prof.t_max:.6g}")
    return QuadratureSolution(params=params, M=float(M), t_max=prof.t_max,
                              t=prof.t, v=prof.v, profile=prof)


def eval_vM(sol: QuadratureSolution, t) -> tuple:
    """
    (v(t), v'(t)); v' comes from the energy identity, +inf at t = 0.

    Accepts a scalar or an array of abscissae.

    Raises:
        RangeError: t outside [0, t_max].
    """
    scalar = np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    v = sol.profile.values(ts)
    vp = np.where(v > 0.0, sol.profile.slope(np.where(v > 0.0, v, 1.0)), INFINITE_SLOPE)
    if scalar:
        return float(v[0]), float(vp[0])
    return v, vp


def scaling_map(sol1: QuadratureSolution, lam: float) -> QuadratureSolution:
    """
    v_M(t) = lam^(-beta_u) v_1(lam t) with M = lam^((gamma-1) beta_u).

    Raises:
        DomainError: lam <= 0 or sol1 is not the M = 1 member.
    """
    if not (lam > 0.0 and math.isfinite(lam)):
        raise DomainError(f"scaling factor must be positive (got {lam})", params={"key": "lambda"})
    if sol1.M != 1.0:
        raise DomainError(f"scaling_map starts from M=1 (got M={sol1.M:g})", params={"key": "M"})
    params = sol1.params
    b = params.beta_u
    M = lam ** ((params.gamma - 1.0) * b)
    v = lam ** (-b) * sol1.v
    F = sol1.profile.F / lam
    prof = ImplicitProfile.from_nodes(_energy_factor(params, M), sol1.profile.a, params.kappa,
                                      v, F, label=f"v_M[M={M:g}]")
    return QuadratureSolution(params=params, M=M, t_max=prof.t_max, t=prof.t, v=prof.v, profile=prof)


# ---------------------------------------------------------------------
# Residuals
# ---------------------------------------------------------------------

def energy_residual(sol: QuadratureSolution, method: str = "identity") -> np.ndarray:
    """
    Relative energy defect at the tabulated points (v = 0 excluded).

    ((p-1)/p) v'^p - v^(1-gamma)/(gamma-1) - M, divided by
    1 + M + v^(1-gamma)/(gamma-1). With method="identity" v' is the
    derivative of the quadrature identity; with method="fd" it is a
    5-point difference quotient of the table (interior nodes only).
    """
    p = sol.params.p
    if method == "fd":
        v = interior(sol.v[1:])
        vp = derivative(sol.t[1:], sol.v[1:])
    else:
        v = sol.v[1:]
        vp = sol.profile.slope(v)
    term = sol.energy_term(v)
    return ((p - 1.0) / p * vp ** p - term - sol.M) / (1.0 + sol.M + term)


def ode_residual(sol: QuadratureSolution) -> np.ndarray:
    """
    Relative defect of -(v'^(p-1))' = v^(-gamma) on interior table nodes.

    The flux q = v'^(p-1) is differenced along v and carried to t by the
    chain rule; the result is -q_t v^gamma - 1.
    """
    p, g = sol.params.p, sol.params.gamma
    v = sol.v[1:]
    q = sol.profile.slope(v) ** (p - 1.0)
    dq_dv = derivative(v, q)
    vi = interior(v)
    dq_dt = dq_dv * sol.profile.slope(vi)
    return -dq_dt * vi ** g - 1.0


def v0_ode_residual(params: Params, points: int = TABLE_POINTS,
                    t_lo: float = 1e-6, t_hi: float = T_MAX) -> float:
    """
    sup of the relative residual of v0 on a geometric grid of `points` nodes,
    with the flux differenced directly in t.
    """
    t = np.geomspace(t_lo, t_hi, points)
    q = eval_v0_prime(params, t) ** (params.p - 1.0)
    ti = interior(t)
    lhs = -derivative(t, q)
    rhs = eval_v0(params, ti) ** (-params.gamma)
    return float(np.max(np.abs(lhs / rhs - 1.0)))


def identity_residual(sol: QuadratureSolution) -> float:
    return sol.profile.identity_residual()


def slope_defect(sol: QuadratureSolution, t: Optional[float] = None) -> float:
    """|v'(t) - asymptotic slope| at t (default t_max)."""
    t = sol.t_max if t is None else t
    _, vp = eval_vM(sol, t)
    return abs(vp - asymptotic_slope(sol.params, sol.M))


# ---------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------

class Existence(str, Enum):
    EXISTS = "Exists"
    NONEXISTENT = "Nonexistent"


@dataclass(frozen=True)
class NonexistenceReport:
    """
    Attributes:
        status: Exists / Nonexistent.
        witness: the diverging energy term in words.
        threshold: for gamma <= 1 and energy M, the value v* past which
            ((p-1)/p) v'^p = M + energy term would have to be negative.
        samples: (v, energy term) pairs at increasing v.
    """
    params: Params
    status: Existence
    witness: str
    M: float = 1.0
    threshold: Optional[float] = None
    samples: tuple = ()

    @property
    def exists(self) -> bool:
        return self.status is Existence.EXISTS


def nonexistence_diagnostic(params: Params, M: float = 1.0) -> NonexistenceReport:
    """
    Classify (p, gamma) and, when no solution exists, show why.

    For gamma < 1 the energy identity reads ((p-1)/p) v'^p = M - v^(1-gamma)/(1-gamma);
    the right side turns negative past v* = (M (1-gamma))^(1/(1-gamma)).
    For gamma = 1 it reads ((p-1)/p) v'^p = M - ln v, negative past v* = e^M.
    A positive solution is unbounded, so it reaches v* either way.
    """
    g = params.gamma
    vs = np.geomspace(1.0, 1e8, 9)
    if g > 1.0:
        return NonexistenceReport(params=params, status=Existence.EXISTS,
                                  witness="energy term v^(1-gamma)/(gamma-1) -> 0 as v -> inf", M=M)
    if g == 1.0:
        term = np.log(vs)
        return NonexistenceReport(params=params, status=Existence.NONEXISTENT,
                                  witness="ln v -> +inf", M=M, threshold=math.exp(min(M, 700.0)),
                                  samples=tuple(zip(vs.tolist(), term.tolist())))
    term = vs ** (1.0 - g) / (1.0 - g)
    return NonexistenceReport(params=params, status=Existence.NONEXISTENT,
                              witness="v^(1-gamma)/(1-gamma) -> +inf", M=M,
                              threshold=(max(M, 0.0) * (1.0 - g)) ** (1.0 / (1.0 - g)),
                              samples=tuple(zip(vs.tolist(), term.tolist())))


def growth_report(sol: QuadratureSolution, n: int = 6) -> list[tuple[float, float]]:
    """
    (t, v(t)/t) at n geometrically spaced t up to t_max.

    The ratio tends to 0 on the M = 0 branch and to the asymptotic slope
    for M > 0.
    """
    ts = np.geomspace(sol.t_max * 10.0 ** (1 - n), sol.t_max, n)
    v, _ = eval_vM(sol, ts)
    return [(float(t), float(vi / t)) for t, vi in zip(ts, v)]
