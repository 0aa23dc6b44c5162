from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from core.errors.math_errors import DomainError, EigenError, RangeError
from core.log import log
from core.numerics.stencils import derivative, interior, signed_power


R0 = 1e-6          # series start
R_END = 4.0        # shooting horizon for the zero search
SAMPLES = 4001
BRACKET_LO = 1e-6
MAX_DOUBLINGS = 60


@dataclass(frozen=True)
class EigenPair:
    """
    First Dirichlet eigenpair of -Delta_p on the unit ball in R^N (radial).

    Attributes:
        N, p: dimension and exponent.
        lambda1: the eigenvalue.
        r: radial sample nodes on [0, 1].
        phi: phi_1(r), scaled so that phi(0) = normalization.
        dphi: phi_1'(r) on the same nodes.
        normalization: phi(0).
    """
    N: int
    p: float
    lambda1: float
    r: np.ndarray = field(repr=False, compare=False)
    phi: np.ndarray = field(repr=False, compare=False)
    dphi: np.ndarray = field(repr=False, compare=False)
    normalization: float = 1.0
    trace: tuple = field(default=(), repr=False, compare=False)

    def scaled(self, normalization: float) -> "EigenPair":
        k = normalization / self.normalization
        return EigenPair(self.N, self.p, self.lambda1, self.r, k * self.phi, k * self.dphi,
                         normalization, self.trace)

    @property
    def flux(self) -> np.ndarray:
        """r^(N-1) |phi'|^(p-2) phi'."""
        return self.r ** (self.N - 1) * signed_power(self.dphi, self.p - 1.0)


# ---------------------------------------------------------------------
# Shooting
# ---------------------------------------------------------------------

def _series(r, lam: float, N: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Leading terms at r = 0: phi, flux for phi(0) = 1."""
    r = np.asarray(r, dtype=float)
    c = (p - 1.0) / p * (lam / N) ** (1.0 / (p - 1.0))
    phi = 1.0 - c * r ** (p / (p - 1.0))
    q = -lam * r ** N / N
    return phi, q


def _rhs(lam: float, N: int, p: float):
    def f(r, y):
        phi, q = y
        dphi = signed_power(q / r ** (N - 1), 1.0 / (p - 1.0))
        dq = -lam * r ** (N - 1) * signed_power(phi, p - 1.0)
        return [dphi, dq]
    return f


def _first_zero(lam: float, N: int, p: float, r_end: float = R_END) -> float:
    """First zero of phi for a trial eigenvalue; r_end + 1 if there is none."""
    phi0, q0 = _series(R0, lam, N, p)
    hit = lambda r, y: y[0]
    hit.terminal = True
    hit.direction = -1
    sol = integrate.solve_ivp(_rhs(lam, N, p), (R0, r_end), [float(phi0), float(q0)],
                              method="DOP853", rtol=1e-12, atol=1e-14, events=hit)
    if sol.t_events[0].size:
        return float(sol.t_events[0][0])
    return r_end + 1.0


def solve_eigen(N: int, p: float, tol: float = 1e-10, samples: int = SAMPLES) -> EigenPair:
    """
    Shoot from r = 0 with phi(0) = 1, phi'(0) = 0 and root-find on lambda
    until the first zero of phi sits at r = 1.

    The bracket starts at [1e-6, 1] and its upper end doubles until the
    zero moves inside the unit ball.

    Raises:
        DomainError: N < 1 or p <= 1.
        EigenError: the bracket could not be closed; the trace lists every trial.
    """
    if N < 1 or int(N) != N:
        raise DomainError(f"N must be a positive integer (got {N})", params={"key": "N"})
    if not p > 1.0:
        raise DomainError(f"p must exceed 1 (got {p})", params={"key": "p"})
    if not tol > 0.0:
        raise DomainError(f"tol must be positive (got {tol})", params={"key": "tol"})
    N = int(N)

    h = lambda lam: _first_zero(lam, N, p) - 1.0
    trace: list[str] = []
    lo, hi = BRACKET_LO, 1.0
    h_lo = h(lo)
    trace.append(f"lambda={lo:.6g} zero-1={h_lo:.6g}")
    h_hi = h(hi)
    trace.append(f"lambda={hi:.6g} zero-1={h_hi:.6g}")
    for _ in range(MAX_DOUBLINGS):
        if h_hi < 0.0:
            break
        lo, h_lo = hi, h_hi
        hi *= 2.0
        h_hi = h(hi)
        trace.append(f"lambda={hi:.6g} zero-1={h_hi:.6g}")
    else:
        raise EigenError(f"eigenvalue bracket not found for N={N}, p={p:g}",
                         params={"N": N, "p": p}, trace=trace)
    if h_lo <= 0.0:
        raise EigenError(f"lower bracket end already has its zero inside the ball (N={N}, p={p:g})",
                         params={"N": N, "p": p}, trace=trace)
    log.debug(f"eigen N={N} p={p:g}: bracket [{lo:.6g}, {hi:.6g}] after {len(trace)} trials")

    lam = optimize.brentq(h, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)
    trace.append(f"brentq -> lambda={lam:.17g}")
    return _sample(lam, N, p, samples, tuple(trace))


def _sample(lam: float, N: int, p: float, samples: int, trace: tuple) -> EigenPair:
    phi0, q0 = _series(R0, lam, N, p)
    sol = integrate.solve_ivp(_rhs(lam, N, p), (R0, 1.0), [float(phi0), float(q0)],
                              method="DOP853", rtol=1e-12, atol=1e-14, dense_output=True)
    r = np.linspace(0.0, 1.0, samples)
    phi = np.empty_like(r)
    q = np.empty_like(r)
    near = r < R0
    phi[near], q[near] = _series(r[near], lam, N, p)
    y = sol.sol(r[~near])
    phi[~near], q[~near] = y[0], y[1]
    dphi = np.zeros_like(r)
    pos = r > 0.0
    dphi[pos] = signed_power(q[pos] / r[pos] ** (N - 1), 1.0 / (p - 1.0))
    return EigenPair(N=N, p=p, lambda1=float(lam), r=r, phi=phi, dphi=dphi,
                     normalization=1.0, trace=trace)


# ---------------------------------------------------------------------
# Evaluation and rescaling
# ---------------------------------------------------------------------

def eval_phi(pair: EigenPair, r):
    """
    phi_1 by monotone cubic interpolation of the samples.

    Raises:
        RangeError: r outside [0, 1].
    """
    rr = np.asarray(r, dtype=float)
    if np.any(rr < 0.0) or np.any(rr > 1.0):
        raise RangeError("eigenfunction is sampled on [0, 1]", params={"value": r, "lo": 0.0, "hi": 1.0})
    out = PchipInterpolator(pair.r, pair.phi)(rr)
    return float(out) if out.ndim == 0 else out


def eval_dphi(pair: EigenPair, r):
    rr = np.asarray(r, dtype=float)
    if np.any(rr < 0.0) or np.any(rr > 1.0):
        raise RangeError("eigenfunction is sampled on [0, 1]", params={"value": r, "lo": 0.0, "hi": 1.0})
    out = PchipInterpolator(pair.r, pair.dphi)(rr)
    return float(out) if out.ndim == 0 else out


def eigenvalue_on_ball(pair: EigenPair, R: float) -> float:
    """First eigenvalue on the ball of radius R: lambda1 R^(-p)."""
    if not R > 0.0:
        raise DomainError(f"radius must be positive (got {R})", params={"key": "R"})
    return pair.lambda1 * R ** (-pair.p)


def radial_residual(pair: EigenPair, R: float = 1.0, r_lo: float = 0.02, r_cut: float = 0.98) -> float:
    """
    sup |-(s^(N-1) |phi_R'|^(p-2) phi_R')' / s^(N-1) - lambda1 R^(-p) phi_R^(p-1)|
    over s = R r, r in [r_lo, r_cut], relative to the largest right-hand side.

    phi_R(s) = phi_1(s / R).
    """
    keep = (pair.r >= r_lo) & (pair.r <= r_cut)
    r = pair.r[keep]
    s = R * r
    dphi_R = pair.dphi[keep] / R
    flux = s ** (pair.N - 1) * signed_power(dphi_R, pair.p - 1.0)
    op = -derivative(s, flux) / interior(s) ** (pair.N - 1)
    rhs = eigenvalue_on_ball(pair, R) * signed_power(interior(pair.phi[keep]), pair.p - 1.0)
    return float(np.max(np.abs(op - rhs)) / np.max(np.abs(rhs)))


def sign_structure(pair: EigenPair) -> tuple[float, float]:
    """(min phi on [0, 1), max phi' on (0, 1]): positive and negative for a valid pair."""
    return float(np.min(pair.phi[:-1])), float(np.max(pair.dphi[1:]))


def cos_oracle(r) -> np.ndarray:
    """phi_1 for N = 1, p = 2."""
    return np.cos(0.5 * math.pi * np.asarray(r, dtype=float))


def sinc_oracle(r) -> np.ndarray:
    """phi_1 for N = 3, p = 2, with phi(0) = 1."""
    return np.sinc(np.asarray(r, dtype=float))


def bessel_oracle(order: int = 0) -> float:
    """Square of the first zero of J_0: lambda1 for N = 2, p = 2."""
    from scipy.special import jn_zeros
    return float(jn_zeros(order, 1)[0] ** 2)
