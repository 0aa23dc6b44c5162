"""
Explicit sub- and supersolutions and their numerical validation.

Every barrier is a radial or one-dimensional profile w; it solves
-Delta_p w = rhs exactly and is claimed to satisfy -Delta_p w >= target
(supersolutions) or <= target (subsolutions) on its region. Validation
applies the operator in flux form to the stored slopes,

    -(x^(d-1) |w'|^(p-2) w')' / x^(d-1),

with d = 1 for profiles in x_N and d = N for radial ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np

from core.errors.math_errors import ConfigError, DomainError, DominationError, NonexistenceError
from core.log import log
from core.numerics.eigen_radial import EigenPair, eval_dphi, eval_phi
from core.numerics.exact1d import eval_v0, eval_v0_prime
from core.numerics.params import FunctionSpec, Nonlinearity, Params
from core.numerics.quadrature import ImplicitProfile
from core.numerics.stencils import derivative, interior, signed_power


VALIDATION_TOL = 1e-5
HARNACK_CONSTANT = 10.0
EIGEN_SAFETY = 1e-3
BLEND_START = 0.9
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


class BarrierKind(str, Enum):
    WMU = "WMu"
    EIGEN_POWER = "EigenPower"
    LINEAR_LOWER = "LinearLower"
    FUNDAMENTAL = "Fundamental"
    LOGARITHMIC = "Logarithmic"
    V0_SHIFT = "V0Shift"


class Sense(str, Enum):
    SUB = "Sub"
    SUPER = "Super"


@dataclass(frozen=True)
class Region:
    """Interval of the profile variable: `x_N` for strips, `r` for balls/annuli."""
    axis: str
    lo: float
    hi: float

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x >= self.lo) & (x <= self.hi)


Profile = Callable[[np.ndarray], np.ndarray]
Source = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Barrier:
    """
    A tagged barrier.

    Attributes:
        kind, sense: what it is and which inequality it claims.
        p, dim: exponent and the weight dimension of the radial operator.
        params: problem exponents, when the barrier belongs to one.
        coeffs: kind-specific constants (mu, rho, c / s, R0 / R, C, t0 / c, k, R, x0 ...).
        region: validity region.
        nodes: default validation grid.
        value, slope: profile and its derivative as callables.
        rhs: what -Delta_p w equals, as a function of (x, w).
        target: what it is compared against, as a function of (x, w).
    """
    kind: BarrierKind
    sense: Sense
    p: float
    dim: int
    coeffs: dict
    region: Region
    nodes: np.ndarray = field(repr=False, compare=False)
    value: Profile = field(repr=False, compare=False)
    slope: Profile = field(repr=False, compare=False)
    rhs: Source = field(repr=False, compare=False)
    target: Source = field(repr=False, compare=False)
    params: Optional[Params] = None

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class BarrierReport:
    """
    Result of `validate_barrier`.

    margins are signed and relative (scale max(|target|, 1)): positive where
    the claimed inequality holds with room, negative where it is violated.
    """
    kind: BarrierKind
    sense: Sense
    nodes: np.ndarray = field(repr=False)
    operator: np.ndarray = field(repr=False)
    margins: np.ndarray = field(repr=False)
    equation_residual: float
    worst_violation: float
    worst_node: float
    dropped: int = 0

    def passed(self, tol: float = VALIDATION_TOL) -> bool:
        return self.worst_violation <= tol and self.equation_residual <= tol


def validate_barrier(b: Barrier, grid=None) -> BarrierReport:
    """
    Apply -Delta_p to the barrier on a grid and compare with its claim.

    Args:
        b: the barrier.
        grid: strictly increasing nodes in the profile variable; defaults to
            `b.nodes`. Nodes outside `b.region` are dropped and counted.
    """
    x = b.nodes if grid is None else np.asarray(grid, dtype=float)
    inside = b.region.contains(x)
    dropped = int(np.count_nonzero(~inside))
    x = x[inside]

    weight = x ** (b.dim - 1) if b.dim > 1 else np.ones_like(x)
    flux = weight * signed_power(b.slope(x), b.p - 1.0)
    xi = interior(x)
    op = -derivative(x, flux) / interior(weight)

    w = b.value(xi)
    rhs = b.rhs(xi, w)
    target = b.target(xi, w)
    eq = float(np.max(np.abs(op - rhs) / np.maximum(np.abs(rhs), 1.0)))
    scale = np.maximum(np.abs(target), 1.0)
    margins = (op - target) / scale if b.sense is Sense.SUPER else (target - op) / scale
    k = int(np.argmin(margins))
    report = BarrierReport(kind=b.kind, sense=b.sense, nodes=xi, operator=op, margins=margins,
                           equation_residual=eq, worst_violation=max(0.0, -float(margins[k])),
                           worst_node=float(xi[k]), dropped=dropped)
    log.debug(f"validate {b.kind.value}: {len(xi)} nodes, equation {eq:.2e}, "
              f"worst violation {report.worst_violation:.2e} at {report.worst_node:.6g}")
    return report


# ---------------------------------------------------------------------
# w_mu supersolution on strips
# ---------------------------------------------------------------------

def _smoothstep(tau):
    tau = np.clip(tau, 0.0, 1.0)
    return tau ** 3 * (10.0 - 15.0 * tau + 6.0 * tau ** 2)


@dataclass(frozen=True)
class WMuKernel:
    """
    h and H = int_rho^t h for the w_mu construction.

    h = sigma + K on (0, 0.9 rho], where sigma is the singular part of f and
    K = 1 + max g+ on (0, rho); a quintic blend to c/t^2 on [0.9 rho, rho];
    c/t^2 beyond.
    """
    p: float
    rho: float
    c: float
    mu: float
    f: Nonlinearity
    K: float

    @property
    def t_b(self) -> float:
        return BLEND_START * self.rho

    def _inner(self, t):
        return self.f.singular(t) + self.K

    def _blend(self, t):
        S = _smoothstep((t - self.t_b) / (self.rho - self.t_b))
        return (1.0 - S) * self._inner(t) + S * self.c / t ** 2

    def h(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(t < self.t_b, self._inner(t),
                            np.where(t < self.rho, self._blend(t), self.c / t ** 2))

    def _blend_integral(self, a: float, b: float) -> float:
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        return float(half * np.dot(_GL_W, self._blend(mid + half * _GL_X)))

    def H(self, t: float) -> float:
        rho, tb = self.rho, self.t_b
        if t >= rho:
            return self.c / rho - self.c / t
        if t >= tb:
            return -self._blend_integral(t, rho)
        if t <= 0.0:
            if self.f.coeff > 0.0 and self.f.gamma >= 1.0:
                return -math.inf
            t = 0.0
        H_b = -self._blend_integral(tb, rho)
        with np.errstate(divide="ignore"):
            sing = float(self.f.singular_integral(t, tb)) if t > 0.0 else (
                self.f.coeff * tb ** (1.0 - self.f.gamma) / (1.0 - self.f.gamma) if self.f.coeff else 0.0)
        return H_b - sing - self.K * (tb - t)

    def G(self, s: float) -> float:
        """Integrand (mu - H(s))^(-1/p)."""
        gap = self.mu - self.H(s)
        return 0.0 if math.isinf(gap) else gap ** (-1.0 / self.p)

    @property
    def singular_exponent(self) -> float:
        """a with G(s) ~ s^a at s = 0 (0 when G(0) > 0 or the decay is slower than algebraic)."""
        if self.f.coeff > 0.0 and self.f.gamma > 1.0:
            return (self.f.gamma - 1.0) / self.p
        return 0.0

    def G_scaled(self, s: float) -> float:
        """
        G(s) s^(-a), finite down to s = 0.

        Below t_b the singular term is factored out of mu - H(s) so that
        nothing of size s^(1-gamma) is formed.
        """
        a = self.singular_exponent
        if a == 0.0:
            return self.G(s)
        e = 1.0 - self.f.gamma
        lead = self.f.coeff / (self.f.gamma - 1.0)
        if s <= 0.0:
            return lead ** (-1.0 / self.p)
        tb = self.t_b
        if s >= tb:
            return self.G(s) * s ** (-a)
        rest = self.mu + self._blend_integral(tb, self.rho) + self.f.coeff * tb ** e / e + self.K * (tb - s)
        return (s ** (-e) * rest + lead) ** (-1.0 / self.p)


def _as_nonlinearity(fspec: Union[Nonlinearity, FunctionSpec, Params]) -> Nonlinearity:
    if isinstance(fspec, Nonlinearity):
        return fspec
    if isinstance(fspec, Params):
        return fspec.nonlinearity
    return Nonlinearity(coeff=0.0, gamma=1.0, g=fspec)


def _wmu_kernel(p: float, rho: float, c: float, mu: float, f: Nonlinearity,
                samples: int = 2001) -> tuple[WMuKernel, ImplicitProfile]:
    """Checks, h, and an untabulated profile for the w_mu identity."""
    if not p > 1.0:
        raise DomainError(f"p must exceed 1 (got {p})", params={"key": "p"})
    if not (rho > 0.0 and c > 0.0):
        raise DomainError("rho and c must be positive", params={"key": "rho"})
    if mu < c / rho:
        raise DomainError(f"mu={mu:g} is below c/rho={c / rho:g}", params={"key": "mu"})

    ts = np.geomspace(rho * 1e-6, rho, samples)[:-1]
    g_plus = np.maximum(f.g(ts), 0.0)
    K = 1.0 + float(np.max(g_plus))
    ker = WMuKernel(p=p, rho=rho, c=c, mu=mu, f=f, K=K)

    # below t_b, h - f = K - g exactly and h > 0, so only g is compared
    inner = ts < ker.t_b
    if np.any(~(K > g_plus[inner])):
        k = int(np.argmax(g_plus[inner]))
        raise DominationError(f"h does not dominate max(f, 0) at t={ts[inner][k]:.6g}",
                              params={"t": float(ts[inner][k])},
                              trace=[f"K={K:.17g} g={float(g_plus[inner][k]):.17g}"])

    tz = np.linspace(ker.t_b, rho, samples)[:-1]
    gap = ker.h(tz) - np.maximum(f(tz), 0.0)
    if np.any(~(gap > 0.0)):
        k = int(np.argmin(np.where(np.isnan(gap), -np.inf, gap)))
        raise DominationError(
            f"h does not dominate max(f, 0) at t={tz[k]:.6g}",
            params={"t": float(tz[k])},
            trace=[f"h={float(ker.h(tz[k])):.17g} f={float(f(tz[k])):.17g}"],
        )

    a = ker.singular_exponent
    kappa = (p / (p - 1.0)) ** (1.0 / p)
    return ker, ImplicitProfile(phi=ker.G_scaled, a=a, kappa=kappa, label="w_mu")


def build_wmu(p: float, rho: float, c: float, mu: float,
              fspec: Union[Nonlinearity, FunctionSpec, Params],
              points: int = 1024, samples: int = 2001) -> Barrier:
    """
    The supersolution w_mu of the zero-convergence argument.

    w_mu solves -(|w'|^(p-2) w')' = h(w), w(0) = 0, through
        int_0^w (mu - H(s))^(-1/p) ds = (p/(p-1))^(1/p) t.
    It is tabulated up to w = 2 rho and validated where w <= rho.

    Raises:
        DomainError: p <= 1, rho or c not positive, or mu < c/rho.
        DominationError: h does not dominate max(f, 0) on the samples of (0, rho).
    """
    ker, probe = _wmu_kernel(p, rho, c, mu, _as_nonlinearity(fspec), samples)
    f, K, kappa = ker.f, ker.K, probe.kappa
    t_max = probe.primitive(2.0 * rho) / kappa
    prof = ImplicitProfile.tabulate(probe.phi, probe.a, kappa, t_max, points,
                                    band=(0.85 * rho, 1.05 * rho, 1e-4 * rho), label="w_mu")
    t_rho = probe.primitive(rho) / kappa
    t_nodes = prof.t

    def value(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        i = np.clip(np.searchsorted(t_nodes, t), 0, len(t_nodes) - 1)
        on_node = t_nodes[i] == t
        out = prof.v[i].copy()
        if not np.all(on_node):
            out[~on_node] = prof.values(t[~on_node])
        return out

    def slope(t):
        return kappa * np.array([(mu - ker.H(w)) ** (1.0 / p) for w in value(t)])

    nodes = t_nodes[(prof.v > 0.0) & (prof.v <= rho)]
    log.debug(f"w_mu: mu={mu:g} rho={rho:g} c={c:g} K={K:g} t(rho)={t_rho:.6g}")
    return _WMuBarrier(
        kind=BarrierKind.WMU, sense=Sense.SUPER, p=p, dim=1,
        coeffs={"mu": mu, "rho": rho, "c": c, "K": K, "t_rho": t_rho},
        region=Region("x_N", 0.0, t_rho),
        nodes=nodes, value=value, slope=slope,
        rhs=lambda x, w: ker.h(w),
        target=lambda x, w: f(w),
        profile=prof, kernel=ker,
    )


@dataclass(frozen=True)
class _WMuBarrier(Barrier):
    """w_mu keeps its table: node values are read off it instead of re-solved."""
    profile: Optional[ImplicitProfile] = field(default=None, repr=False, compare=False)
    kernel: Optional[WMuKernel] = field(default=None, repr=False, compare=False)

    def table_slope(self) -> np.ndarray:
        return self.profile.slope(self.profile.v)


def zero_convergence_window(p: float, rho: float, c: float,
                            fspec: Union[Nonlinearity, FunctionSpec, Params],
                            u_sup: float, lam_bar: float, mu: Optional[float] = None,
                            max_doublings: int = 60) -> dict:
    """
    Pick mu with w_mu(lam_bar) > rho, then lambda0 < lam_bar with
    u_sup < w_mu(lambda0) < rho.

    Returns:
        dict with mu, lambda0, w_lambda0 (the midpoint of (u_sup, rho)) and the barrier.

    Raises:
        DomainError: u_sup >= rho or lam_bar <= 0.
    """
    if not 0.0 <= u_sup < rho:
        raise DomainError(f"upper bound {u_sup:g} must lie below rho={rho:g}", params={"key": "u_sup"})
    if not lam_bar > 0.0:
        raise DomainError("strip height must be positive", params={"key": "lambda_bar"})
    f = _as_nonlinearity(fspec)
    mu = c / rho if mu is None else mu
    trace = []
    for _ in range(max_doublings):
        _, probe = _wmu_kernel(p, rho, c, mu, f)
        F_rho = probe.primitive(rho)
        trace.append(f"mu={mu:.6g} t(rho)={F_rho / probe.kappa:.6g}")
        if F_rho < probe.kappa * lam_bar:
            break
        mu *= 2.0
    else:
        raise DomainError(f"no mu found with w_mu({lam_bar:g}) > rho", params={"key": "mu"}, trace=trace)
    w0 = 0.5 * (u_sup + rho)
    lam0 = probe.primitive(w0) / probe.kappa
    log.debug("zero window: " + "; ".join(trace))
    return {"mu": mu, "lambda0": lam0, "w_lambda0": w0, "barrier": build_wmu(p, rho, c, mu, f)}


# ---------------------------------------------------------------------
# Eigenfunction barriers
# ---------------------------------------------------------------------

def _check_pair(params: Params, pair: EigenPair) -> None:
    if pair.N != params.N or pair.p != params.p:
        raise ConfigError(
            f"eigenpair (N={pair.N}, p={pair.p:g}) does not match the problem (N={params.N}, p={params.p:g})",
            params={"key": "pair"},
        )


def _pair_grid(pair: EigenPair, lo: float = 0.01, hi: float = 0.98) -> np.ndarray:
    return pair.r[(pair.r >= lo) & (pair.r <= hi)]


def eigen_alpha(params: Params, pair: EigenPair, s: float, r) -> np.ndarray:
    """alpha(r) with -Delta_p (s phi^beta) = alpha / (s phi^beta)^gamma, phi normalized to 1 at 0."""
    p, g, lam = params.p, params.gamma, pair.lambda1
    beta = params.beta_u
    phi = eval_phi(pair, r) / pair.normalization
    dphi = eval_dphi(pair, r) / pair.normalization
    bracket = (g - 1.0) * (p - 1.0) / (g + p - 1.0) * np.abs(dphi) ** p + lam * phi ** p
    return s ** (g + p - 1.0) * beta ** (p - 1.0) * bracket


def build_eigen_power(params: Params, c0: float, t0: float, pair: EigenPair) -> Barrier:
    """
    Subsolution w = s phi_1^(p/(gamma+p-1)) on the unit ball.

    s is the largest scale with sup alpha <= c0, less a relative margin of
    1e-3; R0 satisfies R0^beta_u w(0) = t0.

    Raises:
        ConfigError: pair built for another N or p.
        DomainError: c0 or t0 not positive, or alpha never positive.
    """
    _check_pair(params, pair)
    if not (c0 > 0.0 and t0 > 0.0):
        raise DomainError("c0 and t0 must be positive", params={"key": "c0"})
    p, g = params.p, params.gamma
    beta = params.beta_u
    grid = _pair_grid(pair)
    a1 = eigen_alpha(params, pair, 1.0, pair.r[:-1])
    peak = float(np.max(a1))
    if not peak > 0.0:
        raise DomainError("alpha is nowhere positive", params={"key": "gamma"})
    s = (c0 * (1.0 - EIGEN_SAFETY) / peak) ** (1.0 / (g + p - 1.0))
    w_center = s
    R0 = (t0 / w_center) ** (1.0 / beta)

    def value(r):
        return s * (eval_phi(pair, r) / pair.normalization) ** beta

    def slope(r):
        phi = eval_phi(pair, r) / pair.normalization
        return s * beta * phi ** (beta - 1.0) * eval_dphi(pair, r) / pair.normalization

    return Barrier(
        kind=BarrierKind.EIGEN_POWER, sense=Sense.SUB, p=p, dim=pair.N, params=params,
        coeffs={"s": s, "R0": R0, "c0": c0, "t0": t0, "w0": w_center, "alpha_max": peak * s ** (g + p - 1.0)},
        region=Region("r", grid[0], grid[-1]),
        nodes=grid, value=value, slope=slope,
        rhs=lambda r, w: eigen_alpha(params, pair, s, r) / w ** g,
        target=lambda r, w: c0 / w ** g,
    )


def build_linear_lower(params: Params, c0: float, t0: float, pair: EigenPair,
                       samples: int = 2001) -> Barrier:
    """
    Subsolution phi_R = t0 phi_1(. / R) on the ball of radius R = (2 lambda1 / c0)^(1/p).

    It solves -Delta_p phi_R = (c0/2) phi_R^(p-1) and lies below f(phi_R) as
    long as f(t) > c0 t^(p-1) on (0, t0). C = |phi_R'(R)| is the slope of the
    resulting linear lower bound.

    Raises:
        ConfigError: pair built for another N or p.
        DominationError: f(t) <= c0 t^(p-1) at a sample of (0, t0].
    """
    _check_pair(params, pair)
    if not (c0 > 0.0 and t0 > 0.0):
        raise DomainError("c0 and t0 must be positive", params={"key": "c0"})
    p = params.p
    f = params.nonlinearity
    ts = np.geomspace(t0 * 1e-6, t0, samples)
    with np.errstate(divide="ignore", over="ignore"):
        gap = f(ts) - c0 * ts ** (p - 1.0)
    if np.any(~(gap > 0.0)):
        k = int(np.argmin(np.where(np.isnan(gap), -np.inf, gap)))
        raise DominationError(f"f(t) <= c0 t^(p-1) at t={ts[k]:.6g}", params={"t": float(ts[k])},
                              trace=[f"f={float(f(ts[k])):.17g} c0*t^(p-1)={c0 * ts[k] ** (p - 1.0):.17g}"])
    lam = pair.lambda1
    R = (2.0 * lam / c0) ** (1.0 / p)
    norm = pair.normalization
    C = t0 * abs(eval_dphi(pair, 1.0)) / (norm * R)

    def value(r):
        return t0 * eval_phi(pair, np.asarray(r) / R) / norm

    def slope(r):
        return t0 * eval_dphi(pair, np.asarray(r) / R) / (norm * R)

    grid = R * _pair_grid(pair)
    return Barrier(
        kind=BarrierKind.LINEAR_LOWER, sense=Sense.SUB, p=p, dim=pair.N, params=params,
        coeffs={"R": R, "C": C, "t0": t0, "c0": c0},
        region=Region("r", grid[0], grid[-1]),
        nodes=grid, value=value, slope=slope,
        rhs=lambda r, w: 0.5 * c0 * w ** (p - 1.0),
        target=lambda r, w: f(w),
    )


def linear_lower_profile(b: Barrier) -> Callable[[np.ndarray], np.ndarray]:
    """x_N -> phi_R(R - x_N) for x_N < R, phi_R(0) = t0 beyond."""
    R = b.coeffs["R"]

    def lower(x_N):
        x = np.asarray(x_N, dtype=float)
        return b.value(np.clip(R - x, 0.0, R))
    return lower


def lower_bound_profile(b: Barrier) -> Callable[[np.ndarray], np.ndarray]:
    """
    The lower bound a sub-barrier yields on strips.

    EigenPower: x_N -> min(w(0) x_N^beta_u, t0); LinearLower: x_N -> min(C x_N, t0).
    """
    if b.kind not in (BarrierKind.EIGEN_POWER, BarrierKind.LINEAR_LOWER):
        raise DomainError(f"{b.kind.value} is not a lower barrier", params={"key": "kind"})
    t0 = b.coeffs["t0"]
    if b.kind is BarrierKind.EIGEN_POWER:
        w0, beta = b.coeffs["w0"], b.params.beta_u
        return lambda x: np.minimum(w0 * np.asarray(x, dtype=float) ** beta, t0)
    C = b.coeffs["C"]
    return lambda x: np.minimum(C * np.asarray(x, dtype=float), t0)


# ---------------------------------------------------------------------
# Annulus barriers
# ---------------------------------------------------------------------

def build_annulus_barrier(N: int, p: float, R: float, u0: float,
                          CH: float = HARNACK_CONSTANT, x0: Optional[tuple] = None,
                          points: int = 4001) -> Barrier:
    """
    p-harmonic function on B_4R \\ B_R with value u0/CH on |x - x0| = R and 0 on |x - x0| = 4R.

    p < N gives c (|x - x0|^(-m) + k), m = (N-p)/(p-1); p = N gives c (k - ln |x - x0|).

    Raises:
        DomainError: p > N, p <= 1, or non-positive R, u0; CH <= 1.
    """
    if not p > 1.0:
        raise DomainError(f"p must exceed 1 (got {p})", params={"key": "p"})
    if p > N:
        raise DomainError(f"annulus barriers need p <= N (got p={p:g}, N={N})", params={"key": "p"})
    if not (R > 0.0 and u0 > 0.0):
        raise DomainError("R and u0 must be positive", params={"key": "R"})
    if not CH > 1.0:
        raise DomainError(f"Harnack constant must exceed 1 (got {CH:g})", params={"key": "CH"})
    x0 = tuple(x0) if x0 is not None else (0.0,) * N
    boundary = u0 / CH

    if p < N:
        m = (N - p) / (p - 1.0)
        c = boundary * (4.0 * R) ** m / (4.0 ** m - 1.0)
        k = -(4.0 * R) ** (-m)
        kind = BarrierKind.FUNDAMENTAL
        value = lambda r: c * (np.asarray(r, dtype=float) ** (-m) + k)
        slope = lambda r: -c * m * np.asarray(r, dtype=float) ** (-m - 1.0)
        coeffs = {"c": c, "k": k, "m": m}
    else:
        c = boundary / math.log(4.0)
        k = math.log(4.0 * R)
        kind = BarrierKind.LOGARITHMIC
        value = lambda r: c * (k - np.log(np.asarray(r, dtype=float)))
        slope = lambda r: -c / np.asarray(r, dtype=float)
        coeffs = {"c": c, "k": k}
    coeffs.update({"R": R, "u0": u0, "CH": CH, "x0": x0, "N": N})

    zero = lambda r, w: np.zeros_like(np.asarray(r, dtype=float))
    return Barrier(
        kind=kind, sense=Sense.SUB, p=p, dim=N, coeffs=coeffs,
        region=Region("r", R, 4.0 * R),
        nodes=np.linspace(R, 4.0 * R, points),
        value=value, slope=slope, rhs=zero, target=zero,
    )


def annulus_value(b: Barrier, x) -> np.ndarray:
    """Barrier value at points x of R^N (shape (..., N))."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x - np.asarray(b.coeffs["x0"]), axis=-1)
    return b.value(r)


def annulus_chain_bounds(b: Barrier) -> dict:
    """
    Constants of the Harnack chain: the barrier value at distance 4R - 1
    from the center (the lower bound carried to height one) and the
    slope bound |w'(4R)|.
    """
    if b.kind not in (BarrierKind.FUNDAMENTAL, BarrierKind.LOGARITHMIC):
        raise DomainError(f"{b.kind.value} is not an annulus barrier", params={"key": "kind"})
    R = b.coeffs["R"]
    d = 4.0 * R - 1.0
    if d < R:
        raise DomainError(f"4R - 1 = {d:g} falls inside B_R", params={"key": "R"})
    return {"value_at_unit_height": float(b.value(d)), "slope_bound": float(abs(b.slope(4.0 * R)))}


# ---------------------------------------------------------------------
# Shifted v0 supersolution
# ---------------------------------------------------------------------

def build_v0_shift(params: Params, s: float, epsilon: float = 0.0, height: float = 1.0,
                   c1: float = 1.0, points: int = 2048) -> Barrier:
    """
    v_{s,eps}(x) = s v0(x_N + eps), solving -Delta_p v = s^(gamma+p-1) / v^gamma.

    It is a supersolution of -Delta_p u = f(u) with f(t) <= c1 t^(-gamma)
    once s^(gamma+p-1) >= c1.

    Raises:
        NonexistenceError: gamma <= 1.
        DomainError: s <= 0, eps < 0 or height <= 0.
    """
    if params.gamma <= 1.0:
        raise NonexistenceError(f"nonexistent (gamma<=1): v0 needs gamma > 1 (got {params.gamma:g})",
                                params={"gamma": params.gamma})
    if not s > 0.0 or epsilon < 0.0 or not height > 0.0:
        raise DomainError("need s > 0, epsilon >= 0 and height > 0", params={"key": "s"})
    p, g = params.p, params.gamma
    lo = epsilon if epsilon > 0.0 else height * 1e-6
    nodes = np.geomspace(lo, height + epsilon, points) - epsilon
    nodes[0] = max(nodes[0], 0.0)
    if epsilon == 0.0:
        nodes = nodes[nodes > 0.0]
    coef = s ** (g + p - 1.0)

    return Barrier(
        kind=BarrierKind.V0_SHIFT, sense=Sense.SUPER, p=p, dim=1, params=params,
        coeffs={"s": s, "epsilon": epsilon, "rhs_coeff": coef, "c1": c1},
        region=Region("x_N", nodes[0], height),
        nodes=nodes,
        value=lambda x: s * eval_v0(params, np.asarray(x, dtype=float) + epsilon),
        slope=lambda x: s * eval_v0_prime(params, np.asarray(x, dtype=float) + epsilon),
        rhs=lambda x, w: coef / w ** g,
        target=lambda x, w: c1 / w ** g,
    )


def upper_barrier_scale(params: Params, c1: float, u_sup: float, lam_bar: float) -> float:
    """Smallest s with s^(gamma+p-1) >= c1 and s v0(lam_bar) >= u_sup."""
    if not (c1 > 0.0 and lam_bar > 0.0 and u_sup >= 0.0):
        raise DomainError("need c1 > 0, lambda_bar > 0, u_sup >= 0", params={"key": "c1"})
    return max(c1 ** (1.0 / (params.gamma + params.p - 1.0)), u_sup / eval_v0(params, lam_bar))


def build(kind: BarrierKind, **kw) -> Barrier:
    """Dispatch by kind; keyword names follow the individual builders."""
    builders = {
        BarrierKind.WMU: build_wmu,
        BarrierKind.EIGEN_POWER: build_eigen_power,
        BarrierKind.LINEAR_LOWER: build_linear_lower,
        BarrierKind.FUNDAMENTAL: build_annulus_barrier,
        BarrierKind.LOGARITHMIC: build_annulus_barrier,
        BarrierKind.V0_SHIFT: build_v0_shift,
    }
    return builders[BarrierKind(kind)](**kw)
