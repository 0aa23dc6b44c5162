from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.interpolate import CubicSpline

from core.errors.math_errors import DomainError, RangeError
from core.log import log
from core.numerics.exact1d import QuadratureSolution, eval_vM
from core.numerics.params import FunctionSpec, Params
from core.numerics.pde_strip import Field2D
from core.numerics.stencils import derivative, interior, signed_power


MIN_SAMPLES = 8
KELVIN_STEP = 2.5e-3
KELVIN_BOX = ((-2.0, 2.0), (0.5, 2.0))
KELVIN_ANNULUS = (1.0, 2.0)
RADIUS_RANGE = (1e-3, 1e3)
MIN_TRIALS = 10_000
QUOTIENT_POINTS = 2001
CHUNK = 8192


# ---------------------------------------------------------------------
# Exponent fitting
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    """
    value ~ constant * x^exponent fitted in log-log.

    Attributes:
        exponent: fitted slope.
        constant: exp of the fitted intercept.
        rms_residual: root mean square of the log residuals.
        window: (lo, hi) the samples were drawn from.
        samples: number of samples used.
    """
    exponent: float
    constant: float
    rms_residual: float
    window: tuple
    samples: int = 0


def fit_exponent(x, values, window: Optional[Sequence[float]] = None) -> FitResult:
    """
    Least squares of log(value) against log(x) over lo < x <= hi.

    Raises:
        DomainError: fewer than 8 samples in the window, or a sample with
            x <= 0 or value <= 0.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(values, dtype=float).ravel()
    if x.shape != y.shape:
        raise DomainError("abscissae and values differ in length", params={"key": "samples"})
    lo, hi = window if window is not None else (-math.inf, math.inf)
    keep = (x > lo) & (x <= hi)
    x, y = x[keep], y[keep]
    if x.size < MIN_SAMPLES:
        raise DomainError(f"fit needs at least {MIN_SAMPLES} samples in the window (got {x.size})",
                          params={"key": "window"})
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise DomainError("log-log fit needs positive abscissae and values", params={"key": "samples"})
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    rms = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return FitResult(exponent=float(slope), constant=float(math.exp(intercept)), rms_residual=rms,
                     window=(float(x.min()), float(x.max())), samples=int(x.size))


def default_window(field: Field2D) -> tuple[float, float]:
    """(5 y_1, 0.1 H): past the first rows, inside the boundary layer."""
    return 5.0 * float(field.y[1]), 0.1 * field.problem.height


def boundary_exponent(field: Field2D, window: Optional[Sequence[float]] = None) -> FitResult:
    """Fit of the laterally averaged u against y."""
    window = default_window(field) if window is None else window
    return fit_exponent(field.y, field.column_mean(), window)


# ---------------------------------------------------------------------
# Gradient blow-up
# ---------------------------------------------------------------------

def field_gradient(field: Field2D) -> tuple[np.ndarray, np.ndarray]:
    """
    (du/dx, du/dy) at the nodes: second-order differences in xi carried to y
    by the chain rule, periodic centred differences in x.
    """
    m = field.problem.mesh
    u = field.u
    du_dxi = np.gradient(u, m.xi, axis=0, edge_order=2)
    dxi_dy = np.zeros_like(m.xi)
    dxi_dy[1:] = 1.0 / m.dy_dxi(m.xi[1:])
    uy = du_dxi * dxi_dy[:, None]
    if m.nx > 1:
        ux = (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2.0 * m.dx)
    else:
        ux = np.zeros_like(u)
    return ux, uy


@dataclass(frozen=True)
class GradientScan:
    """
    Attributes:
        direction: the unit vector eta.
        fit: exponent fit of the laterally averaged d u / d eta.
        c1, c2: min and max of (d u / d eta) y^(-beta_grad) over the window.
    """
    direction: tuple
    fit: FitResult
    c1: float
    c2: float


def gradient_blowup_scan(field: Field2D, beta: float, directions: Sequence[Sequence[float]],
                         window: Optional[Sequence[float]] = None) -> list[GradientScan]:
    """
    Directional derivatives along x_N and their blow-up exponent.

    Raises:
        DomainError: beta outside (0, 1], a direction of the wrong length or
            not a unit vector, or (eta, e_N) < beta.
    """
    if not 0.0 < beta <= 1.0:
        raise DomainError(f"beta must lie in (0, 1] (got {beta})", params={"key": "beta"})
    params = field.problem.params
    window = default_window(field) if window is None else window
    ux, uy = field_gradient(field)
    y = field.y
    rows = (y > window[0]) & (y <= window[1])
    scans = []
    for eta in directions:
        eta = np.asarray(eta, dtype=float)
        if eta.shape != (params.N,) or abs(np.linalg.norm(eta) - 1.0) > 1e-12:
            raise DomainError(f"direction {eta.tolist()} is not a unit vector in R^{params.N}",
                              params={"key": "direction"})
        if eta[-1] < beta:
            raise DomainError(f"direction {eta.tolist()} has (eta, e_N) < {beta:g}",
                              params={"key": "direction"})
        d = eta[-1] * uy + (eta[0] * ux if params.N > 1 else 0.0)
        fit = fit_exponent(y, d.mean(axis=1), window)
        scaled = d[rows] * y[rows, None] ** (-params.beta_grad)
        scans.append(GradientScan(direction=tuple(eta.tolist()), fit=fit,
                                  c1=float(scaled.min()), c2=float(scaled.max())))
    return scans


@dataclass(frozen=True)
class GradientBound:
    value: float
    y: float
    row: int


def gradient_bound_profile(field: Field2D, window: Optional[Sequence[float]] = None) -> GradientBound:
    """sup of y^(1 - beta_u) |grad u| over the window and the row where it is attained."""
    window = default_window(field) if window is None else window
    ux, uy = field_gradient(field)
    y = field.y
    rows = np.nonzero((y > window[0]) & (y <= window[1]))[0]
    if rows.size == 0:
        raise RangeError("window holds no mesh rows", params={"value": window[1], "lo": window[0], "hi": window[1]})
    g = np.hypot(ux[rows], uy[rows]).max(axis=1) * y[rows] ** (1.0 - field.problem.params.beta_u)
    k = int(np.argmax(g))
    return GradientBound(value=float(g[k]), y=float(y[rows[k]]), row=int(rows[k]))


# ---------------------------------------------------------------------
# Scaling blow-up
# ---------------------------------------------------------------------

Profile = Union[QuadratureSolution, Field2D, Callable[[np.ndarray], np.ndarray]]


def _as_callable(source: Profile) -> tuple[Callable[[np.ndarray], np.ndarray], float]:
    """Evaluator in x_N and the upper end of its domain."""
    if isinstance(source, QuadratureSolution):
        return (lambda t: eval_vM(source, t)[0]), source.t_max
    if isinstance(source, Field2D):
        m = source.problem.mesh
        spline = CubicSpline(m.xi, source.column_mean())
        return (lambda t: spline(m.xi_of_y(t))), m.height
    return source, math.inf


def profile_residual(fn: Callable[[np.ndarray], np.ndarray], params: Params, t) -> np.ndarray:
    """
    Relative defect (-(|v'|^(p-2) v')' - f(v)) / f(v) of a 1D profile on
    the interior nodes of the grid t.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(fn(t), dtype=float)
    q = signed_power(derivative(t, v), params.p - 1.0)
    ti = interior(t)
    rhs = params.f(interior(interior(v)))
    return (-derivative(ti, q) - rhs) / rhs


@dataclass(frozen=True)
class ScalingSamples:
    """
    w(t) = eps^(-beta_u) u(eps t).

    Attributes:
        coefficient: eps^(gamma beta_u), the factor in front of g in the
            equation w solves.
        residual_u, residual_w: relative profile residuals of u on eps t and
            of w on t (interior nodes); equal for the pure problem.
    """
    eps: float
    t: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    coefficient: float
    residual_u: np.ndarray = field(repr=False)
    residual_w: np.ndarray = field(repr=False)


def scaling_blowup(source: Profile, eps: float, params: Params, t=None) -> ScalingSamples:
    """
    Rescale a profile toward the boundary.

    Raises:
        DomainError: eps <= 0.
        RangeError: eps t leaves the domain of the source.
    """
    if not eps > 0.0:
        raise DomainError(f"eps must be positive (got {eps})", params={"key": "eps"})
    fn, top = _as_callable(source)
    t = np.geomspace(1e-2, 1.0, 64) if t is None else np.asarray(t, dtype=float)
    if eps * float(np.max(t)) > top * (1.0 + 1e-12):
        raise RangeError(f"eps t reaches {eps * float(np.max(t)):g} past the profile end {top:g}",
                         params={"value": eps * float(np.max(t)), "lo": 0.0, "hi": top})
    b = params.beta_u
    w_fn = lambda s: eps ** (-b) * np.asarray(fn(eps * np.asarray(s)), dtype=float)
    coefficient = eps ** (params.gamma * b)
    res_u = profile_residual(fn, params, eps * t)
    # for g != 0, w solves an equation with a rescaled g
    res_w = profile_residual(w_fn, params, t) if params.is_pure else np.full_like(res_u, math.nan)
    log.debug(f"scaling eps={eps:g} coefficient={coefficient:.6g}")
    return ScalingSamples(eps=float(eps), t=t, w=w_fn(t), coefficient=float(coefficient),
                          residual_u=res_u, residual_w=res_w)


# ---------------------------------------------------------------------
# Kelvin transform
# ---------------------------------------------------------------------

def invert_points(x) -> np.ndarray:
    """x / |x|^2 along the last axis."""
    x = np.asarray(x, dtype=float)
    return x / np.sum(x * x, axis=-1, keepdims=True)


def _require_conformal(params: Params) -> None:
    if params.p != params.N:
        raise DomainError(f"Kelvin transform needs p = N (got p={params.p:g}, N={params.N})",
                          params={"key": "p"})


def kelvin_transform(u: Callable[[np.ndarray], np.ndarray], points, params: Params) -> np.ndarray:
    """
    u_hat(x) = u(x / |x|^2) at the given points (shape (..., N)).

    Raises:
        DomainError: p != N, or a point at the origin.
    """
    _require_conformal(params)
    pts = np.asarray(points, dtype=float)
    if np.any(np.sum(pts * pts, axis=-1) == 0.0):
        raise DomainError("the origin has no Kelvin image", params={"key": "points"})
    return np.asarray(u(invert_points(pts)), dtype=float)


def _laplacian4(v: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order five-point Laplacian on the interior [2:-2, 2:-2]."""
    c = v[2:-2, 2:-2]

    def second(a, b, cc, d, e):
        return (-a + 16.0 * b - 30.0 * cc + 16.0 * d - e) / (12.0 * h * h)

    dxx = second(v[:-4, 2:-2], v[1:-3, 2:-2], c, v[3:-1, 2:-2], v[4:, 2:-2])
    dyy = second(v[2:-2, :-4], v[2:-2, 1:-3], c, v[2:-2, 3:-1], v[2:-2, 4:])
    return dxx + dyy


def kelvin_grid(h: float = KELVIN_STEP, box=KELVIN_BOX) -> tuple[np.ndarray, np.ndarray]:
    (x0, x1), (y0, y1) = box
    xs = np.arange(x0, x1 + 0.5 * h, h)
    ys = np.arange(y0, y1 + 0.5 * h, h)
    return np.meshgrid(xs, ys, indexing="ij")


def kelvin_residual(u: Callable[[np.ndarray], np.ndarray], params: Params, source: bool = True,
                    h: float = KELVIN_STEP, annulus: Sequence[float] = KELVIN_ANNULUS) -> float:
    """
    Defect of -Delta_2 u_hat = |x|^(-4) f(u_hat) on the annulus part of the
    grid box, for p = N = 2.

    With source=True the defect is relative to max |right-hand side|; with
    source=False the right-hand side is dropped and max |Delta u_hat| is
    returned.

    Raises:
        DomainError: p != N or N != 2.
    """
    _require_conformal(params)
    if params.N != 2:
        raise DomainError(f"Kelvin residual is implemented for N = 2 (got {params.N})",
                          params={"key": "N"})
    X, Y = kelvin_grid(h)
    pts = np.stack([X, Y], axis=-1)
    uh = kelvin_transform(u, pts, params)
    lap = _laplacian4(uh, h)
    r = np.hypot(X, Y)[2:-2, 2:-2]
    mask = (r >= annulus[0]) & (r <= annulus[1])
    if not source:
        return float(np.max(np.abs(lap[mask])))
    rhs = r ** (-2.0 * params.N) * params.f(uh[2:-2, 2:-2])
    return float(np.max(np.abs(-lap[mask] - rhs[mask])) / np.max(np.abs(rhs[mask])))


# ---------------------------------------------------------------------
# Elementary inequalities
# ---------------------------------------------------------------------

def ineq_ratios(xi, xi_p, p: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Monotonicity ratio
        (A(xi) - A(xi'), xi - xi') / ((|xi| + |xi'|)^(p-2) |xi - xi'|^2)
    and continuity ratio
        |A(xi) - A(xi')| / ((|xi| + |xi'|)^(p-2) |xi - xi'|)
    with A(z) = |z|^(p-2) z; rows with xi = xi' come back as nan.
    """
    a = np.atleast_2d(np.asarray(xi, dtype=float))
    b = np.atleast_2d(np.asarray(xi_p, dtype=float))
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        Aa = np.where(na[:, None] > 0.0, na[:, None] ** (p - 2.0) * a, 0.0)
        Ab = np.where(nb[:, None] > 0.0, nb[:, None] ** (p - 2.0) * b, 0.0)
        dA = Aa - Ab
        d = a - b
        nd = np.linalg.norm(d, axis=1)
        base = (na + nb) ** (p - 2.0)
        r1 = np.sum(dA * d, axis=1) / (base * nd * nd)
        r2 = np.linalg.norm(dA, axis=1) / (base * nd)
    bad = (na + nb == 0.0) | (nd == 0.0)
    r1[bad] = np.nan
    r2[bad] = np.nan
    return r1, r2


def _random_vectors(rng: np.random.Generator, n: int, N: int) -> np.ndarray:
    lo, hi = RADIUS_RANGE
    radius = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
    direction = rng.standard_normal((n, N))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return radius[:, None] * direction


@dataclass(frozen=True)
class IneqEstimate:
    p: float
    N: int
    C1_hat: float
    C2_hat: float
    trials: int
    skipped: int


def estimate_ineq_constants(p: float, N: int, trials: int = 100_000, seed: int = 0) -> IneqEstimate:
    """
    C1_hat = inf of the monotonicity ratio, C2_hat = sup of the continuity
    ratio over random pairs; log-uniform radii, uniform directions.

    Raises:
        DomainError: p <= 1, N < 1 or trials < 1e4.
    """
    if not p > 1.0:
        raise DomainError(f"p must exceed 1 (got {p})", params={"key": "p"})
    if N < 1:
        raise DomainError(f"N must be positive (got {N})", params={"key": "N"})
    if trials < MIN_TRIALS:
        raise DomainError(f"trials must be at least {MIN_TRIALS} (got {trials})", params={"key": "trials"})
    rng = np.random.default_rng(seed)
    c1, c2, skipped, done = math.inf, 0.0, 0, 0
    while done < trials:
        n = min(CHUNK, trials - done)
        r1, r2 = ineq_ratios(_random_vectors(rng, n, N), _random_vectors(rng, n, N), p)
        ok = np.isfinite(r1) & np.isfinite(r2)
        skipped += int(n - ok.sum())
        if ok.any():
            c1 = min(c1, float(r1[ok].min()))
            c2 = max(c2, float(r2[ok].max()))
        done += n
    log.debug(f"ineq p={p:g} N={N}: C1_hat={c1:.6g} C2_hat={c2:.6g} ({skipped} skipped)")
    return IneqEstimate(p=p, N=N, C1_hat=c1, C2_hat=c2, trials=trials, skipped=skipped)


def count_ineq_violations(p: float, N: int, C1: float, C2: float, trials: int = 100_000,
                          seed: int = 1) -> int:
    """Random pairs on which either inequality fails with the given constants."""
    rng = np.random.default_rng(seed)
    bad, done = 0, 0
    while done < trials:
        n = min(CHUNK, trials - done)
        r1, r2 = ineq_ratios(_random_vectors(rng, n, N), _random_vectors(rng, n, N), p)
        ok = np.isfinite(r1) & np.isfinite(r2)
        bad += int(np.sum((r1[ok] < C1) | (r2[ok] > C2)))
        done += n
    return bad


# ---------------------------------------------------------------------
# Difference quotients of decreasing functions
# ---------------------------------------------------------------------

def decreasing_quotient_sup(gspec: Union[FunctionSpec, Callable], l1: float, l2: float, eps: float,
                            points: int = QUOTIENT_POINTS) -> float:
    """
    sup of (g(t2) - g(t1)) / (t2 - t1) over grid pairs in [l1, l2] with
    t2 - t1 >= eps.

    Raises:
        DomainError: l2 - l1 < eps or eps <= 0.
    """
    if not eps > 0.0 or l2 - l1 < eps:
        raise DomainError(f"need eps > 0 and l2 - l1 >= eps (got [{l1:g}, {l2:g}], eps={eps:g})",
                          params={"key": "eps"})
    t = np.linspace(l1, l2, points)
    g = np.asarray(gspec(t), dtype=float)
    slack = 1e-12 * (l2 - l1)
    best = -math.inf
    step = max(1, CHUNK * 64 // points)
    for i0 in range(0, points, step):
        i = np.arange(i0, min(points, i0 + step))
        dt = t[None, :] - t[i, None]
        admissible = dt >= eps - slack
        if not admissible.any():
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(admissible, (g[None, :] - g[i, None]) / dt, -math.inf)
        best = max(best, float(q.max()))
    return best


def tail_quotient_sup(gspec: Union[FunctionSpec, Callable], l1: float, eps: float,
                      span: float = 1e3, points: int = 4 * QUOTIENT_POINTS) -> float:
    """The same supremum over [l1, l1 + span], standing in for [l1, inf)."""
    return decreasing_quotient_sup(gspec, l1, l1 + span, eps, points)
