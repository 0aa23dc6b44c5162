"""
-Delta_p u = f(u) on the strip (0, L) x (0, H), periodic in x, u = 0 at the
bottom, top data prescribed.

The vertical coordinate is mapped, y = H xi^(1/beta) with xi uniform, so the
boundary layer u ~ y^beta is linear in xi. Control volumes are centred on
the nodes; face gradients are two-point differences across the face plus
averaged centred differences along it. The source over a control volume is
integrated in xi with u linear in xi between nodes.

The discrete system is solved by damped Newton with an analytic Jacobian,
under continuation in the gradient regularization delta and the clamp u_min.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.interpolate import CubicSpline
from scipy.sparse.linalg import spsolve

from core.errors.math_errors import DomainError, PositivityError, RangeError, SolveError
from core.log import log
from core.numerics.exact1d import eval_v0, v0_constant
from core.numerics.params import Params


_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)
GL_TAU = 0.5 * (_GL_X + 1.0)
GL_W = 0.5 * _GL_W

FRACTION_TO_BOUNDARY = 0.95
STAGE_TOL = 1e-6
U_MIN_FACTORS = (100.0, 10.0, 1.0)


class TopBC(str, Enum):
    DIRICHLET_V0 = "DirichletV0"
    DIRICHLET_CONST = "DirichletConst"
    NEUMANN_SLOPE = "NeumannSlope"


@dataclass(frozen=True)
class StripProblem:
    """
    Truncated-strip problem.

    Attributes:
        params: exponents and perturbation g; N must be 1 or 2.
        height: strip height H.
        period: lateral period L (ignored for N = 1).
        nx, ny: lateral and vertical node counts (ny intervals, nodes 0..ny).
        grading: mesh exponent, y = H xi^(1/grading); defaults to beta_u.
        top_bc: kind of top data.
        top_value: DirichletConst value.
        top_slope: NeumannSlope value of du/dy.
        shift_s, shift_eps: DirichletV0 data s v0(H + eps).
        perturbation, mode: top data times (1 + perturbation cos(2 pi mode x / L)).
        rtol: final relative residual.
    """
    params: Params
    height: float = 1.0
    period: float = 1.0
    nx: int = 1
    ny: int = 256
    grading: Optional[float] = None
    top_bc: TopBC = TopBC.DIRICHLET_V0
    top_value: float = 1.0
    top_slope: float = 1.0
    shift_s: float = 1.0
    shift_eps: float = 0.0
    perturbation: float = 0.0
    mode: int = 1
    rtol: float = 1e-9
    max_newton: int = 60
    delta_max: float = 1e-1
    delta_min: float = 1e-6
    stages: int = 6

    def __post_init__(self) -> None:
        if self.params.N not in (1, 2):
            raise DomainError(f"strip solver supports N in {{1, 2}} (got {self.params.N})",
                              params={"key": "N"})
        if not (self.height > 0.0 and self.period > 0.0):
            raise DomainError("height and period must be positive", params={"key": "height"})
        if self.ny < 4:
            raise DomainError(f"ny must be at least 4 (got {self.ny})", params={"key": "ny"})
        if self.nx < 1 or (self.params.N == 1 and self.nx != 1):
            raise DomainError(f"nx must be 1 for N=1 and >= 1 otherwise (got {self.nx})",
                              params={"key": "nx"})
        if self.grading is not None and not self.grading > 0.0:
            raise DomainError(f"grading must be positive (got {self.grading})", params={"key": "grading"})
        if abs(self.perturbation) >= 1.0:
            raise DomainError("perturbation amplitude must be below 1", params={"key": "perturbation"})
        if not self.rtol > 0.0:
            raise DomainError("rtol must be positive", params={"key": "rtol"})
        if self.top_bc is TopBC.DIRICHLET_V0:
            v0_constant(self.params)

    @property
    def beta(self) -> float:
        return self.params.beta_u if self.grading is None else self.grading

    @cached_property
    def mesh(self) -> "MappedMesh":
        return MappedMesh(self.nx, self.ny, self.height, self.period, self.beta)

    def top_data(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.top_bc is TopBC.DIRICHLET_V0:
            base = self.shift_s * eval_v0(self.params, self.height + self.shift_eps)
        elif self.top_bc is TopBC.DIRICHLET_CONST:
            base = self.top_value
        else:
            base = self.top_slope
        return base * (1.0 + self.perturbation * np.cos(2.0 * math.pi * self.mode * x / self.period))

    @property
    def neumann(self) -> bool:
        return self.top_bc is TopBC.NEUMANN_SLOPE

    def with_(self, **changes) -> "StripProblem":
        data = {k: getattr(self, k) for k in self.__dataclass_fields__}
        data.update(changes)
        return StripProblem(**data)


@dataclass(frozen=True)
class MappedMesh:
    nx: int
    ny: int
    height: float
    period: float
    beta: float

    @cached_property
    def xi(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.ny + 1)

    def y_of_xi(self, xi):
        return self.height * np.asarray(xi, dtype=float) ** (1.0 / self.beta)

    def dy_dxi(self, xi):
        return self.height / self.beta * np.asarray(xi, dtype=float) ** (1.0 / self.beta - 1.0)

    def xi_of_y(self, y):
        return (np.asarray(y, dtype=float) / self.height) ** self.beta

    @cached_property
    def y(self) -> np.ndarray:
        y = self.y_of_xi(self.xi)
        y[-1] = self.height
        return y

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx if self.nx > 1 else np.zeros(1)

    @property
    def dx(self) -> float:
        return self.period / self.nx if self.nx > 1 else 1.0

    @cached_property
    def cv_height(self) -> np.ndarray:
        """Y_j: y-extent of the control volume around node j (half cells at both ends)."""
        h = 0.5 / self.ny
        lo = self.y_of_xi(np.clip(self.xi - h, 0.0, 1.0))
        hi = self.y_of_xi(np.clip(self.xi + h, 0.0, 1.0))
        return hi - lo


# ---------------------------------------------------------------------
# Field
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class Field2D:
    """
    Nodal values u[j, i] at (x_i, y_j), j = 0 the bottom row.

    Attributes:
        problem: the problem solved.
        u: shape (ny + 1, nx).
        iterations: Newton iterations over all stages.
        residual: final relative residual.
        path: one line per continuation stage.
    """
    problem: StripProblem
    u: np.ndarray = field(repr=False, compare=False)
    iterations: int = 0
    residual: float = math.nan
    path: tuple = ()

    @property
    def x(self) -> np.ndarray:
        return self.problem.mesh.x

    @property
    def y(self) -> np.ndarray:
        return self.problem.mesh.y

    @classmethod
    def from_profile(cls, problem: StripProblem, profile: Callable[[np.ndarray], np.ndarray],
                     lateral: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> "Field2D":
        """Field u(x, y) = profile(y) * lateral(x) on the problem's mesh."""
        mesh = problem.mesh
        col = np.asarray(profile(mesh.y), dtype=float)
        row = np.ones(mesh.nx) if lateral is None else np.asarray(lateral(mesh.x), dtype=float)
        return cls(problem=problem, u=col[:, None] * row[None, :])

    def with_values(self, u: np.ndarray) -> "Field2D":
        return Field2D(problem=self.problem, u=np.asarray(u, dtype=float),
                       iterations=self.iterations, residual=self.residual, path=self.path)

    def column_mean(self) -> np.ndarray:
        return self.u.mean(axis=1)


# ---------------------------------------------------------------------
# Discrete system
# ---------------------------------------------------------------------

@dataclass
class _System:
    R: np.ndarray
    scale: np.ndarray
    J: Optional[sparse.csr_matrix] = None


class _Assembler:
    """Residual and Jacobian of the discrete balance on one problem."""

    def __init__(self, prob: StripProblem) -> None:
        self.prob = prob
        m = prob.mesh
        self.m = m
        self.p = prob.params.p
        self.f = prob.params.nonlinearity
        ny, nx = m.ny, m.nx
        self.rows = ny if prob.neumann else ny - 1
        idx = -np.ones((ny + 1, nx), dtype=np.int64)
        idx[1:self.rows + 1] = np.arange(self.rows * nx).reshape(self.rows, nx)
        self.idx = idx
        self.n = self.rows * nx

        y = m.y
        self.dyf = np.diff(y)                          # face j+1/2 spacing
        D = np.empty(ny)                                # centred denominators, rows 1..ny
        D[:-1] = y[2:] - y[:-2]
        D[-1] = y[-1] - y[-2]
        self.D = D
        self.Y = m.cv_height[1:]                        # rows 1..ny
        h = 0.5 / ny
        xi = m.xi[1:]
        self.xi_lo = xi[:, None] - GL_TAU[None, :] * h  # (ny, 4)
        self.xi_hi = xi[:, None] + GL_TAU[None, :] * h
        self.jac_lo = m.dy_dxi(self.xi_lo) * h * GL_W[None, :]
        self.jac_hi = m.dy_dxi(np.clip(self.xi_hi, 0.0, 1.0)) * h * GL_W[None, :]
        self.jac_hi[-1] = 0.0                           # top row: lower half only
        self.top = prob.top_data(m.x)

    # state
    def full(self, U: np.ndarray, top: Optional[np.ndarray] = None) -> np.ndarray:
        m = self.m
        u = np.zeros((m.ny + 1, m.nx))
        u[1:self.rows + 1] = U.reshape(self.rows, m.nx)
        if not self.prob.neumann:
            u[-1] = self.top if top is None else top
        return u

    def unknowns(self, u: np.ndarray) -> np.ndarray:
        return u[1:self.rows + 1].reshape(-1).copy()

    # assembly
    def assemble(self, u: np.ndarray, delta: float, u_min: float, jac: bool = True) -> _System:
        p, m = self.p, self.m
        nx, ny, dx = m.nx, m.ny, m.dx
        lateral = nx > 1
        e = 0.5 * (p - 2.0)
        ent: list[tuple] = []

        # vertical faces j+1/2, j = 0..ny-1
        gy = (u[1:] - u[:-1]) / self.dyf[:, None]
        if lateral:
            cx = (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2.0 * dx)
            gx = 0.5 * (cx[:-1] + cx[1:])
        else:
            gx = np.zeros_like(gy)
        s2 = gx ** 2 + gy ** 2 + delta ** 2
        k = s2 ** e
        Fv = dx * k * gy

        # lateral faces i+1/2 on rows 1..ny
        if lateral:
            cy = np.empty((ny, nx))
            cy[:-1] = (u[2:] - u[:-2]) / self.D[:-1, None]
            cy[-1] = (u[-1] - u[-2]) / self.D[-1]
            gyl = 0.5 * (cy + np.roll(cy, -1, axis=1))
            gxl = (np.roll(u[1:], -1, axis=1) - u[1:]) / dx
            s2l = gxl ** 2 + gyl ** 2 + delta ** 2
            kl = s2l ** e
            Fl = self.Y[:, None] * kl * gxl
        else:
            Fl = np.zeros((ny, nx))

        # source on rows 1..ny
        w_lo = 1.0 - 0.5 * GL_TAU
        u_lo = u[1:, :, None] * w_lo + u[:-1, :, None] * (0.5 * GL_TAU)
        u_hi = np.empty_like(u_lo)
        u_hi[:-1] = u[1:-1, :, None] * w_lo + u[2:, :, None] * (0.5 * GL_TAU)
        u_hi[-1] = u[-1, :, None]
        ul = np.maximum(u_lo, u_min)
        uh = np.maximum(u_hi, u_min)
        with np.errstate(divide="ignore", invalid="ignore"):
            S = dx * (np.sum(self.f(ul) * self.jac_lo[:, None, :], axis=2)
                      + np.sum(self.f(uh) * self.jac_hi[:, None, :], axis=2))

        top_flux = np.zeros(nx)
        if self.prob.neumann:
            top_flux = dx * np.sign(self.top) * np.abs(self.top) ** (p - 1.0)
        F_up = np.vstack([Fv[1:], top_flux[None, :]])        # rows 1..ny
        F_dn = Fv
        R = F_up - F_dn + Fl - np.roll(Fl, 1, axis=1) + S
        scale = np.abs(F_up) + np.abs(F_dn) + np.abs(Fl) + np.abs(np.roll(Fl, 1, axis=1)) + np.abs(S)
        R = R[:self.rows].reshape(-1)
        scale = scale[:self.rows].reshape(-1)
        if not jac:
            return _System(R=R, scale=scale)

        J_idx = np.arange(nx)
        ip = (J_idx + 1) % nx
        im = (J_idx - 1) % nx

        # vertical fluxes
        a = dx * (k + (p - 2.0) * k * gy ** 2 / s2)
        face = np.arange(ny)[:, None] * np.ones((1, nx), dtype=np.int64)
        col = np.ones((ny, 1), dtype=np.int64) * J_idx[None, :]
        deps = [(face + 1, col, a / self.dyf[:, None]), (face, col, -a / self.dyf[:, None])]
        if lateral:
            b = dx * (p - 2.0) * k * gy * gx / s2 / (4.0 * dx)
            for jj in (face, face + 1):
                deps.append((jj, np.broadcast_to(ip, jj.shape), b))
                deps.append((jj, np.broadcast_to(im, jj.shape), -b))
        for jc, ic, val in deps:
            ent.append((face, col, jc, ic, val))              # top face of row `face`
            ent.append((face + 1, col, jc, ic, -val))         # bottom face of row `face + 1`

        # lateral fluxes
        if lateral:
            row = np.arange(1, ny + 1)[:, None] * np.ones((1, nx), dtype=np.int64)
            colr = np.ones((ny, 1), dtype=np.int64) * J_idx[None, :]
            colp = np.broadcast_to(ip, row.shape)
            c = self.Y[:, None] * (kl + (p - 2.0) * kl * gxl ** 2 / s2l) / dx
            d = self.Y[:, None] * (p - 2.0) * kl * gxl * gyl / s2l * 0.5 / self.D[:, None]
            up = np.minimum(row + 1, ny)
            up[-1] = ny
            dn = row - 1
            ldeps = [(row, colp, c), (row, colr, -c)]
            for ic in (colr, colp):
                ldeps.append((up, ic, d))
                ldeps.append((dn, ic, -d))
            for jc, ic, val in ldeps:
                ent.append((row, colr, jc, ic, val))
                ent.append((row, colp, jc, ic, -val))

        # source
        with np.errstate(divide="ignore", invalid="ignore"):
            dfl = np.where(u_lo > u_min, self.f.derivative(ul), 0.0) * self.jac_lo[:, None, :]
            dfh = np.where(u_hi > u_min, self.f.derivative(uh), 0.0) * self.jac_hi[:, None, :]
        row = np.arange(1, ny + 1)[:, None] * np.ones((1, nx), dtype=np.int64)
        colr = np.ones((ny, 1), dtype=np.int64) * J_idx[None, :]
        s_self = dx * (np.sum(dfl * w_lo, axis=2) + np.sum(dfh * w_lo, axis=2))
        s_dn = dx * np.sum(dfl * (0.5 * GL_TAU), axis=2)
        s_up = dx * np.sum(dfh * (0.5 * GL_TAU), axis=2)
        ent.append((row, colr, row, colr, s_self))
        ent.append((row, colr, row - 1, colr, s_dn))
        ent.append((row, colr, np.minimum(row + 1, ny), colr, s_up))

        rr, cc, vv = [], [], []
        for jr, ir, jc, ic, val in ent:
            jr, ir, jc, ic, val = np.broadcast_arrays(jr, ir, jc, ic, val)
            ri = self.idx[jr, ir].ravel()
            ci = self.idx[jc, ic].ravel()
            keep = (ri >= 0) & (ci >= 0)
            rr.append(ri[keep])
            cc.append(ci[keep])
            vv.append(val.ravel()[keep])
        J = sparse.coo_matrix((np.concatenate(vv), (np.concatenate(rr), np.concatenate(cc))),
                              shape=(self.n, self.n)).tocsr()
        return _System(R=R, scale=scale, J=J)


def _relative(sys: _System) -> np.ndarray:
    return np.abs(sys.R) / np.where(sys.scale > 0.0, sys.scale, 1.0)


# ---------------------------------------------------------------------
# Newton with continuation
# ---------------------------------------------------------------------

def _newton(asm: _Assembler, U: np.ndarray, delta: float, u_min: float, tol: float,
            max_iter: int, label: str, trace: list[str]) -> tuple[np.ndarray, int, float]:
    for it in range(max_iter + 1):
        sys = asm.assemble(asm.full(U), delta, u_min, jac=True)
        rel = _relative(sys)
        res = float(np.max(rel))
        if not math.isfinite(res):
            trace.append(f"{label}: non-finite residual at iteration {it}")
            raise SolveError(f"non-finite residual in {label}", trace=trace)
        if res <= tol:
            return U, it, res
        if it == max_iter:
            break
        dU = spsolve(sys.J, -sys.R)
        if not np.all(np.isfinite(dU)):
            trace.append(f"{label}: singular Newton system at iteration {it}")
            raise SolveError(f"singular Newton system in {label}", trace=trace)
        neg = dU < 0.0
        alpha = 1.0
        if np.any(neg):
            alpha = min(1.0, FRACTION_TO_BOUNDARY * float(np.min(U[neg] / -dU[neg])))
        merit = float(np.linalg.norm(rel))
        while True:
            trial = U + alpha * dU
            if not np.all(trial > 0.0):
                trace.append(f"{label}: iterate lost positivity (alpha={alpha:.3e})")
                raise PositivityError(f"negative iterate in {label}", trace=trace)
            t_rel = _relative(asm.assemble(asm.full(trial), delta, u_min, jac=False))
            if np.linalg.norm(t_rel) <= (1.0 - 1e-4 * alpha) * merit:
                break
            alpha *= 0.5
            if alpha < 1e-10:
                trace.append(f"{label}: line search stalled at residual {res:.3e} (iteration {it})")
                raise SolveError(f"Newton stagnation in {label}", params={"residual": res}, trace=trace)
        U = trial
    trace.append(f"{label}: {max_iter} iterations, residual {res:.3e}")
    raise SolveError(f"Newton did not converge in {label}", params={"residual": res}, trace=trace)


def continuation_path(prob: StripProblem) -> list[tuple[float, float, float]]:
    """(delta, u_min, tol) per stage: delta descends first, then the clamp."""
    floor = u_floor(prob)
    if prob.params.p == 2.0:
        deltas = [prob.delta_min]
    else:
        deltas = list(np.geomspace(prob.delta_max, prob.delta_min, prob.stages))
    path = [(d, U_MIN_FACTORS[0] * floor) for d in deltas]
    path += [(deltas[-1], fac * floor) for fac in U_MIN_FACTORS[1:]]
    loose = max(prob.rtol, STAGE_TOL)
    return [(d, um, prob.rtol if i == len(path) - 1 else loose) for i, (d, um) in enumerate(path)]


def u_floor(prob: StripProblem) -> float:
    """0.1 v0(y_1), the profile scale of the first row; A = 1 when v0 does not exist."""
    y1 = prob.mesh.y[1]
    A = v0_constant(prob.params) if prob.params.gamma > 1.0 else 1.0
    return 0.1 * A * y1 ** prob.params.beta_u


def initial_guess(prob: StripProblem) -> np.ndarray:
    """top(x) (y/H)^beta, with the top value estimated from the slope for Neumann data."""
    m = prob.mesh
    top = prob.top_data(m.x)
    if prob.neumann:
        top = top * prob.height / prob.params.beta_u
    return (m.y[:, None] / prob.height) ** prob.params.beta_u * top[None, :]


def solve(prob: StripProblem, guess: Optional[np.ndarray] = None) -> Field2D:
    """
    Damped-Newton solve with continuation in (delta, u_min).

    Raises:
        SolveError: stagnation or iteration limit; the trace lists every stage.
        PositivityError: an iterate left the positive cone.
    """
    asm = _Assembler(prob)
    u0 = initial_guess(prob) if guess is None else np.asarray(guess, dtype=float)
    U = asm.unknowns(u0)
    if not np.all(U > 0.0):
        raise PositivityError("initial guess must be positive inside the strip")
    trace: list[str] = []
    total = 0
    res = math.nan
    for k, (delta, u_min, tol) in enumerate(continuation_path(prob)):
        label = f"stage {k + 1} (delta={delta:.1e}, u_min={u_min:.3e})"
        U, its, res = _newton(asm, U, delta, u_min, tol, prob.max_newton, label, trace)
        total += its
        trace.append(f"{label}: {its} iterations, residual {res:.3e}")
        log.debug(f"strip {prob.params.label()} {trace[-1]}")
    return Field2D(problem=prob, u=asm.full(U), iterations=total, residual=res, path=tuple(trace))


def residual(field: Field2D, delta: Optional[float] = None, u_min: float = 0.0) -> float:
    """
    Max over interior control volumes of the relative balance defect
    |fluxes + source| / (sum of |face fluxes| + |source|).

    Raises:
        PositivityError: some interior value is not positive.
    """
    prob = field.problem
    asm = _Assembler(prob)
    u = np.asarray(field.u, dtype=float)
    U = asm.unknowns(u)
    if not np.all(U > 0.0):
        raise PositivityError("field is not positive inside the strip")
    top = None if prob.neumann else u[-1]
    sys = asm.assemble(asm.full(U, top=top), prob.delta_min if delta is None else delta,
                       u_min, jac=False)
    return float(np.max(_relative(sys)))


# ---------------------------------------------------------------------
# Checks on fields
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class BoundsReport:
    c: float
    C: float
    window: tuple
    passed: bool


def check_bounds(field: Field2D, C_lo: float, C_hi: float, window: Sequence[float]) -> BoundsReport:
    """
    Tightest (c, C) with c y^beta <= u <= C y^beta on the window, first row excluded.

    passed is C_lo <= c and C <= C_hi.
    """
    y = field.y
    beta = field.problem.params.beta_u
    lo, hi = window
    rows = (np.arange(len(y)) >= 2) & (y > lo) & (y <= hi)
    if not np.any(rows):
        raise RangeError(f"window ({lo:g}, {hi:g}) holds no mesh rows", params={"value": hi, "lo": lo, "hi": hi})
    ratio = field.u[rows] / y[rows, None] ** beta
    c, C = float(np.min(ratio)), float(np.max(ratio))
    return BoundsReport(c=c, C=C, window=(lo, hi), passed=bool(C_lo <= c and C <= C_hi))


def monotonicity_check(field: Field2D) -> float:
    """Minimum vertical difference quotient over all adjacent node pairs."""
    return float(np.min(np.diff(field.u, axis=0) / np.diff(field.y)[:, None]))


def _vertical_spline(field: Field2D) -> CubicSpline:
    return CubicSpline(field.problem.mesh.xi, field.u, axis=0)


def _sample(field: Field2D, x, y) -> np.ndarray:
    """u at points (x, y) with y inside [0, H]; periodic in x."""
    m = field.problem.mesh
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    cols = _vertical_spline(field)(m.xi_of_y(np.clip(y, 0.0, m.height)))   # (..., nx)
    if m.nx == 1:
        return cols[..., 0]
    xs = np.append(m.x, m.period)
    ext = np.concatenate([cols, cols[..., :1]], axis=-1)
    flat = ext.reshape(-1, m.nx + 1)
    xf = np.broadcast_to(x, y.shape).reshape(-1)
    out = np.array([CubicSpline(xs, row, bc_type="periodic")(xi % m.period) for row, xi in zip(flat, xf)])
    return out.reshape(y.shape)


def reflection_compare(field: Field2D, lam: float) -> float:
    """
    max of u - u_lam over the rows below lam, u_lam(x, y) = u(x, 2 lam - y).

    Raises:
        RangeError: 2 lam exceeds the strip height.
    """
    H = field.problem.height
    if not 0.0 < lam <= 0.5 * H:
        raise RangeError(f"reflection level {lam:g} needs 0 < 2 lam <= {H:g}",
                         params={"value": lam, "lo": 0.0, "hi": 0.5 * H})
    m = field.problem.mesh
    rows = m.y < lam
    refl = _vertical_spline(field)(m.xi_of_y(2.0 * lam - m.y[rows]))
    return float(np.max(field.u[rows] - refl))


def sliding_compare(field: Field2D, nu: Sequence[float], lam: float) -> float:
    """
    max of u(x) - u(x + lam nu) over the points whose shift stays in the strip.

    Raises:
        RangeError: nu is not a unit vector with positive last component, has
            the wrong length, or lam nu_N reaches the top.
    """
    m = field.problem.mesh
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (field.problem.params.N,) or abs(np.linalg.norm(nu) - 1.0) > 1e-12 or not nu[-1] > 0.0:
        raise RangeError("nu must be a unit vector of length N with positive last component",
                         params={"value": str(nu.tolist()), "lo": 0.0, "hi": 1.0})
    if not lam > 0.0 or lam * nu[-1] >= m.height:
        raise RangeError(f"shift {lam:g} leaves the strip", params={"value": lam, "lo": 0.0, "hi": m.height})
    rows = m.y <= m.height - lam * nu[-1]
    yy = m.y[rows] + lam * nu[-1]
    if m.nx == 1 or nu.shape[0] == 1 or nu[0] == 0.0:
        shifted = _vertical_spline(field)(m.xi_of_y(yy))
    else:
        Y, X = np.meshgrid(yy, m.x + lam * nu[0], indexing="ij")
        shifted = _sample(field, X, Y)
    return float(np.max(field.u[rows] - shifted))


def lateral_spread(field: Field2D) -> float:
    """max over rows of (max_x u - min_x u)."""
    return float(np.max(np.ptp(field.u, axis=1)))


def order_compare(field: Field2D, lower: Optional[Callable] = None,
                  upper: Optional[Callable] = None) -> dict:
    """
    Worst violations of lower(y) <= u <= upper(y); positive values are violations.
    """
    y = field.y
    out = {}
    if lower is not None:
        out["lower"] = float(np.max(np.asarray(lower(y))[:, None] - field.u))
    if upper is not None:
        out["upper"] = float(np.max(field.u - np.asarray(upper(y))[:, None]))
    return out


# ---------------------------------------------------------------------
# Oracle comparisons
# ---------------------------------------------------------------------

def oracle_error(field: Field2D, exact: Callable[[np.ndarray], np.ndarray]) -> float:
    """Relative sup error against an x-independent profile, over rows y > 0."""
    y = field.y[1:]
    ref = np.asarray(exact(y), dtype=float)
    return float(np.max(np.abs(field.u[1:] - ref[:, None])) / np.max(np.abs(ref)))


def observed_order(coarse_error: float, fine_error: float, ratio: float = 2.0) -> float:
    return math.log(coarse_error / fine_error) / math.log(ratio)


def refinement_study(prob: StripProblem, exact: Callable[[np.ndarray], np.ndarray],
                     levels: int = 2) -> list[tuple[int, float]]:
    """(ny, error) for ny, 2 ny, ... ; nx is kept."""
    out = []
    for k in range(levels):
        p = prob.with_(ny=prob.ny * 2 ** k)
        out.append((p.ny, oracle_error(solve(p), exact)))
    return out
