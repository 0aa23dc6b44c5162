from pathlib import Path
from typing import List, Optional

import numpy as np

from core.controllers.command_result import CommandResult
from core.errors.math_errors import NonexistenceError
from core.numerics.exact1d import (
    QuadratureSolution, build_vM, energy_residual, eval_v0, eval_v0_prime, eval_vM,
    growth_report, nonexistence_diagnostic,
)
from core.numerics.params import Params
from core.services.export import ExportService, output_path, tag
from core.services.run_config import RunConfig


HEADER = ("t", "v", "v_prime", "energy_residual")


def require_existence(params: Params, M: float) -> None:
    """
    Raises:
        NonexistenceError: gamma <= 1; the trace carries the energy witness.
    """
    report = nonexistence_diagnostic(params, M if M > 0.0 else 1.0)
    if report.exists:
        return
    trace = [f"witness: {report.witness}", f"threshold v* = {report.threshold:.6g}"]
    trace += [f"v={v:.3g} term={e:.6g}" for v, e in report.samples]
    raise NonexistenceError(f"nonexistent (gamma<=1): {params.label()} has no half-line solution",
                            params={"p": params.p, "gamma": params.gamma}, trace=trace)


def profile_stem(params: Params, M: float) -> str:
    return f"exact1d_p{tag(params.p)}_g{tag(params.gamma)}_M{tag(M)}"


def write_profile(sol: QuadratureSolution, path: Path, method: str = "identity") -> float:
    """
    Write the table of `sol`; returns the largest |energy residual|.

    The first row is the boundary node t = 0 where v' is infinite and the
    residual undefined (written as nan). M = 0 rows use the closed form.
    """
    params, t = sol.params, sol.t
    if sol.M == 0.0:
        v, vp = eval_v0(params, t), eval_v0_prime(params, t)
    else:
        v, vp = eval_vM(sol, t)

    res = np.full(len(t), np.nan)
    e = energy_residual(sol, method)
    # fd residuals live on interior nodes of t[1:]
    offset = 1 if method == "identity" else 3
    res[offset:offset + len(e)] = e
    ExportService().write_csv(path, HEADER, (t, v, vp, res))
    finite = res[np.isfinite(res)]
    return float(np.max(np.abs(finite))) if finite.size else float("nan")


def exact1d_handler(ctx, *, pairs: Optional[List[str]] = None, config_file: Optional[str] = None,
                    out: Optional[str] = None) -> CommandResult:
    """
    Handler for the 'exact1d' command.

    Tabulates v_M and writes `t,v,v_prime,energy_residual`, one row per
    table node.

    Raises:
        ConfigError: unknown key or bad value.
        NonexistenceError: gamma <= 1.
    """
    rc = RunConfig.build(ctx, "exact1d", pairs, config_file)
    params = rc.params(N=1)
    M = float(rc["M"])
    require_existence(params, M)

    sol = build_vM(params, M, t_max=rc["t_max"], points=rc["points"])
    path = output_path(ctx, out, profile_stem(params, M))
    worst = write_profile(sol, path, rc["residual"])

    for ti, ratio in growth_report(sol, n=4):
        ctx.log.debug(f"v(t)/t at t={ti:.4g}: {ratio:.6g}")
    return CommandResult(
        code="success", outcome=True,
        params={"path": str(path), "rows": len(sol.t), "residual": f"{worst:.3e}"},
        payload={"path": path, "solution": sol},
    )
