from typing import List, Optional

from core.controllers.command_result import CommandResult
from core.numerics.eigen_radial import eigenvalue_on_ball, radial_residual, solve_eigen
from core.services.export import ExportService, fmt, output_path, tag
from core.services.run_config import RunConfig


def eigen_handler(ctx, *, pairs: Optional[List[str]] = None, config_file: Optional[str] = None,
                  out: Optional[str] = None) -> CommandResult:
    """
    Handler for the 'eigen' command.

    Writes `r,phi,dphi` for phi_R(s) = phi_1(s / R) on the ball of radius R
    and reports lambda1 and lambda1 R^(-p).
    """
    rc = RunConfig.build(ctx, "eigen", pairs, config_file)
    N, p, R = rc["N"], rc["p"], rc["R"]
    pair = solve_eigen(N, p, tol=rc["tol"], samples=rc["samples"])
    lam_R = eigenvalue_on_ball(pair, R)

    path = output_path(ctx, out, f"eigen_N{N}_p{tag(p)}_R{tag(R)}")
    ExportService().write_csv(path, ("r", "phi", "dphi"), (R * pair.r, pair.phi, pair.dphi / R))
    ctx.log.debug(f"radial residual on B_R: {radial_residual(pair, R):.3e}")
    ctx.presenter.help(f"lambda1={fmt(pair.lambda1)} lambda1_R={fmt(lam_R)}")
    return CommandResult(
        code="success", outcome=True,
        params={"path": str(path), "lambda1": f"{pair.lambda1:.12g}", "lambda_R": f"{lam_R:.12g}"},
        payload={"path": path, "pair": pair},
    )
