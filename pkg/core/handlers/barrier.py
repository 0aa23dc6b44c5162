from typing import List, Optional

from core.controllers.command_result import CommandResult
from core.numerics.barriers import (
    VALIDATION_TOL, Barrier, annulus_chain_bounds, build_annulus_barrier, build_eigen_power,
    build_linear_lower, build_v0_shift, build_wmu, validate_barrier,
)
from core.numerics.eigen_radial import solve_eigen
from core.services.export import ExportService, output_path
from core.services.run_config import RunConfig


HEADER = ("x", "w", "dw", "operator", "margin")

# an invalid barrier is a numerical claim that failed
INVALID_EXIT = 3


def build_barrier(ctx, rc: RunConfig) -> Barrier:
    """Barrier named by `kind=` with the keys that kind reads."""
    kind = rc["kind"]
    if kind == "wmu":
        return build_wmu(rc["p"], rc["rho"], rc["c"], rc["mu"], rc["f"])
    if kind == "annulus":
        return build_annulus_barrier(rc["N"], rc["p"], rc["R"], rc["u0"], CH=rc["CH"])
    params = rc.params()
    if kind == "v0_shift":
        return build_v0_shift(params, rc["s"], rc["eps"], rc["height"])
    pair = solve_eigen(params.N, params.p, tol=ctx.config.get("eigen.tol", 1e-10, float))
    if kind == "eigen_power":
        return build_eigen_power(params, rc["c0"], rc["t0"], pair)
    return build_linear_lower(params, rc["c0"], rc["t0"], pair)


def barrier_handler(ctx, *, pairs: Optional[List[str]] = None, config_file: Optional[str] = None,
                    out: Optional[str] = None) -> CommandResult:
    """
    Handler for the 'barrier' command.

    Builds the barrier, applies -Delta_p on its default grid and writes
    `x,w,dw,operator,margin` at the validation nodes (margin < 0 where the
    claimed inequality fails).

    Returns:
        CommandResult:
            - code="success" if the worst violation is within tolerance.
            - code="invalid" (exit 3) otherwise, with the worst node.
    """
    rc = RunConfig.build(ctx, "barrier", pairs, config_file)
    b = build_barrier(ctx, rc)
    report = validate_barrier(b)
    x = report.nodes

    path = output_path(ctx, out, f"barrier_{b.kind.value}")
    ExportService().write_csv(path, HEADER, (x, b.value(x), b.slope(x), report.operator, report.margins))

    if rc["kind"] == "annulus":
        for name, value in annulus_chain_bounds(b).items():
            ctx.log.debug(f"{name}: {value:.6g}")
    params = {"kind": b.kind.value, "sense": b.sense.value, "path": str(path),
              "violation": f"{report.worst_violation:.3e}", "node": f"{report.worst_node:.6g}",
              "equation": f"{report.equation_residual:.3e}"}
    if report.passed(VALIDATION_TOL):
        return CommandResult(code="success", outcome=True, params=params,
                             payload={"path": path, "barrier": b, "report": report})
    return CommandResult(code="invalid", outcome=False, params=params,
                         payload={"path": path, "barrier": b, "report": report},
                         exit_code=INVALID_EXIT)
