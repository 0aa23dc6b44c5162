from typing import List, Optional

from core.controllers.command_result import CommandResult
from core.errors.math_errors import DomainError
from core.numerics.analysis import boundary_exponent
from core.numerics.exact1d import build_vM, eval_vM
from core.numerics.pde_strip import StripProblem, TopBC, monotonicity_check, solve
from core.services.export import ExportService, field_table, fmt, output_path, tag
from core.services.run_config import RunConfig


_TOP = {
    "v0": TopBC.DIRICHLET_V0,
    "const": TopBC.DIRICHLET_CONST,
    "vM": TopBC.DIRICHLET_CONST,
    "neumann": TopBC.NEUMANN_SLOPE,
}


def build_problem(rc: RunConfig) -> StripProblem:
    """StripProblem from a resolved 'solve' RunConfig; N = 1 forces nx = 1."""
    params = rc.params()
    top = rc["top"]
    top_value = rc["top_value"]
    if top == "vM":
        height = rc["height"]
        sol = build_vM(params.with_(N=1), rc["M"], t_max=1.5 * height)
        top_value, _ = eval_vM(sol, height)
    return StripProblem(
        params=params,
        height=rc["height"],
        period=rc["period"],
        nx=1 if params.N == 1 else rc["nx"],
        ny=rc["ny"],
        grading=rc["grading"],
        top_bc=_TOP[top],
        top_value=top_value,
        top_slope=rc["top_slope"],
        shift_s=rc["s"],
        shift_eps=rc["eps"],
        perturbation=rc["perturbation"],
        mode=rc["mode"],
        rtol=rc["rtol"],
        max_newton=rc["max_newton"],
        delta_max=rc["delta_max"],
        delta_min=rc["delta_min"],
    )


def solve_handler(ctx, *, pairs: Optional[List[str]] = None, config_file: Optional[str] = None,
                  out: Optional[str] = None) -> CommandResult:
    """
    Handler for the 'solve' command.

    Solves the truncated strip problem, writes the field as
    `x1,xN,u` (`xN,u` for N = 1) and a gnuplot script next to it, and prints
    the summary line `min_dudxN=... residual=... iterations=...` on stdout.

    Raises:
        ConfigError / DomainError: bad keys or an unassemblable problem.
        SolveError, PositivityError: the continuation trace goes to stderr.
    """
    rc = RunConfig.build(ctx, "solve", pairs, config_file)
    prob = build_problem(rc)
    ctx.log.key("solve.started", label=prob.params.label(), nx=prob.nx, ny=prob.ny, top=rc["top"])
    field = solve(prob)
    for line in field.path:
        ctx.log.debug(line)

    lateral = prob.params.N == 2
    path = output_path(ctx, out, f"strip_N{prob.params.N}_p{tag(prob.params.p)}_g{tag(prob.params.gamma)}")
    header, columns = field_table(field.x, field.y, field.u, lateral)
    export = ExportService()
    export.write_csv(path, header, columns)

    constant = None
    try:
        fit = boundary_exponent(field)
        constant = fit.constant
        ctx.log.key("solve.fit", exponent=f"{fit.exponent:.6g}", target=f"{prob.params.beta_u:.6g}")
    except DomainError as e:
        ctx.log.warn(f"no boundary fit: {e}")
    nx = len(field.x)
    slices = [field.x[0], field.x[nx // 4], field.x[nx // 2]] if lateral else []
    script = export.write_gnuplot(path.with_suffix(".gp"), path, n_lateral=1 if lateral else 0,
                                  beta=prob.params.beta_u, constant=constant, slices=slices,
                                  title=prob.params.label())

    min_slope = monotonicity_check(field)
    ctx.presenter.help(f"min_dudxN={fmt(min_slope)} residual={fmt(field.residual)} "
                       f"iterations={field.iterations}")
    return CommandResult(
        code="success", outcome=True,
        params={"path": str(path), "script": str(script), "iterations": field.iterations},
        payload={"path": path, "script": script, "field": field, "min_dudxN": min_slope},
    )
