from concurrent.futures import ThreadPoolExecutor
from itertools import product
from pathlib import Path
from typing import List, Optional

from core.controllers.command_result import CommandResult
from core.errors.math_errors import NonexistenceError, SplapError
from core.handlers.exact1d import profile_stem, require_existence, write_profile
from core.numerics.exact1d import build_vM
from core.numerics.params import Params
from core.services.export import ExportService, fmt, output_path
from core.services.run_config import RunConfig


INDEX_HEADER = ("p", "gamma", "M", "status", "residual", "path")


def _job(params: Params, M: float, t_max: float, points: int, path: Path) -> tuple:
    """One grid point; returns an index row. Numerical failures become a status."""
    try:
        require_existence(params, M)
        sol = build_vM(params, M, t_max=t_max, points=points)
        worst = write_profile(sol, path)
        return (params.p, params.gamma, M, "ok", worst, str(path))
    except NonexistenceError:
        return (params.p, params.gamma, M, "nonexistent", float("nan"), "")
    except SplapError as e:
        return (params.p, params.gamma, M, e.code, float("nan"), "")


def sweep_handler(ctx, *, pairs: Optional[List[str]] = None, config_file: Optional[str] = None,
                  out: Optional[str] = None) -> CommandResult:
    """
    Handler for the 'sweep' command.

    Runs exact1d over the product of the p, gamma and M lists in a thread
    pool. Each job writes its own CSV; `sweep_index.csv` lists every grid
    point in grid order with its status. Nonexistent combinations are noted
    in the index, not raised.

    Returns:
        CommandResult:
            - code="success" when every grid point was tabulated.
            - code="partial" (exit 0) when some points are nonexistent or failed.
    """
    rc = RunConfig.build(ctx, "sweep", pairs, config_file)
    out_dir = Path(out) if out else ctx.out_dir
    g = rc["g"]
    grid = [(Params(p=p, gamma=gamma, N=1, g=g), M)
            for p, gamma, M in product(rc["p"], rc["gamma"], rc["M"])]
    workers = max(1, int(rc["workers"]))
    ctx.log.key("sweep.started", jobs=len(grid), workers=workers)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_job, params, M, rc["t_max"], rc["points"],
                               output_path(ctx, str(out_dir) + "/", profile_stem(params, M)))
                   for params, M in grid]
        rows = [f.result() for f in futures]

    index = ExportService().write_rows(out_dir / "sweep_index.csv", INDEX_HEADER, rows)
    failed = [r for r in rows if r[3] != "ok"]
    for r in failed:
        ctx.log.key("sweep.skipped", p=fmt(r[0]), gamma=fmt(r[1]), M=fmt(r[2]), status=r[3])
    code = "partial" if failed else "success"
    return CommandResult(
        code=code, outcome=True,
        params={"index": str(index), "jobs": len(rows), "ok": len(rows) - len(failed),
                "skipped": len(failed)},
        payload={"index": index, "rows": rows},
    )
