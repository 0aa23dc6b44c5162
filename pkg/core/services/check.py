import io
import math
import time
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import List, Optional

import psutil
from rich.console import Console

from core.controllers.command_result import CommandResult
from core.errors.math_errors import ConfigError, SplapError
from core.presenters.check_table import check_table
from core.services.criteria import BY_ID, CRITERIA, Criterion, Measurement, SuiteRun
from core.services.export import fmt
from core.services.run_config import RunConfig


SUITE_FAILED_EXIT = 4


@dataclass
class CriterionOutcome:
    """One line of the summary: the deciding measurement of a criterion."""
    id: str
    title: str
    status: str
    measured: float
    target: float
    tolerance: float
    label: str
    seconds: float
    measurements: tuple = ()
    error: str = ""

    def line(self) -> str:
        return "\t".join((self.id, self.status, fmt(self.measured), fmt(self.target), fmt(self.tolerance)))


def check_handler(ctx, *, pairs: Optional[List[str]] = None, config_file: Optional[str] = None,
                  out: Optional[str] = None, list_only: bool = False,
                  only: Optional[str] = None) -> CommandResult:
    """
    Usage: check [tol_scale=X] [seed=N] [trials=N] [--only C01,C08] [--list]

    Runs the acceptance criteria and prints one tab-separated line per
    criterion on stdout: `id status measured target tolerance`. For a
    criterion with several measurements the line shows the failing one,
    or the one closest to its tolerance.

    A report with timings and the peak resident memory sampled after each
    criterion goes to the configured reports directory.

    Returns:
        CommandResult:
            - code="listed" for --list (nothing runs).
            - code="success" when every selected criterion passes.
            - code="partial" with exit code 4 otherwise.
    """
    selected = _select(only)
    if list_only:
        for c in selected:
            ctx.presenter.help(f"{c.id}\t{c.title}")
        return CommandResult(code="listed", outcome=True, params={"count": len(selected)})

    rc = RunConfig.build(ctx, "check", pairs, config_file)
    run = SuiteRun(ctx=ctx, tol_scale=float(rc["tol_scale"]), seed=rc.seed, trials=int(rc["trials"]))
    proc = psutil.Process()
    peak_rss = proc.memory_info().rss

    start_all = time.perf_counter()
    outcomes: List[CriterionOutcome] = []
    for c in selected:
        ctx.log.key("check.running", id=c.id, title=c.title)
        outcome = _run_one(ctx, c, run)
        outcomes.append(outcome)
        ctx.presenter.help(outcome.line())
        peak_rss = max(peak_rss, proc.memory_info().rss)
    total = time.perf_counter() - start_all

    failed = [o for o in outcomes if o.status != "PASS"]
    ctx.log.help(_table_text(outcomes))
    report_path = _write_report(ctx, outcomes, run, total, peak_rss)

    params = {"passed": len(outcomes) - len(failed), "total": len(outcomes),
              "failed": ",".join(o.id for o in failed), "seconds": f"{total:.1f}",
              "report": str(report_path)}
    payload = {"outcomes": outcomes, "report": report_path, "peak_rss": peak_rss}
    if failed:
        return CommandResult(code="partial", outcome=False, params=params, payload=payload,
                             exit_code=SUITE_FAILED_EXIT)
    return CommandResult(code="success", outcome=True, params=params, payload=payload)


# -------------------------
# HELPERS
# -------------------------

def _select(only: Optional[str]) -> List[Criterion]:
    if not only:
        return list(CRITERIA)
    ids = [s.strip().upper() for s in only.split(",") if s.strip()]
    unknown = [i for i in ids if i not in BY_ID]
    if unknown:
        raise ConfigError(f"unknown criterion id(s): {', '.join(unknown)}", params={"key": "--only"})
    return [BY_ID[i] for i in ids]


def _deciding(measurements: List[Measurement], scale: float) -> Measurement:
    failed = [m for m in measurements if not m.passed(scale)]
    if failed:
        return failed[0]
    return max(measurements, key=lambda m: m.usage(scale))


def _run_one(ctx, c: Criterion, run: SuiteRun) -> CriterionOutcome:
    t0 = time.perf_counter()
    try:
        measurements = c.run(run)
    except SplapError as e:
        ctx.log.key("check.crashed", id=c.id, error=str(e))
        for line in e.trace:
            ctx.log.key("errors.trace_line", line=line)
        return CriterionOutcome(c.id, c.title, "ERROR", math.nan, math.nan, math.nan, e.code,
                                time.perf_counter() - t0, error=str(e))
    dt = time.perf_counter() - t0
    m = _deciding(measurements, run.tol_scale)
    status = "PASS" if all(x.passed(run.tol_scale) for x in measurements) else "FAIL"
    for x in measurements:
        ctx.log.debug(f"{c.id} {x.label}: {x.measured:.6g} (target {x.target:.6g}, "
                      f"tol {x.tol(run.tol_scale):.3g}, {x.mode})")
    return CriterionOutcome(c.id, c.title, status, m.measured, m.target, m.tol(run.tol_scale),
                            m.label, dt, tuple(measurements))


def _table_text(outcomes: List[CriterionOutcome]) -> str:
    buf = io.StringIO()
    Console(file=buf, width=110, color_system=None).print(check_table(outcomes))
    return buf.getvalue().rstrip("\n")


def _write_report(ctx, outcomes: List[CriterionOutcome], run: SuiteRun, total: float, peak_rss: int) -> Path:
    lines = ["=== ACCEPTANCE SUITE ===",
             f"tol_scale={fmt(run.tol_scale)} seed={run.seed} trials={run.trials}", ""]
    for o in outcomes:
        lines.append(f"[{o.status}] {o.id} {o.title} ({o.seconds:.2f}s)")
        if o.error:
            lines.append(f"    error: {o.error}")
        for m in o.measurements:
            ok = "ok" if m.passed(run.tol_scale) else "FAILED"
            lines.append(f"    {m.label}: measured={fmt(m.measured)} target={fmt(m.target)} "
                         f"tol={fmt(m.tol(run.tol_scale))} mode={m.mode} {ok}")
    passed = sum(o.status == "PASS" for o in outcomes)
    lines += ["", "=== SUMMARY ===", f"Passed: {passed}/{len(outcomes)}",
              f"Total = {total:.2f}s", f"Peak RSS = {peak_rss / 2 ** 20:.1f} MiB"]

    out_dir = ctx.path("paths.reports", "tests/reports")
    out_dir.mkdir(parents=True, exist_ok=True)
    stamp = datetime.now().strftime("%Y_%m_%d_%H%M%S")
    report_path = out_dir / f"check_report_{stamp}.txt"
    report_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return report_path
