import math

import pytest

from core.controllers.command_factory import summon
from core.numerics import pde_strip as S
from core.services import criteria
from core.services.check import _deciding
from core.services.criteria import Criterion, Measurement, SuiteRun


def test_measurement_modes():
    assert Measurement("a", 1.0, 1.0, 1e-3, "abs").passed(1.0)
    assert not Measurement("a", 1.1, 1.0, 1e-3, "abs").passed(1.0)
    assert Measurement("b", 5e-4, 0.0, 1e-3, "max").passed(1.0)
    assert Measurement("c", 1.2, 1.0, 0.0, "min").passed(1.0)
    assert Measurement("d", -0.1, 0.0, 0.0, "below").passed(1.0)
    assert not Measurement("d", 0.0, 0.0, 0.0, "below").passed(1.0)
    assert not Measurement("e", math.nan, 0.0, 1.0, "max").passed(1.0)


def test_tol_scale_only_widens_scaled_measurements():
    scaled = Measurement("s", 2e-3, 0.0, 1e-3, "max")
    fixed = Measurement("f", 2e-3, 0.0, 1e-3, "max", scaled=False)
    assert scaled.passed(4.0)
    assert not fixed.passed(4.0)


def test_deciding_measurement():
    ok = Measurement("ok", 1e-6, 0.0, 1e-3, "max")
    close = Measurement("close", 9e-4, 0.0, 1e-3, "max")
    bad = Measurement("bad", 2e-3, 0.0, 1e-3, "max")
    assert _deciding([ok, close], 1.0) is close
    assert _deciding([ok, bad, close], 1.0) is bad


def test_every_criterion_is_registered():
    ids = [c.id for c in criteria.CRITERIA]
    assert ids == [f"C{i:02d}" for i in range(1, 15)]
    assert set(criteria.BY_ID) == set(ids)


def test_list_prints_ids_and_titles(nexus):
    result = summon("check --list", nexus).execute()
    assert result.code == "listed"
    assert [t.split("\t")[0] for t in nexus.stdout.texts] == [c.id for c in criteria.CRITERIA]


def test_suite_lines_and_report(nexus):
    result = summon("check --only C01,C14", nexus).execute()
    assert result.code == "success", nexus.status.joined()
    lines = [t for t in nexus.stdout.texts if t.startswith("C")]
    assert [l.split("\t")[:2] for l in lines] == [["C01", "PASS"], ["C14", "PASS"]]
    assert all(len(l.split("\t")) == 5 for l in lines)
    report = result.payload["report"]
    text = report.read_text(encoding="utf-8")
    assert "Passed: 2/2" in text
    assert "Peak RSS" in text
    assert result.payload["peak_rss"] > 0


def test_failed_criterion_exits_4(nexus, monkeypatch):
    def broken(run):
        return [Measurement("always off", 1.0, 0.0, 1e-12, "max")]
    monkeypatch.setitem(criteria.BY_ID, "C01", Criterion("C01", "broken", broken))
    result = summon("check --only C01", nexus).execute()
    assert result.code == "partial"
    assert result.exit_code == 4
    assert nexus.stdout.texts[-1].startswith("C01\tFAIL")


def test_vm_refinement_converges():
    exact = lambda y: criteria.exact1d.eval_vM(criteria._vm1(), y)[0]
    errors = [S.oracle_error(S.solve(criteria._vm_strip(ny)), exact) for ny in (64, 128, 256)]
    assert errors[0] > errors[1] > errors[2] > 0.0
    assert errors[-1] < 2e-3
    assert min(S.observed_order(c, f) for c, f in zip(errors, errors[1:])) >= 1.0


def test_inequality_constants_agree_across_seeds(nexus):
    measurements = criteria.BY_ID["C13"].run(SuiteRun(nexus, seed=11))
    by_label = {m.label: m for m in measurements}
    for label in ("violations", "C1_hat seed drift", "C2_hat seed drift"):
        assert by_label[label].passed(1.0), by_label[label]
