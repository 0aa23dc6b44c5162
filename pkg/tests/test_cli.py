import json

import numpy as np
import pytest

from conftest import ROOT
from core.controllers.command_factory import summon, summon_argv
from core.errors.command_errors import ParseError, UnknownCommandError
from core.services.run_config import RunConfig
from main import run


def _cases():
    return json.loads((ROOT / "tests" / "cmd_cases.json").read_text(encoding="utf-8"))


@pytest.mark.parametrize("case", _cases(), ids=lambda c: c["cmd"])
def test_command_case(nexus, case):
    cmd = summon(case["cmd"], nexus)
    assert cmd is not None, nexus.status.joined()
    result = cmd.execute()
    assert result.code == case["expect"], nexus.status.joined()


# ---------------------------------------------------------------------
# parsing and dispatch
# ---------------------------------------------------------------------

def test_unknown_command(nexus):
    with pytest.raises(UnknownCommandError):
        summon("frobnicate p=2", nexus)
    with pytest.raises(ParseError):
        summon_argv([], nexus)


def test_usage_is_printed_without_arguments(nexus):
    assert summon("exact1d", nexus) is None
    assert summon("solve --help", nexus) is None
    assert any("exact1d p=<p>" in t for t in nexus.status.texts)


def test_alias_and_interleaved_options(nexus, tmp_path):
    target = tmp_path / "profile.csv"
    cmd = summon(f"1d p=2 --out {target} gamma=3 points=64", nexus)
    assert cmd.params["out"] == str(target)
    assert cmd.params["pairs"] == ["p=2", "gamma=3", "points=64"]
    assert cmd.execute().outcome
    assert target.exists()


# ---------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------

@pytest.mark.parametrize("argv,code", [
    ([], 1),
    (["frobnicate"], 1),
    (["exact1d"], 1),
    (["exact1d", "p=2", "gamma=3", "bogus=1"], 1),
    (["exact1d", "p=2", "gamma=0.5"], 2),
    (["exact1d", "p=2", "gamma=3", "points=64"], 0),
    (["check", "--only", "C99"], 1),
])
def test_exit_codes(nexus, argv, code):
    assert run(argv, nexus) == code


def test_config_errors_name_the_key(nexus):
    assert run(["exact1d", "p=2", "gamma=3", "colour=red"], nexus) == 1
    text = nexus.status.joined()
    assert "configuration error" in text
    assert "unknown key 'colour'" in text


def test_config_file_errors_name_the_line(nexus, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("# profile\np=2\nsmoothness=4\ngamma=3\n", encoding="utf-8")
    assert run(["exact1d", "--config", str(cfg)], nexus) == 1
    text = nexus.status.joined()
    assert "unknown key 'smoothness'" in text
    assert "(line 3)" in text


def test_domain_errors_are_rendered(nexus):
    assert run(["exact1d", "p=0.5", "gamma=3"], nexus) == 1
    assert "invalid parameter: p must exceed 1" in nexus.status.joined()


def test_nonexistence_message_and_witness(nexus):
    assert run(["exact1d", "p=2", "gamma=0.5"], nexus) == 2
    text = nexus.status.joined()
    assert "nonexistent (gamma<=1)" in text
    assert "witness" in text


def test_invalid_barrier_exits_3(nexus):
    result = summon("barrier kind=v0_shift p=2 gamma=3 s=0.5 eps=0.1", nexus).execute()
    assert result.code == "invalid"
    assert result.exit_code == 3


# ---------------------------------------------------------------------
# output files
# ---------------------------------------------------------------------

def _read(path):
    return path.read_text(encoding="utf-8")


def test_exact1d_csv_format(nexus):
    result = summon("exact1d p=2 gamma=3 M=0 points=64 t_max=4", nexus).execute()
    path = result.payload["path"]
    assert path.name == "exact1d_p2_g3_M0.csv"
    text = _read(path)
    assert "\r" not in text
    lines = text.splitlines()
    assert lines[0] == "t,v,v_prime,energy_residual"
    assert len(lines) == 1 + result.params["rows"]
    t, v = (float(s) for s in lines[-1].split(",")[:2])
    assert v == pytest.approx(np.sqrt(2.0 * t), rel=1e-14)


def test_output_is_deterministic(nexus, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for target in (a, b):
        assert run(["exact1d", "p=3", "gamma=2", "M=1", "t_max=5", "points=128", "--out", str(target)], nexus) == 0
    assert _read(a) == _read(b)


def test_solve_writes_field_and_script(nexus):
    result = summon("solve p=2 gamma=3 ny=48", nexus).execute()
    assert result.outcome
    csv = result.payload["path"]
    assert _read(csv).splitlines()[0] == "xN,u"
    assert csv.with_suffix(".gp").exists()
    assert any(t.startswith("min_dudxN=") for t in nexus.stdout.texts)


def test_sweep_index(nexus):
    result = summon("sweep p=2 gamma=0.5,3 M=1 points=64 workers=2", nexus).execute()
    assert result.code == "partial"
    assert result.exit_code == 0
    rows = _read(nexus.out_dir / "sweep_index.csv").splitlines()
    assert rows[0] == "p,gamma,M,status,residual,path"
    statuses = sorted(r.split(",")[3] for r in rows[1:])
    assert statuses == ["nonexistent", "ok"]


def test_eigen_prints_eigenvalue(nexus):
    assert summon("eigen N=1 p=2 R=2 samples=401", nexus).execute().outcome
    line = next(t for t in nexus.stdout.texts if t.startswith("lambda1="))
    fields = dict(kv.split("=") for kv in line.split())
    assert float(fields["lambda1_R"]) == pytest.approx(float(fields["lambda1"]) / 4.0, rel=1e-12)


# ---------------------------------------------------------------------
# seed
# ---------------------------------------------------------------------

def test_env_seed_wins(nexus, monkeypatch):
    assert RunConfig.build(nexus, "check").seed == nexus.config.get("seed")
    monkeypatch.setenv("SPLAP_SEED", "7")
    rc = RunConfig.build(nexus, "check", ["seed=3"])
    assert rc.seed == 7
    assert rc.sources["seed"] == "env"


def test_bad_env_seed(nexus, monkeypatch):
    monkeypatch.setenv("SPLAP_SEED", "x")
    assert run(["check", "--only", "C13"], nexus) == 1


# ---------------------------------------------------------------------
# command lifecycle
# ---------------------------------------------------------------------

def test_inline_option_value_and_bad_options(nexus, tmp_path):
    target = tmp_path / "inline.csv"
    cmd = summon(f"exact1d p=2 gamma=3 points=64 --out={target}", nexus)
    assert cmd.params["out"] == str(target)
    with pytest.raises(ParseError):
        summon("exact1d p=2 --colour red", nexus)
    with pytest.raises(ParseError):
        summon("exact1d p=2 --out", nexus)
    with pytest.raises(ParseError):
        summon("check --list=yes", nexus)


def test_result_carries_wall_time(nexus):
    result = summon("exact1d p=2 gamma=3 points=64", nexus).execute()
    assert result.payload["seconds"] >= 0.0


@pytest.mark.parametrize("numerical,code", [(True, 3), (False, 1)])
def test_unexpected_errors_are_contained(nexus, numerical, code):
    from core.controllers.command_core import Command, CommandState

    def broken(ctx, **_):
        raise RuntimeError("boom")

    cmd = Command(nexus, "broken", "broken", {"messages": {}}, {}, broken, numerical)
    result = cmd.execute()
    assert (result.code, result.exit_code) == ("unexpected_error", code)
    assert cmd.state is CommandState.EXECUTION_ERROR
    assert "RuntimeError: boom" in nexus.status.joined()
