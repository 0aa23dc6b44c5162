import pytest

from core.errors.math_errors import ConfigError, DomainError
from core.numerics.params import FunctionSpec
from core.services.run_config import SCHEMAS, RunConfig


def test_defaults_come_from_settings(nexus):
    rc = RunConfig.build(nexus, "solve")
    assert rc["ny"] == nexus.config.get("solver.ny")
    assert rc["rtol"] == nexus.config.get("solver.rtol")
    assert rc["top"] == "v0"
    assert not rc.explicit("ny")


def test_file_then_cli(nexus, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# strip\np = 3\ngamma=2   # inline\n\nny=64\n", encoding="utf-8")
    rc = RunConfig.build(nexus, "solve", ["ny=32"], str(cfg))
    assert rc["p"] == 3.0 and rc["gamma"] == 2.0
    assert rc["ny"] == 32
    assert rc.sources["p"] == f"{cfg}:2"
    assert rc.sources["ny"] == "cli"
    assert rc.explicit("gamma")


def test_bad_line_reports_its_number(nexus, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("p=2\n\nny=lots\n", encoding="utf-8")
    with pytest.raises(ConfigError) as err:
        RunConfig.build(nexus, "solve", None, str(cfg))
    assert "line 3" in str(err.value)
    assert err.value.params["line"] == 3
    assert err.value.exit_code == 1


@pytest.mark.parametrize("pair", ["colour=red", "ny", "ny=1.5", "top=dirichlet", "nx=abc"])
def test_rejected_pairs(nexus, pair):
    with pytest.raises(ConfigError):
        RunConfig.build(nexus, "solve", [pair])


def test_missing_file(nexus, tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.build(nexus, "solve", None, str(tmp_path / "absent.cfg"))


def test_lists_and_functions(nexus):
    rc = RunConfig.build(nexus, "sweep", ["p=2,3", "gamma=1.5;2", "g=exp:1,2"])
    assert rc["p"] == (2.0, 3.0)
    assert rc["gamma"] == (1.5, 2.0)
    assert rc["g"] == FunctionSpec(kind="exp", coeffs=(1.0, 2.0))
    assert RunConfig.build(nexus, "sweep")["M"] == (0.0,)


def test_tabulated_function_resolves_next_to_the_file(nexus, tmp_path):
    (tmp_path / "g.csv").write_text("t,g\n0,0\n1,2\n3,2\n", encoding="utf-8")
    cfg = tmp_path / "run.cfg"
    cfg.write_text("g=table:g.csv\n", encoding="utf-8")
    g = RunConfig.build(nexus, "exact1d", None, str(cfg))["g"]
    assert g.kind == "table"
    assert g.lipschitz == 2.0
    assert float(g(0.5)) == 1.0


def test_params_are_validated(nexus):
    rc = RunConfig.build(nexus, "exact1d", ["p=0.5"])
    with pytest.raises(DomainError):
        rc.params()
    params = RunConfig.build(nexus, "exact1d", ["p=3", "gamma=2", "N=2"]).params(N=1)
    assert (params.p, params.gamma, params.N) == (3.0, 2.0, 1)


def test_optional_float(nexus):
    assert RunConfig.build(nexus, "solve")["grading"] is None
    assert RunConfig.build(nexus, "solve", ["grading=0.5"])["grading"] == 0.5


def test_every_command_has_a_schema():
    assert set(SCHEMAS) == {"exact1d", "solve", "sweep", "eigen", "barrier", "check"}
    assert all("seed" in schema for schema in SCHEMAS.values())


def test_describe_lists_every_key(nexus):
    text = RunConfig.build(nexus, "check", ["tol_scale=2"]).describe()
    assert "tol_scale=2.0" in text
    assert "trials=" in text
