import json

import pytest

from conftest import ROOT
from core.config.config_vault import DEFAULT_CONFIG, ConfigVault


def _keys():
    text = (ROOT / "tests" / "config.txt").read_text(encoding="utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]


@pytest.fixture(scope="module")
def vault():
    return ConfigVault(path=ROOT / "config.json")


def test_documented_keys_exist(vault):
    assert vault.missing(_keys()) == []
    assert vault.missing(["solver.ny", "solver.nope"]) == ["solver.nope"]


def test_shipped_file_matches_defaults():
    on_disk = json.loads((ROOT / "config.json").read_text(encoding="utf-8"))
    assert on_disk == DEFAULT_CONFIG


def test_missing_file_is_created_from_defaults(tmp_path):
    path = tmp_path / "fresh.json"
    vault = ConfigVault(path=path)
    assert path.exists()
    assert vault.get("solver.ny") == 256


def test_partial_file_is_merged_over_defaults(tmp_path):
    path = tmp_path / "partial.json"
    path.write_text(json.dumps({"solver": {"ny": 64}}), encoding="utf-8")
    vault = ConfigVault(path=path)
    assert vault.get("solver.ny") == 64
    assert vault.get("solver.nx") == 128
    assert vault.get("seed", cast=int) == 20240601


def test_bad_json_falls_back_to_defaults(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert ConfigVault(path=path).get("eigen.samples") == 4001


def test_edit_and_save_round_trip(tmp_path):
    path = tmp_path / "c.json"
    vault = ConfigVault(path=path)
    vault.edit("solver.rtol", 1e-8)
    vault.edit({"sweep": {"workers": 2}})
    vault.save()
    again = ConfigVault(path=path)
    assert again.get("solver.rtol") == 1e-8
    assert again.get("sweep.workers") == 2
    assert again.get("solver.ny") == 256


def test_cast_failure_returns_default(tmp_path):
    vault = ConfigVault(path=tmp_path / "c.json")
    assert vault.get("solver.ny", 1, int) == 256
    assert vault.get("paths", 0, int) == 0


def test_bad_numbers_fall_back_and_are_reported(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"solver": {"ny": "many", "nx": 12.5, "rtol": -1.0}, "eigen": {"samples": 801.0}}),
                    encoding="utf-8")
    vault = ConfigVault(path=path)
    assert vault.get("solver.ny") == 256
    assert vault.get("solver.nx") == 128
    assert vault.get("solver.rtol") == 1e-9
    assert vault.get("eigen.samples") == 801.0
    assert len(vault.problems) == 3
    assert any(p.startswith("solver.ny=") for p in vault.problems)


def test_defaults_are_not_shared(tmp_path):
    vault = ConfigVault(path=tmp_path / "c.json")
    vault.edit("solver.ny", 8)
    assert DEFAULT_CONFIG["solver"]["ny"] == 256


def test_resolve_paths(tmp_path):
    vault = ConfigVault(path=tmp_path / "c.json")
    assert vault.resolve("paths.output", "x") == tmp_path / "out"
    assert vault.resolve("paths.output", "x", ROOT) == ROOT / "out"
    assert vault.resolve("paths.nope", "other/") == tmp_path / "other"
    vault.edit("paths.output", str(tmp_path / "abs"))
    assert vault.resolve("paths.output", "x", ROOT) == tmp_path / "abs"


def test_bad_config_is_reported_on_bind(tmp_path):
    from core.log import log
    from core.nexus import SplapNexus

    path = tmp_path / "c.json"
    path.write_text(json.dumps({"logging": False, "solver": {"ny": "many"}}), encoding="utf-8")
    seen = []
    ctx = SplapNexus(config_path=path).bind_core(writer=lambda r, **kw: seen.append(kw.get("raw_text", "")),
                                                 out_writer=lambda r, **kw: None)
    try:
        assert any("solver.ny" in t for t in seen)
    finally:
        ctx.close()
        log.reset()
