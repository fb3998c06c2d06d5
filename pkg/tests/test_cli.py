import json
import subprocess
import sys

import pytest

from collapse_spectra import cli
from collapse_spectra.errors import ConfigInvalid
from collapse_spectra.scenarios import list_scenarios, run_scenario_checks


def test_list_scenarios():
    rows = list_scenarios()
    names = [name for name, _, _ in rows]
    assert "heisenberg" in names
    assert "gt-family" in names
    assert len(rows) >= 10
    assert names == sorted(names)


def test_all_scenarios_pass_in_memory():
    for name, _, _ in list_scenarios():
        result = run_scenario_checks(name, seed=0)
        assert result.passed, (name, [c for c in result.checks
                                      if not c.passed])


def test_cli_list_exit_code():
    assert cli.main(["list"]) == 0


def test_cli_unknown_scenario():
    assert cli.main(["no-such-scenario"]) == 2


def test_cli_run_and_determinism(tmp_path, capsys):
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    assert cli.main(["heisenberg", "--out", str(out1), "--seed", "3"]) == 0
    assert cli.main(["heisenberg", "--out", str(out2), "--seed", "3"]) == 0
    assert (out1 / "spectra.csv").read_bytes() \
        == (out2 / "spectra.csv").read_bytes()
    m1 = json.loads((out1 / "manifest.json").read_text())
    m2 = json.loads((out2 / "manifest.json").read_text())
    assert m1 == m2
    assert m1["passed"] and m1["artifacts"][0]["sha256"] \
        == m2["artifacts"][0]["sha256"]


def test_cli_eps_grid_flag(tmp_path):
    assert cli.main(["heisenberg", "--out", str(tmp_path),
                     "--eps-grid", "0.5,0.25"]) == 0
    body = (tmp_path / "spectra.csv").read_text()
    assert len(body.splitlines()) == 3


def test_cli_config_file(tmp_path):
    config = tmp_path / "run.ini"
    config.write_text(
        "[scenario]\n"
        "name = mapping-torus\n"
        "seed = 1\n"
        "eps_grid = 0.5, 0.25, 0.125\n"
        "[params]\n"
        "k = 0\n"
        "B =\n"
        "    0 1 0\n"
        "    0 0 1\n"
        "    0 0 0\n")
    out = tmp_path / "out"
    assert cli.main(["mapping-torus", "--config", str(config),
                     "--out", str(out)]) == 0
    body = (out / "collapse.csv").read_text()
    assert body.splitlines()[0].startswith("eps,eig_1")


def test_cli_config_name_mismatch(tmp_path):
    config = tmp_path / "run.ini"
    config.write_text("[scenario]\nname = heisenberg\n")
    assert cli.main(["gt-family", "--config", str(config)]) == 2


def test_cli_invalid_param(tmp_path):
    config = tmp_path / "run.ini"
    config.write_text("[params]\nnot_a_knob = 1\n")
    assert cli.main(["heisenberg", "--config", str(config),
                     "--out", str(tmp_path / "o")]) == 2


def test_cli_invalid_eps_grid(tmp_path):
    assert cli.main(["heisenberg", "--out", str(tmp_path),
                     "--eps-grid", "1.5,0.5"]) == 2


def test_cli_corrupt_tolerance_config(tmp_path):
    config = tmp_path / "bad.ini"
    config.write_text("[tolerances]\nheisenberg_rtol = not-a-number\n")
    assert cli.main(["verify-all", "--config", str(config),
                     "--out", str(tmp_path / "o")]) == 2
    config.write_text("[tolerances]\nunknown_tol = 1e-3\n")
    assert cli.main(["verify-all", "--config", str(config),
                     "--out", str(tmp_path / "o")]) == 2


def test_config_reader_rejects_bad_section(tmp_path):
    config = tmp_path / "bad.ini"
    config.write_text("[mystery]\nkey = 1\n")
    with pytest.raises(ConfigInvalid):
        cli._read_config(str(config))


def test_env_var_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("COLLAPSE_SPECTRA_OUT", str(tmp_path / "env-out"))
    assert cli.main(["heisenberg"]) == 0
    assert (tmp_path / "env-out" / "spectra.csv").exists()


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "collapse_spectra.cli",
                           "list"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "heisenberg" in proc.stdout


def test_scenario_config_dataclass():
    from collapse_spectra.scenarios import ScenarioConfig
    from collapse_spectra.errors import ScenarioUnknown

    cfg = ScenarioConfig("heisenberg", {"gamma": 2}, seed=1,
                         eps_grid=(0.5, 0.1))
    assert cfg.grid == (0.5, 0.1)
    assert cfg.run().passed
    with pytest.raises(ScenarioUnknown):
        ScenarioConfig("nope")
    with pytest.raises(ConfigInvalid):
        ScenarioConfig("heisenberg", {"bad": 1})
    with pytest.raises(ConfigInvalid):
        ScenarioConfig("heisenberg", eps_grid=(2.0,))
    with pytest.raises(ConfigInvalid):
        ScenarioConfig("heisenberg", seed="zero")


def test_run_manifest_round_trip(tmp_path):
    from collapse_spectra.scenarios import ScenarioConfig

    manifest = cli.run_scenario(ScenarioConfig("heisenberg"),
                                out_dir=tmp_path)
    loaded = json.loads((tmp_path / "manifest.json").read_text())
    assert loaded == manifest.as_dict()
    assert loaded["tag"] == "small-eigenvalue-rate"


def test_csv_bodies_use_plain_float_repr():
    for name, _, _ in list_scenarios():
        result = run_scenario_checks(name, seed=0)
        for fname, body in result.artifacts.items():
            assert "np.float64" not in body, (name, fname)
            assert "(" not in body.splitlines()[1], (name, fname)


def test_cli_verify_all_byte_identical(tmp_path):
    out1 = tmp_path / "v1"
    out2 = tmp_path / "v2"
    assert cli.main(["verify-all", "--out", str(out1)]) == 0
    assert cli.main(["verify-all", "--out", str(out2)]) == 0
    files1 = sorted(p.relative_to(out1) for p in out1.rglob("*")
                    if p.is_file())
    files2 = sorted(p.relative_to(out2) for p in out2.rglob("*")
                    if p.is_file())
    assert files1 == files2 and len(files1) >= 15
    for rel in files1:
        assert (out1 / rel).read_bytes() == (out2 / rel).read_bytes(), rel


def test_cli_seed_precedence(tmp_path):
    config = tmp_path / "run.ini"
    config.write_text("[scenario]\nname = euler-bound\nseed = 5\n")
    out = tmp_path / "o"
    assert cli.main(["euler-bound", "--config", str(config), "--out",
                     str(out), "--seed", "9"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 9
    assert cli.main(["euler-bound", "--config", str(config), "--out",
                     str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 5
