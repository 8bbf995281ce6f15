import json
import subprocess
import sys

import pytest

from anisohardy.cli import main


def test_list_text(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("identities", "critical", "transform", "all"):
        assert name in out


def test_list_json(capsys):
    assert main(["list", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["order"][0] == "identities"
    assert all(e["verifies"] and e["params"] for e in data["suites"])


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--bogus"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_config_error_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("params:\n  N: [1]\n")
    assert main(["run", str(cfg)]) == 2
    assert "bad.yaml:2" in capsys.readouterr().err


def test_identities_run_writes_outputs(tmp_path):
    assert main(["run", "--suite", "identities", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "results.csv").read_text().splitlines()
    assert lines[0].startswith("suite,check_id,value")
    assert all(",true," in line for line in lines[1:])
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["passed"] and manifest["config"]["suite"] == "identities"


def test_sharpness_plots(tmp_path):
    assert main(["run", "--suite", "sharpness", "--plots", "--out", str(tmp_path)]) == 0
    svgs = sorted(p.name for p in tmp_path.glob("*.svg"))
    assert svgs == ["sweep_critical.svg", "sweep_halfspace.svg", "sweep_subcritical.svg"]
    assert "<svg" in (tmp_path / "sweep_critical.svg").read_text()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "anisohardy", "list"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0 and "sharpness" in proc.stdout
