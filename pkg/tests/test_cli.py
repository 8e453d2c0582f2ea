import io
import math
import subprocess
import sys

import pytest

from berger_helix.cli import main, parse_grid, parse_lambda, parse_range
from berger_helix.errors import ConfigurationError, UsageError
from berger_helix.presets import PRESETS, preset_config


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def values(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


def test_constants_output():
    code, text = run("constants", "-e", "1", "-n", "2", "-l", "+1")
    assert code == 0
    v = values(text)
    assert v["B"] == "9" and v["a_tilde"] == "45" and v["b_tilde"] == "-18"
    assert v["alpha1"] == "15" and v["alpha2"] == "3"
    assert v["d"] == "0.4472135955"
    assert v["I"] == "-585"


def test_constants_lambda_spellings():
    assert run("constants", "-e", "2", "-n", "4", "-l", "spacelike") == run("constants", "-e", "2", "-n", "4", "-l", "-1")
    assert parse_lambda("timelike") == 1


def test_invalid_nu_exits_2(capsys):
    code, _ = run("constants", "-e", "1", "-n", "0.5", "-l", "-1")
    assert code == 2
    assert "|nu| > 1" in capsys.readouterr().err


def test_curve_output():
    code, text = run("curve", "-e", "1", "-n", "2", "-l", "+1")
    assert code == 0
    v = values(text)
    assert v["kappa_g"] == "1.7888543820"
    assert v["|tau_g|"] == "1"
    assert float(v["helix_angle"]) == pytest.approx(-math.sqrt(5), abs=1e-9)
    assert v["speed_eps"] == "0.3333333333"


def test_verify_fig3_exit_0(tmp_path):
    code, text = run("verify", "--preset", "fig3", "--grid", "24x24", "--report", str(tmp_path / "r.txt"))
    assert code == 0
    assert text.startswith("summary,pass")
    assert (tmp_path / "r.txt").read_text().endswith(text)


def test_verify_fig2_nu_claim():
    code, text = run("verify", "--preset", "fig2", "--grid", "16x16")
    assert code == 0
    line = next(ln for ln in text.splitlines() if ln.startswith("check,normal[nu_constant],"))
    assert float(line.split(",")[2]) < 1e-8


def test_verify_perturbed_exit_1(capsys):
    code, _ = run("verify", "--preset", "fig2", "--grid", "8x8", "--perturb", "a_tilde=0.01")
    assert code == 1
    assert "FAIL" in capsys.readouterr().err


def test_verify_anticommuting_exit_1():
    code, _ = run("verify", "--preset", "fig2", "--grid", "8x8", "--branch", "anticommuting")
    assert code == 1


def test_tol_flag():
    code, _ = run("verify", "--preset", "fig2", "--grid", "6x6", "--tol", "1e-30")
    assert code == 1
    code, _ = run("verify", "--preset", "fig2", "--grid", "6x6", "--tol", "-1")
    assert code == 2


def test_preset_conflict(capsys):
    code, _ = run("verify", "--preset", "fig1", "-e", "3")
    assert code == 2
    err = capsys.readouterr().err
    assert "conflicts" in err and "--epsilon" in err
    # both causal variants exist for fig1, but not for fig3
    assert run("constants", "--preset", "fig1", "-l", "+1")[0] == 0
    assert run("constants", "--preset", "fig3", "-l", "+1")[0] == 2


def test_missing_parameters():
    assert run("constants", "-e", "1")[0] == 2


def test_argparse_errors():
    assert run("constants", "-e", "1", "-n", "2", "-l", "zero")[0] == 2
    assert run("verify", "--preset", "fig2", "--grid", "8by8")[0] == 2
    assert run("verify", "--preset", "fig2", "--u-range", "0:1", "--s-range", "0:1")[0] == 2
    with pytest.raises(Exception):
        parse_range("2:1")
    assert parse_grid("3X4") == (3, 4)


def test_surface_export(tmp_path, monkeypatch):
    monkeypatch.setenv("HELIX_OUTPUT_DIR", str(tmp_path))
    code, text = run("surface", "--preset", "fig2", "--grid", "8x6", "--format", "obj,ply,csv")
    assert code == 0
    for ext in ("obj", "ply", "csv", "report.txt"):
        assert (tmp_path / f"fig2.{ext}").exists()
    assert "dropped=0" in text
    report = (tmp_path / "fig2.report.txt").read_text()
    assert "meta,dropped_vertices,0" in report
    csv = (tmp_path / "fig2.csv").read_text().splitlines()
    assert csv[0] == "u,v,F1,F2,F3,F4,nu" and len(csv) == 49


def test_surface_out_and_variant_label(tmp_path):
    out = tmp_path / "sub" / "mesh.obj"
    code, _ = run("surface", "--preset", "fig1", "-l", "+1", "--grid", "6x6", "--out", str(out))
    assert code == 0
    assert out.exists() and (tmp_path / "sub" / "mesh.report.txt").exists()
    assert "meta,label,fig1-timelike" in (tmp_path / "sub" / "mesh.report.txt").read_text()


def test_surface_errors(tmp_path):
    assert run("surface", "--preset", "fig2", "--grid", "1x8", "--out", str(tmp_path / "a"))[0] == 2
    assert run("surface", "--preset", "fig2", "--format", "stl", "--out", str(tmp_path / "a"))[0] == 2
    assert run("surface", "--preset", "fig2", "--pole", "7+", "--out", str(tmp_path / "a"))[0] == 2
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run("surface", "--preset", "fig2", "--grid", "4x4", "--out", str(blocker / "m.obj"))[0] == 2


def test_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run("surface", "--preset", "fig3", "--grid", "10x10", "--format", "csv", "--out", str(d / "m.csv"))[0] == 0
    assert (a / "m.csv").read_bytes() == (b / "m.csv").read_bytes()
    assert (a / "m.report.txt").read_bytes() == (b / "m.report.txt").read_bytes()


def test_console_script_entry():
    proc = subprocess.run(
        [sys.executable, "-m", "berger_helix.cli", "constants", "-e", "1", "-n", "2", "-l", "+1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "B=9" in proc.stdout


def test_preset_config():
    cfg = preset_config("fig1")
    root = math.sqrt(1185 / 4)
    assert cfg.resolved_u_range() == pytest.approx((-4 * math.pi / root, 4 * math.pi / root))
    assert cfg.grid().v_range == (-2 * math.pi, 2 * math.pi)
    assert set(PRESETS) == {"fig1", "fig2", "fig3", "fig3bis"}
    with pytest.raises(ConfigurationError):
        preset_config("fig9")
    with pytest.raises(UsageError):
        preset_config("fig3", 1)
    assert preset_config("fig2", u_range=(0.0, 1.0)).resolved_u_range() == (0.0, 1.0)
