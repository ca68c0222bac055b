import csv
import json
import shutil
import subprocess
import sys
from pathlib import Path

import mpmath
import pytest

from degone import __version__
from degone.cli import ELL_DEFAULTS, load_ell_config, main
from degone.errors import ParseError

GOLDEN = Path(__file__).parent / "golden"

GM_GAUSSIAN = ["gm-scan", "--poly", "x^2+1", "--base", "1+2*t", "--nmax", "12"]
GM_PHI2 = ["gm-scan", "--poly", "x^2-x-1", "--base", "t^2", "--S", "5", "--nmax", "9", "--format", "json"]
ELL_RATIONAL = ["ell-scan", "--nmax", "4"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- golden files


@pytest.mark.parametrize("argv, name", [
    (GM_GAUSSIAN, "gm_gaussian.csv"),
    (GM_PHI2, "gm_phi2.json"),
    (ELL_RATIONAL, "ell_rational.csv"),
])
def test_golden_output(tmp_path, capsys, argv, name):
    out = tmp_path / name
    code, _, _ = run(capsys, *argv, "--out", str(out))
    assert code == 0
    assert out.read_bytes() == (GOLDEN / name).read_bytes()


def test_scan_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, *GM_GAUSSIAN, "--out", str(a))
    run(capsys, *GM_GAUSSIAN, "--out", str(b), "--jobs", "3")
    assert a.read_bytes() == b.read_bytes()


def test_header_embeds_config(capsys):
    code, out, _ = run(capsys, *GM_GAUSSIAN)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == f"# degone {__version__}"
    config = json.loads(lines[1].removeprefix("# config: "))
    assert config["poly"] == "x^2+1" and config["nmax"] == 12
    assert lines[2].startswith("# config_sha256: ") and len(lines[2].split()[-1]) == 64
    assert "# precision: 192" in lines and "# tolerance: 1e-09" in lines
    assert "# classification: clean" in lines


def test_config_hash_tracks_config(capsys):
    _, a, _ = run(capsys, *GM_GAUSSIAN)
    _, b, _ = run(capsys, *GM_GAUSSIAN[:-1], "11")
    ha = [l for l in a.splitlines() if l.startswith("# config_sha256")]
    hb = [l for l in b.splitlines() if l.startswith("# config_sha256")]
    assert ha != hb


# -- gm-scan


def test_gm_scan_gaussian_forty_rows(capsys):
    code, out, _ = run(capsys, "gm-scan", "--poly", "x^2+1", "--base", "1+2*t")
    assert code == 0
    body = [l for l in out.splitlines() if not l.startswith("#")]
    assert body[0].split(",")[-2:] == ["flag_eps", "skip"]
    assert len(body) == 41


def test_gm_scan_phi_squared_banner(capsys):
    code, out, _ = run(capsys, *GM_PHI2)
    assert code == 0
    doc = json.loads(out)
    assert doc["banner"].startswith("classification: violates_b")
    assert [r["n"] for r in doc["rows"]] == list(range(1, 10))


def test_gm_scan_empty_range_is_header_only(capsys):
    code, out, _ = run(capsys, *GM_GAUSSIAN[:-2], "--nmin", "5", "--nmax", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[-1].startswith("n,u,")
    assert all(l.startswith("#") for l in lines[:-1])


def test_gm_scan_rejects_non_s_unit(capsys):
    code, _, err = run(capsys, *GM_GAUSSIAN, "--S", "3")
    assert code == 2 and "NotAnSUnit" in err


# -- other subcommands


def test_field_info(capsys):
    code, out, _ = run(capsys, "field-info", "--poly", "x^2-x-1", "--bound", "12")
    assert code == 0
    assert "disc_g: 5" in out
    assert "p=2: inert" in out and "p=5: ramified" in out and "p=11: split" in out
    code, out, _ = run(capsys, "field-info", "--poly", "x^2+1", "--bound", "5")
    assert "p=3: inert" in out


def test_field_info_errors(capsys):
    code, _, err = run(capsys, "field-info", "--poly", "x^2-1")
    assert code == 2 and "NotIrreducible" in err
    code, _, err = run(capsys, "field-info", "--poly", "x^2+*1")
    assert code == 2 and "position 4" in err
    code, out, _ = run(capsys, "field-info", "--poly", "x^2+8", "--bound", "10")
    assert code == 3 and "divides the index" in out


def test_factor_json(capsys):
    code, out, _ = run(capsys, "factor", "--poly", "x^2-x-1", "--elem", "130")
    assert code == 0
    doc = json.loads(out)
    assert [f["p"] for f in doc["factors"]] == [2, 5, 13]
    assert doc["norm"] == "16900"


def test_height_routes(capsys):
    code, out, _ = run(capsys, "height", "--poly", "x^2+1", "--elem", "1+2*t")
    assert code == 0
    h = float(next(l for l in out.splitlines() if l.startswith("h:")).split()[-1])
    assert abs(h - 0.5 * mpmath.log(5)) < 1e-12


def test_precision_failure_exit_code(capsys, monkeypatch):
    def refuse(*a, **k):
        raise mpmath.libmp.NoConvergence("forced")
    monkeypatch.setattr(mpmath, "polyroots", refuse)
    code, _, err = run(capsys, "height", "--poly", "x^3-x-1", "--elem", "t+2")
    assert code == 3 and "PrecisionExhausted" in err


def test_low_precision_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["height", "--poly", "x^2+1", "--elem", "t", "--prec", "8"])
    assert info.value.code == 2


def test_fib_demo(capsys):
    code, out, _ = run(capsys, "fib-demo", "--nmax", "21")
    assert code == 0
    row7 = next(l for l in out.splitlines() if l.split()[:1] == ["7"])
    assert row7.split() == ["7", "13", "pass", "pass", "yes", "169"]
    code, _, _ = run(capsys, "fib-demo", "--nmax", "8")
    assert code == 2


# -- ell-scan


def test_ell_scan_witness(capsys):
    code, out, _ = run(capsys, *ELL_RATIONAL)
    assert code == 0
    assert "# witness: exceptional: sigma(1P) = id(1P) with sigma = conj" in out
    rows = [l for l in out.splitlines() if l and not l.startswith("#")][1:]
    assert len(rows) == 4 and all(r.endswith(",1,id,true,false") for r in rows)


def test_ell_scan_torsion_is_input_error(tmp_path, capsys):
    cfg = tmp_path / "t.json"
    cfg.write_text(json.dumps({"a": "0", "b": "1", "P": ["2", "3"]}))
    code, _, err = run(capsys, "ell-scan", "--config", str(cfg))
    assert code == 2 and "TorsionPoint" in err


def test_ell_scan_budget(tmp_path, capsys):
    cfg = tmp_path / "b.json"
    cfg.write_text(json.dumps({"height_budget": 30}))
    code, out, err = run(capsys, "ell-scan", "--config", str(cfg))
    assert code == 0 and "truncated" in err
    rows = list(csv.DictReader([l for l in out.splitlines() if not l.startswith("#")]))
    assert rows[-1]["skip"] == "budget" and rows[-1]["n"] == "5"
    cfg.write_text(json.dumps({"height_budget": 10, "on_budget": "raise"}))
    code, _, err = run(capsys, "ell-scan", "--config", str(cfg))
    assert code == 3 and "BudgetExceeded" in err


def test_ell_config_validation(tmp_path):
    assert load_ell_config() == ELL_DEFAULTS
    assert load_ell_config(overrides={"n_max": 3, "epsilon": None})["n_max"] == 3
    bad = tmp_path / "bad.json"
    bad.write_text('{"nmax": 3}')
    with pytest.raises(ParseError):
        load_ell_config(str(bad))


def test_console_script_entry_point():
    exe = shutil.which("degone")
    cmd = [exe] if exe else [sys.executable, "-m", "degone.cli"]
    proc = subprocess.run(cmd + ["fib-demo", "--nmax", "5"], capture_output=True, text=True)
    assert proc.returncode == 0 and "all identities hold" in proc.stdout
