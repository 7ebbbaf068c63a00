import csv
import io

import numpy as np
import pytest

from kerrquench.cli import main, parse_float
from kerrquench.io import read_config_file


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def header(text):
    return dict(ln[2:].split("=", 1) for ln in text.splitlines() if ln.startswith("# ") and "=" in ln)


def test_parse_float_pi_forms():
    assert parse_float("pi") == pytest.approx(np.pi)
    assert parse_float("4*pi") == pytest.approx(4 * np.pi)
    assert parse_float("2pi") == pytest.approx(2 * np.pi)
    assert parse_float("pi/2") == pytest.approx(np.pi / 2)
    assert parse_float("-3*pi/4") == pytest.approx(-0.75 * np.pi)
    assert parse_float("1e-3") == 1e-3


def test_all_subcommands_exist(capsys):
    for sub in ("tpcf", "loschmidt-gcs", "loschmidt-glauber", "fourier", "fx-profile", "phasespace",
                "oracle-check"):
        with pytest.raises(SystemExit) as exc:
            main([sub, "--help"])
        assert exc.value.code == 0
    capsys.readouterr()


def test_tpcf_csv_format(capsys):
    code, out, _ = run(capsys, "tpcf", "--S", "2", "--M", "2", "--theta-count", "3", "--theta-stop", "pi/2")
    assert code == 0
    assert out.startswith("# kerrquench tpcf\n")
    h = header(out)
    assert h["S"] == "2" and h["M"] == "2" and h["family"] == "gcs"
    r = rows(out)
    assert list(r[0]) == ["theta", "value_re", "value_im"]
    assert float(r[1]["value_re"]) == pytest.approx(np.cos(np.pi / 4), abs=1e-15)
    # 17 significant digits
    assert r[1]["theta"] == format(np.pi / 4, ".17g")


def test_thermo_gap_halving(capsys):
    code, out, _ = run(capsys, "tpcf", "--thermo-gap", "--lam", "1")
    assert code == 0
    r = rows(out)
    assert [int(x["S"]) for x in r] == [50, 100, 200, 400]
    ratios = [float(x["ratio_to_previous"]) for x in r[1:]]
    assert all(0.4 <= q <= 0.6 for q in ratios)


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nS = 4\nM = 2\ntheta-count = 5\nfamily = gcs\n")
    assert read_config_file(cfg)["theta_count"] == "5"
    code, out, _ = run(capsys, "tpcf", "--config", str(cfg), "--theta-count", "2")
    assert code == 0
    h = header(out)
    assert h["S"] == "4" and h["theta_count"] == "2"
    assert len(rows(out)) == 2


def test_config_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("S 4\n")
    assert run(capsys, "tpcf", "--config", str(bad))[0] == 2
    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("colour = red\n")
    assert run(capsys, "tpcf", "--config", str(unknown))[0] == 2
    assert run(capsys, "tpcf", "--config", str(tmp_path / "missing.cfg"))[0] == 2
    assert run(capsys, "tpcf", "--xi", "1,1j", "--lam", "1")[0] == 2
    assert run(capsys, "tpcf", "--lam", "0.3")[0] == 2
    assert run(capsys, "tpcf", "--S", "abc")[0] == 2
    assert run(capsys, "fourier", "--J", "0.5")[0] == 2
    assert run(capsys, "fourier", "--exact", "--U", "0", "--J", "1")[0] == 2


def test_guard_exit_3(capsys):
    code, _, err = run(capsys, "fourier", "--S", "100", "--M", "100", "--n-x", "64")
    assert code == 3 and "aliasing" in err
    code, _, err = run(capsys, "fourier", "--exact", "--S", "30", "--M", "8", "--J", "0.5", "--theta-count", "2")
    assert code == 3 and "dimension" in err


def test_fourier_exact_deep_lattice(capsys):
    code, out, err = run(capsys, "fourier", "--exact", "--S", "20", "--M", "2", "--n-x", "4096")
    assert code == 0 and "max |diff|" in err
    r = rows(out)
    assert len(r) == 64
    assert max(float(x["abs_diff"]) for x in r) < 1e-8
    assert header(out)["relation"] == "exact-deep-lattice"


def test_fourier_exact_bose_hubbard_and_time_unit(capsys):
    code, out, _ = run(capsys, "fourier", "--exact", "--S", "4", "--M", "3", "--J", "0.5", "--theta-count", "16")
    assert code == 0
    assert max(float(x["abs_diff"]) for x in rows(out)) < 1e-9
    code, out, _ = run(capsys, "fourier", "--exact", "--S", "3", "--M", "3", "--U", "0", "--J", "1",
                       "--time-unit", "J", "--theta-count", "8")
    assert code == 0
    assert max(float(x["abs_diff"]) for x in rows(out)) < 1e-9


def test_loschmidt_gcs_outputs(tmp_path, capsys):
    out_csv, peaks, svg = tmp_path / "c.csv", tmp_path / "p.csv", tmp_path / "c.svg"
    code, _, _ = run(capsys, "loschmidt-gcs", "--S", "20", "--lam", "1,2", "--theta-count", "200",
                     "--out", str(out_csv), "--peaks-out", str(peaks), "--svg", str(svg))
    assert code == 0
    r = rows(out_csv.read_text())
    assert len(r) == 400 and {x["M"] for x in r} == {"20", "10"}
    assert float(r[0]["L"]) == pytest.approx(0.0, abs=1e-14)
    assert rows(peaks.read_text())
    assert svg.read_text().startswith("<svg") and "polyline" in svg.read_text()


def test_loschmidt_gcs_deterministic_across_jobs(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    common = ["loschmidt-gcs", "--S", "40", "--M", "3", "--theta-count", "1500"]
    assert run(capsys, *common, "--out", str(a))[0] == 0
    assert run(capsys, *common, "--out", str(b), "--jobs", "4")[0] == 0
    ta, tb = a.read_text(), b.read_text()
    strip = lambda t: "\n".join(ln for ln in t.splitlines() if not ln.startswith(("# jobs=", "# out=")))
    assert strip(ta) == strip(tb)


def test_loschmidt_glauber(capsys):
    code, out, _ = run(capsys, "loschmidt-glauber", "--lam", "2", "--M", "4", "--theta-count", "5")
    assert code == 0
    r = rows(out)
    assert float(r[0]["L"]) == pytest.approx(0.0, abs=1e-12)
    assert float(r[-1]["L"]) == pytest.approx(0.0, abs=1e-12)


def test_fx_profile_and_phasespace(tmp_path, capsys):
    code, out, err = run(capsys, "fx-profile", "--S", "30", "--M", "3", "--n-x", "256")
    assert code == 0 and len(rows(out)) == 256 and "mean |F|" in err
    pgm = tmp_path / "g.pgm"
    code, out, _ = run(capsys, "phasespace", "--alpha", "1.0", "--M", "2", "--theta", "0",
                       "--resolution", "21", "--pgm", str(pgm))
    assert code == 0
    r = rows(out)
    assert len(r) == 441
    assert max(float(x["value"]) for x in r) == pytest.approx(np.exp(-2 * (1.0 - 1.0 / 1.0) ** 2), abs=0.02)
    lines = pgm.read_text().split("\n")
    assert lines[0] == "P2" and lines[1] == "21 21"


def test_oracle_check(capsys):
    code, out, err = run(capsys, "oracle-check", "--S-max", "4", "--M-max", "3", "--theta-count", "8")
    assert code == 0
    assert all(x["status"] == "PASS" for x in rows(out))
