import csv
import io
import json
import math
import shutil
import subprocess

import pytest

from steppot import cli
from steppot.specfun import airy_zero


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    lines = text.splitlines()
    assert lines[0].startswith("# ")
    meta = json.loads(lines[0][2:])
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    return meta, rows


def test_spectrum_linear(capsys):
    code, out, _ = run(capsys, "spectrum", "lin", "--beta0", "4.5")
    assert code == 0
    meta, rows = table(out)
    assert meta["beta0"] == 4.5
    assert "alpha" in meta["defaulted"]
    assert [int(r["n"]) for r in rows] == [1, 2]
    assert list(rows[0]) == ["n", "beta", "energy"]


def test_spectrum_empty_has_header_only(capsys):
    code, out, _ = run(capsys, "spectrum", "lin", "--beta0", "0.1")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2 and lines[1] == "n,beta,energy"


def test_spectrum_curves_cross_at_levels(tmp_path, capsys):
    path = tmp_path / "spectrum.csv"
    code, _, _ = run(capsys, "spectrum", "lin", "--beta0", "6", "--curves", "--out", str(path))
    assert code == 0
    _, levels = table(path.read_text())
    meta, curves = table((tmp_path / "spectrum.curves.csv").read_text())
    assert list(curves[0]) == ["beta", "lhs", "rhs"]
    diff = [float(r["lhs"]) - float(r["rhs"]) for r in curves if r["lhs"] and math.isfinite(float(r["lhs"]))]
    changes = sum(1 for a, b in zip(diff, diff[1:]) if a * b < 0 and abs(a - b) < 5)
    assert changes == len(levels)


def test_spectrum_exp_with_curves(capsys):
    code, out, _ = run(capsys, "spectrum", "exp", "--beta0", "24", "--alpha", "1", "--curves")
    assert code == 0
    first, second = out.split("\n\n")
    _, rows = table(first)
    assert len(rows) == 2
    _, curves = table(second)
    assert len(curves) > 100


def test_delay_sweep_with_threshold_rows(capsys):
    code, out, _ = run(capsys, "delay", "lin", "--beta0", "2.1", "--sweep", "1.0:12:50")
    assert code == 0
    meta, rows = table(out)
    assert meta["sweep"] == [1.0, 12.0, 50]
    flagged = [r for r in rows if r["status"] == "threshold"]
    good = [r for r in rows if r["status"] == "ok"]
    assert flagged and good
    assert all(r["tau"] == "" for r in flagged)
    assert all(math.isfinite(float(r["tau"])) for r in good)
    r = good[-1]
    assert float(r["tau_classical"]) == pytest.approx(2 * math.sqrt(float(r["beta"])), rel=1e-15)


def test_delay_exp_json(capsys):
    code, out, _ = run(capsys, "delay", "exp", "--beta0", "24", "--sweep", "24.5:80:20", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["alpha"] == 1.0
    assert "alpha" in doc["meta"]["defaulted"]
    assert len(doc["rows"]) == 20


def test_round_trip_physical_equals_dimensionless(capsys):
    _, a, _ = run(capsys, "delay", "lin", "--M", "0.5", "--U0", "2.25", "--sweep", "4.6:30:200")
    _, b, _ = run(capsys, "delay", "lin", "--beta0", "4.5", "--sweep", "4.6:30:200")
    assert a.splitlines()[1:] == b.splitlines()[1:]
    _, a, _ = run(capsys, "delay", "exp", "--kappa", "0.125", "--sigma", "1", "--U0", "2.875", "--sweep", "24.5:60:50")
    _, b, _ = run(capsys, "delay", "exp", "--beta0", "24", "--sweep", "24.5:60:50")
    assert a.splitlines()[1:] == b.splitlines()[1:]


def test_csv_floats_round_trip_exactly(capsys):
    from steppot import steplinear as sl

    _, out, _ = run(capsys, "spectrum", "lin", "--beta0", "9")
    _, rows = table(out)
    exact = [s.beta for s in sl.bound_states(sl.StepLinearParams.from_dimensionless(9.0))]
    assert [float(r["beta"]) for r in rows] == exact


def test_resonances(capsys):
    code, out, _ = run(capsys, "resonances", "lin", "--beta0", "1.5", "--beta-max", "15")
    assert code == 0
    _, rows = table(out)
    etas = [float(r["eta_n"]) for r in rows[:2]]
    assert etas == [pytest.approx(airy_zero(2, "AiPrime")), pytest.approx(airy_zero(3, "AiPrime"))]


@pytest.mark.parametrize("pot", ["lin", "linwell", "expwell"])
def test_wells_alternate(capsys, pot):
    code, out, _ = run(capsys, "wells", pot, "--n", "6")
    assert code == 0
    _, rows = table(out)
    assert [r["parity"] for r in rows] == ["even", "odd"] * 3


def test_packet_summary(capsys):
    code, out, err = run(capsys, "packet", "lin", "--beta0", "4.5", "--beta-peak", "8")
    assert code == 0
    summary = json.loads(err.strip().splitlines()[-1])
    assert abs(summary["tau_measured"] / summary["tau_predicted"] - 1) < 0.10
    assert summary["beta_peak"] == 8.0
    _, rows = table(out)
    assert list(rows[0]) == ["t", "x_centroid"]


def test_specfun_table(capsys):
    code, out, _ = run(capsys, "specfun", "ai", "--x=-3:3:7")
    assert code == 0
    _, rows = table(out)
    assert len(rows) == 7
    assert rows[3]["method"] == "series"
    code, out, _ = run(capsys, "specfun", "kimag", "--s", "2", "--x", "1.5")
    _, rows = table(out)
    assert float(rows[0]["err_estimate"]) < 1e-12


def test_validate_table(capsys):
    code, out, _ = run(capsys, "validate", "linwell", "--n", "2")
    assert code == 0
    _, rows = table(out)
    assert all(float(r["rel_diff"]) < 1e-6 for r in rows)


@pytest.mark.parametrize(
    "argv",
    [
        ("delay", "lin", "--beta0", "2", "--M", "1", "--U0", "1", "--sweep", "3:4:5"),
        ("delay", "lin", "--beta0", "2", "--sweep", "4:3:5"),
        ("delay", "lin", "--beta0", "2", "--sweep", "3:4:1"),
        ("spectrum", "lin"),
        ("spectrum", "exp", "--beta0", "0.5"),
        ("packet", "lin", "--beta0", "4.5", "--beta-peak", "4.0"),
    ],
)
def test_config_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["spectrum", "nowhere"])
    assert exc.value.code == 2


def test_numerical_failure_exits_three(capsys, monkeypatch):
    from steppot.common import RootFindingError

    def boom(*a, **k):
        raise RootFindingError("no convergence")

    monkeypatch.setattr(cli.steplinear, "bound_states", boom)
    code, _, err = run(capsys, "spectrum", "lin", "--beta0", "4.5")
    assert code == 3
    assert "no convergence" in err


@pytest.mark.skipif(shutil.which("steppot") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["steppot", "wells", "linwell", "--n", "2"], capture_output=True, text=True, check=True)
    assert res.stdout.startswith("# ")
