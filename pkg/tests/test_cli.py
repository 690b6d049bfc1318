import csv
import io
import json
import subprocess
import sys

import pytest

from helium_oscillator import CONSTANTS
from helium_oscillator.cli import EXIT_NO_INTERSECTION, EXIT_OK, EXIT_USAGE, SURFACE_HEADER, SWEEP_HEADER, main, parse_range
from helium_oscillator.errors import QuantumNumberError
from helium_oscillator.fixtures import HEADER

GROUND = ["--n1", "1", "--n2", "1.5", "--n3", "1.5"]


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_json_round_trip(capsys):
    code, out, _ = run(capsys, "solve", *GROUND, "--format", "json")
    assert code == EXIT_OK
    rec = json.loads(out)
    assert rec["cos_theta"] == pytest.approx(-0.22725, abs=5e-4)
    assert rec["r_bohr"] == pytest.approx(1.0481, rel=5e-3)
    assert rec["converged"] is True
    assert json.loads(json.dumps(rec)) == rec


def test_solve_text_and_csv_agree(capsys):
    _, text, _ = run(capsys, "solve", *GROUND)
    _, table, _ = run(capsys, "solve", *GROUND, "--format", "csv")
    assert "\r" not in table
    row = next(csv.DictReader(io.StringIO(table)))
    assert row["iterations"].isdigit()
    assert row["converged"] == "true"
    assert any(line.startswith("energy_hartree") for line in text.splitlines())


def test_solve_units(capsys):
    _, au, _ = run(capsys, "solve", *GROUND, "--format", "json")
    _, si, _ = run(capsys, "solve", *GROUND, "--format", "json", "--units", "ev-angstrom")
    au, si = json.loads(au), json.loads(si)
    assert "r_bohr" not in si and "energy_hartree" not in si
    assert si["r_angstrom"] == pytest.approx(au["r_bohr"] * CONSTANTS.bohr_radius_angstrom)
    assert si["energy_ev"] == pytest.approx(-78.44, abs=0.03)


def test_no_intersection_exit_code(capsys):
    code, out, err = run(capsys, "solve", "--n1", "1.5", "--n2", "0.5", "--n3", "5")
    assert code == EXIT_NO_INTERSECTION
    assert out == ""
    assert "NoIntersection" in err and "best non-converged point" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--n1", "0", "--n2", "1", "--n3", "1"],
        ["solve", "--n1", "1.2", "--n2", "1", "--n3", "1"],
        ["solve", "--n1", "1"],
        ["solve", *GROUND, "--grid", "1"],
        ["solve", *GROUND, "--format", "xml"],
        ["sweep", "--range", "1:0.5:0.5"],
        ["sweep", "--range", "junk"],
        ["surfaces", *GROUND, "--grid", "1"],
        ["verify", "--fixtures", "/nonexistent/file.csv"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert "error" in err


def test_surfaces_dump(capsys):
    code, out, _ = run(capsys, "surfaces", *GROUND, "--grid", "200")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == SURFACE_HEADER
    body = [[float(x) if x else None for x in r] for r in rows[1:]]
    assert len(body) == 200 * 200
    defined = [r for r in body if r[5] is not None]
    assert all(min(r[2:5]) > 0 for r in defined)
    best = min(defined, key=lambda r: r[5])
    assert best[0] == pytest.approx(-0.227, abs=0.02)
    assert best[1] == pytest.approx(1.264, abs=0.05)


def test_surfaces_to_file(capsys, tmp_path):
    target = tmp_path / "s.csv"
    code, out, _ = run(capsys, "surfaces", *GROUND, "--grid", "3", "--out", str(target))
    assert code == EXIT_OK and out == ""
    assert len(target.read_text().splitlines()) == 10


def test_parse_range():
    assert parse_range("0.5:5:0.5") == [k / 2 for k in range(1, 11)]
    assert parse_range("1:1:1") == [1.0]
    with pytest.raises(QuantumNumberError):
        parse_range("0.25:1:0.25")


def test_sweep_small_grid_is_deterministic(capsys, tmp_path):
    args = ["sweep", "--range", "0.5:1:0.5", "--grid", "40", "--max-iters", "2", "--refine-grid", "21"]
    code, first, _ = run(capsys, *args)
    assert code == EXIT_OK
    target = tmp_path / "sweep.csv"
    run(capsys, *args, "--out", str(target), "--jobs", "2")
    assert target.read_text() == first
    rows = list(csv.reader(io.StringIO(first)))
    assert tuple(rows[0]) == SWEEP_HEADER
    triples = [tuple(map(float, r[:3])) for r in rows[1:]]
    assert triples == sorted(triples) and len(triples) == 8


@pytest.mark.slow
def test_sweep_default_solver(capsys):
    code, out, _ = run(capsys, "sweep", "--range", "0.5:1:0.5")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 8
    one = next(r for r in rows if r["n1"] == r["n2"] == r["n3"] == "1.0")
    assert float(one["energy_hartree"]) == pytest.approx(-3.9745, rel=5e-3)


def test_verify_reports_corrupted_fixture(capsys, tmp_path):
    target = tmp_path / "fx.csv"
    target.write_text(
        ",".join(HEADER) + "\n1,1.5,1.5,energy,-2.8827,5e-3\n1,1.5,1.5,cos_theta,-0.3,5e-4\n", encoding="utf-8"
    )
    code, out, err = run(capsys, "verify", "--fixtures", str(target), "--report", "json")
    assert code == EXIT_NO_INTERSECTION
    report = json.loads(out)
    assert [r["passed"] for r in report] == [True, False]
    assert "line 3" in err and "cos_theta" in err


def test_verify_malformed_fixture(capsys, tmp_path):
    target = tmp_path / "fx.csv"
    target.write_text(",".join(HEADER) + "\n1,1,1,energy\n", encoding="utf-8")
    code, _, err = run(capsys, "verify", "--fixtures", str(target))
    assert code == EXIT_USAGE
    assert "line 2" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "helium_oscillator", "surfaces", *GROUND, "--grid", "2"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert len(proc.stdout.splitlines()) == 5
