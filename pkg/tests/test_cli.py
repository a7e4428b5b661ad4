import csv
import io
import json
import math
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonlocality.cli import CommandResult, Row, emit, main, parse_json, render, run

SUBCOMMANDS = [
    ["singlet-prob", "--theta-a", "0.3", "--theta-b", "2.0", "--phi-b", "1.0"],
    ["photon-prob", "--kind", "II", "--theta1", "0.2", "--theta2", "1.3"],
    ["correlation", "--theta-a", "1", "--theta-b", "1"],
    ["bell-scan", "--steps", "5"],
    ["chsh", "--config", "paper"],
    ["lhv-sim", "--seed", "0", "--n", "20000"],
    ["no-signaling", "--seeds", "5"],
    ["ghz-verify"],
    ["boxes"],
    ["hardy"],
    ["hardy-frames"],
    ["mz", "--bs2", "removed"],
]


def rows_of(argv):
    result, _ = run(argv)
    return {r.name: r for r in result.rows}, result


def csv_rows(text):
    return list(csv.reader(io.StringIO(text)))


@pytest.mark.parametrize("argv", SUBCOMMANDS, ids=lambda a: a[0])
def test_every_subcommand_passes(argv, capsys):
    assert main(argv) == 0
    out = capsys.readouterr().out
    assert out.strip()


@pytest.mark.parametrize("argv", SUBCOMMANDS, ids=lambda a: a[0])
def test_every_row_finite_and_anchored(argv):
    result, _ = run(argv)
    for r in result.rows:
        assert math.isfinite(r.value)
        assert r.paper_anchor.split()[0] in ("Eq", "Sec", "Appendix")


def test_chsh_preset():
    rows, result = rows_of(["chsh", "--config", "paper"])
    assert rows["S"].value == pytest.approx(-2.8284271247461903, abs=1e-12)
    assert rows["violates_chsh_bound"].value == 1
    assert "violates |S| <= 2" in result.summary


def test_chsh_angles_degrees():
    rows, _ = rows_of(["chsh", "--degrees", "--angles", "135", "45", "90", "0"])
    assert rows["S"].value == pytest.approx(-2 * math.sqrt(2), abs=1e-12)


def test_hardy_both_present():
    rows, result = rows_of(["hardy", "--bs2-plus", "present", "--bs2-minus", "present"])
    assert rows["g+g-"].value == pytest.approx(0.0625, abs=1e-12)
    assert rows["g+g-"].paper_anchor == "Eq 5.4"
    assert result.passed


def test_hardy_experiment_file(tmp_path):
    p = tmp_path / "exp.txt"
    p.write_text("bs2_plus = removed\nbs2_minus = present\n")
    rows, _ = rows_of(["hardy", "--experiment", str(p)])
    assert rows["g+f-"].value == pytest.approx(0.5, abs=1e-12)
    assert rows["g+f-"].paper_anchor == "Eq 5.5"


def test_hardy_bad_experiment_file(tmp_path, capsys):
    p = tmp_path / "exp.txt"
    p.write_text("bs2_plus = present\nbs2_minus = sideways\n")
    assert main(["hardy", "--experiment", str(p)]) == 2
    assert ":2:" in capsys.readouterr().err


def test_correlation_coincident():
    rows, _ = rows_of(["correlation", "--theta-a", "0.4", "--phi-a", "1", "--theta-b", "0.4", "--phi-b", "1"])
    assert rows["P(a,b)"].value == pytest.approx(-1.0, abs=1e-12)


def test_ghz_csv_row(capsys):
    assert main(["ghz-verify", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "name,value,paper_anchor"
    assert "D_eigenvalue,-1,Eq 4.11" in lines


def test_bell_scan_table_rows(capsys):
    assert main(["bell-scan", "--steps", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    data = [l for l in out if l.startswith("theta=")]
    assert len(data) == 3


def test_bell_scan_preset_config():
    result, _ = run(["bell-scan", "--config", "paper"])
    assert len(result.rows) == 181 and result.passed


def test_csv_full_precision(capsys):
    main(["chsh", "--format", "csv"])
    rows = {r[0]: r[1] for r in csv_rows(capsys.readouterr().out)[1:]}
    assert float(rows["S"]) == pytest.approx(-2 * math.sqrt(2), abs=1e-12)
    assert len(rows["S"].lstrip("-").replace(".", "")) == 17


def test_digits_option(capsys):
    main(["chsh", "--format", "csv", "--digits", "4"])
    rows = {r[0]: r[1] for r in csv_rows(capsys.readouterr().out)[1:]}
    assert rows["S"] == "-2.828"


def test_json_output(capsys):
    main(["boxes", "--format", "json"])
    data = json.loads(capsys.readouterr().out)
    assert set(data) == {"command", "rows", "pass", "summary"}
    assert data["command"] == "boxes" and data["pass"] is True


names = st.text(st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=12)
rows_st = st.builds(Row, names, st.floats(allow_nan=False, allow_infinity=False), names, names)
results_st = st.builds(CommandResult, names, st.lists(rows_st, max_size=6).map(tuple),
                       st.sampled_from([True, False, None]), names)


@given(results_st)
def test_json_round_trip(result):
    assert parse_json(render(result, "json")) == result


def test_row_rejects_non_finite():
    with pytest.raises(ValueError):
        Row("x", float("nan"), "Eq 1")


def test_output_to_file(tmp_path):
    dest = tmp_path / "out.csv"
    assert main(["boxes", "--format", "csv", "--output", str(dest)]) == 0
    assert dest.read_text().startswith("name,value,paper_anchor\n")


def test_unwritable_destination(tmp_path, capsys):
    assert main(["boxes", "--output", str(tmp_path / "missing" / "out.csv")]) == 1
    assert "cannot write" in capsys.readouterr().err


def test_emit_to_stream():
    buf = io.StringIO()
    emit(CommandResult("x", (Row("a", 1.5, "Eq 1"),), True), "csv", buf)
    assert buf.getvalue() == "name,value,paper_anchor\na,1.5,Eq 1\n"


@pytest.mark.parametrize("argv", [
    ["no-such-command"],
    ["chsh", "--bogus"],
    [],
    ["lhv-sim"],
    ["photon-prob", "--kind", "III", "--theta1", "0", "--theta2", "0"],
    ["singlet-prob", "--theta-a", "4"],
    ["bell-scan", "--steps", "0"],
    ["hardy", "--experiment", "x", "--bs2-plus", "present"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_failure_exit_status():
    assert CommandResult("x", (), False).exit_status == 1
    assert CommandResult("x", (), None).exit_status == 0


def test_determinism_via_subprocess():
    argv = [sys.executable, "-m", "nonlocality", "lhv-sim", "--seed", "3", "--n", "50000", "--format", "csv"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a.startswith(b"name,value,paper_anchor")
