import csv
import json
import math

import pytest

from ffpe import cli, oracles
from ffpe.solver import ProblemParams, solve


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_cauchy_zero(capsys):
    code, out, _ = run(capsys, "eval", "--d", "1", "--alpha", "0.5", "--Do", "0", "--Df", "8", "--t", "0.1", "--y", "0")
    rec = json.loads(out)
    assert code == 0
    assert rec["density"] == pytest.approx(1 / (math.pi * 0.8), rel=1e-15)
    assert {"branch", "final_M", "used_scaling"} <= set(rec)


def test_eval_gaussian(capsys):
    code, out, _ = run(capsys, "eval", "--Df", "0", "--Do", "1", "--d", "1", "--t", "0.25", "--y", "0")
    assert code == 0 and json.loads(out)["density"] == pytest.approx(0.564189583547756, rel=1e-15)


@pytest.mark.parametrize("argv", [
    ["eval", "--y", "0"],
    ["eval", "--t", "0.1"],
    ["eval", "--t", "0.1", "--y", "1", "--alpha", "1.5"],
    ["eval", "--t", "0.1", "--x", "1,2", "--d", "3"],
    ["eval", "--t", "-1", "--y", "1"],
    ["grid", "--y-count", "0"],
    ["grid", "--t-min", "0.3", "--t-max", "0.1"],
    ["table"],
    ["--d", "2"],
    ["eval", "--d", "two"],
])
def test_usage_errors_exit_one(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(cli.main(argv))
    assert exc.value.code == 1


def test_flagged_result_exits_two(capsys):
    code, out, _ = run(capsys, "eval", "--d", "9", "--alpha", "0.3333333333333333", "--Do", "0", "--t", "0.004",
                       "--y", "1")
    rec = json.loads(out)
    assert code == 2 and rec["converged"] is False and rec["density"] > 0


def test_eval_with_point_and_drift(capsys):
    code, out, _ = run(capsys, "eval", "--d", "2", "--Do", "0", "--x", "1.2,0.4", "--b", "1,0", "--x0", "0,0",
                       "--t", "0.1")
    # y = |x - x0 - b t| = |(1.1, 0.4)|
    expected = oracles.cauchy_density(math.hypot(1.1, 0.4), 0.1, 2, 8.0).value
    assert code == 0 and json.loads(out)["density"] == pytest.approx(expected, rel=1e-12)


def test_grid_csv_deterministic_and_plotted(tmp_path, capsys):
    argv = ["grid", "--d", "2", "--alpha", "0.4", "--Do", "0.5", "--y-count", "4", "--t-min", "0.05",
            "--t-max", "0.2", "--t-count", "2"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b), "--jobs", "3", "--no-plot"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.png").stat().st_size > 0 and not (tmp_path / "b.png").exists()
    rows = list(csv.DictReader(a.open()))
    assert len(rows) == 8 and list(rows[0]) == cli.GRID_COLUMNS
    p = ProblemParams(2, 0.5, 8.0, 0.4)
    assert float(rows[5]["density"]) == solve(float(rows[5]["y"]), float(rows[5]["t"]), p).density


def test_grid_json(capsys):
    code, out, _ = run(capsys, "grid", "--y-count", "2", "--t-count", "1", "--t-min", "0.1", "--format", "json")
    recs = json.loads(out)
    assert code == 0 and len(recs) == 2 and recs[0]["branch"] == "zero_disp_quad"


def test_number_format():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert cli.fmt(True) == "true" and cli.fmt(None) == "" and cli.fmt(3) == "3"


def test_table_cells(tmp_path):
    out = tmp_path / "t.csv"
    assert cli.main(["table", "--table", "4.2", "--t-list", "0.2", "--d-list", "1,5", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["d"] for r in rows] == ["1", "5"]
    assert float(rows[0]["max_rel_error"]) <= 1e-13
    assert float(rows[1]["max_rel_error"]) <= 1e-12
    assert (tmp_path / "t.png").exists()


def test_table_41_cell():
    (row,) = cli.table_rows("4.1", ts=(0.2,), ds=(1,))
    assert row["max_rel_error"] <= 1e-13 and not row["flagged"]


def test_table_43_hard_cell_flagged():
    (row,) = cli.table_rows("4.3", ts=(0.004,), ds=(9,))
    assert row["flagged"] and row["flag_count"] > 0


def test_window_study_output(tmp_path):
    out = tmp_path / "w.csv"
    assert cli.main(["window-study", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "M,E1,E2" and len(lines) == 6
    assert lines[1].startswith("80,") and lines[1].endswith("3.80618e-03")
    assert (tmp_path / "w.png").exists()


def test_bench_output(tmp_path):
    out = tmp_path / "b.csv"
    assert cli.main(["bench", "--d-list", "1,3", "--best-of", "1", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 2
    assert all(float(r["mean_seconds"]) > 0 and r["evaluations"] == "2550" for r in rows)


def test_seed_fixtures_roundtrip(tmp_path):
    path = tmp_path / "fx.csv"
    assert cli.main(["--seed-fixtures", str(path)]) == 0
    fresh = cli.load_fixtures(path)
    frozen = cli.load_fixtures()
    assert [r["recipe-id"] for r in fresh] == [r["recipe-id"] for r in frozen]
    for a, b in zip(fresh, frozen):
        assert a["reference"] == pytest.approx(b["reference"], rel=1e-15)
