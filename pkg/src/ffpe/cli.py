"""Command-line front end.

    ffpe eval --d 3 --alpha 0.5 --Do 1 --Df 8 --t 0.1 --y 0.5
    ffpe grid --d 2 --alpha 0.4 --Do 0.5 --Df 8 --y-min 0 --y-max 2 --y-count 51 \
              --t-min 0.02 --t-max 0.2 --t-count 10 --out grid.csv
    ffpe table --table 4.2 --out table.csv
    ffpe window-study --out study.csv
    ffpe bench --out bench.csv
    ffpe --seed-fixtures fixtures.csv

Exit status: 0 on success, 1 on a usage error, 2 when a result carries the
far-field non-convergence flag (the values are still written).
"""

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import farfield, oracles
from .solver import ProblemParams, Solver

EXIT_OK, EXIT_USAGE, EXIT_FLAGGED = 0, 1, 2

# error tables: (alpha, Do, Df) and the oracle for each
TABLES = {
    "4.1": dict(alpha=0.5, Do=1.0, Df=8.0),
    "4.2": dict(alpha=0.5, Do=0.0, Df=8.0),
    "4.3": dict(alpha=1 / 3, Do=0.0, Df=8.0),
}
TABLE_TIMES = (0.004, 0.02, 0.04, 0.06, 0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2)
TABLE_DIMS = (1, 5, 9, 13, 17, 21, 25, 29)
TABLE_Y = np.linspace(0.0, 2.0, 51)

BENCH_Y = np.linspace(0.0, 2.0, 51)
BENCH_T = 0.2 * np.arange(1, 51) / 50
BENCH_DIMS = (1, 3, 5, 7, 9)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(v):
    """17 significant digits, locale independent."""
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_records(records, columns, fh, form="csv"):
    if form == "json":
        json.dump([{c: r.get(c) for c in columns} for r in records], fh, indent=1)
        fh.write("\n")
        return
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for r in records:
        w.writerow([fmt(r.get(c)) for c in columns])


def _vector(text):
    if text is None:
        return None
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"could not parse vector {text!r}") from None


def _float_list(text):
    return tuple(float(v) for v in text.split(","))


def _int_list(text):
    return tuple(int(v) for v in text.split(","))


def params_from_args(args):
    try:
        return ProblemParams(args.d, args.Do, args.Df, args.alpha, _vector(args.b), _vector(args.x0))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _linspace(lo, hi, n, name):
    if n is None or n < 1:
        raise UsageError(f"--{name}-count must be at least 1")
    if hi < lo:
        raise UsageError(f"--{name}-min must not exceed --{name}-max")
    return np.linspace(lo, hi, n) if n > 1 else np.array([lo])


# ------------------------------------------------------------------ modes

def run_eval(args, out):
    if args.t is None:
        raise UsageError("--t is required")
    if (args.y is None) == (args.x is None):
        raise UsageError("give exactly one of --y and --x")
    params = params_from_args(args)
    solver = Solver()
    try:
        if args.x is not None:
            val = solver.solve_point(_vector(args.x), args.t, params)
        else:
            val = solver.solve(args.y, args.t, params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    record = {"density": val.density, **val.diagnostics()}
    if args.format == "csv":
        write_records([record], list(record), out)
    else:
        out.write(json.dumps(record) + "\n")
    return EXIT_FLAGGED if val.flagged else EXIT_OK


GRID_COLUMNS = ["y", "t", "density", "branch", "used_scaling", "final_M", "converged", "direct_flag"]


def grid_rows(params, ys, ts, jobs=1, solver=None):
    solver = solver or Solver()
    points = [(float(y), float(t)) for t in ts for y in ys]

    def one(pt):
        v = solver.solve(pt[0], pt[1], params)
        d = v.diagnostics()
        return dict(y=pt[0], t=pt[1], density=v.density, branch=d["branch"], used_scaling=d["used_scaling"],
                    final_M=d["final_M"], converged=d["converged"], direct_flag=d["direct_flag"],
                    flagged=v.flagged)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(one, points))  # map keeps input order
    return [one(p) for p in points]


def run_grid(args, out):
    params = params_from_args(args)
    ys = _linspace(args.y_min, args.y_max, args.y_count, "y")
    ts = _linspace(args.t_min, args.t_max, args.t_count, "t")
    if ts[0] <= 0:
        raise UsageError("times must be positive")
    rows = grid_rows(params, ys, ts, args.jobs)
    write_records(rows, GRID_COLUMNS, out, args.format)
    if _plots_wanted(args):
        from .plotting import plot_grid
        plot_grid(rows, _figure_path(args.out), f"d = {params.d}, alpha = {params.alpha:g}")
    return EXIT_FLAGGED if any(r["flagged"] for r in rows) else EXIT_OK


def table_oracle(which, y, t, d):
    cfg = TABLES[which]
    if which == "4.1":
        return oracles.alpha_half(y, t, cfg["Do"], cfg["Df"], d)
    if which == "4.2":
        return oracles.cauchy_density(y, t, d, cfg["Df"])
    return oracles.rational_alpha_series(y, t, d, cfg["Df"], 3)


TABLE_COLUMNS = ["t", "d", "max_rel_error", "flagged", "flag_count", "oracle_skipped"]


def table_rows(which, ts=TABLE_TIMES, ds=TABLE_DIMS, ys=TABLE_Y, solver=None):
    """Maximum relative error over the y grid for every (t, d) cell.

    ``flag_count`` counts points where the far-field loop raised its flag,
    either in the direct attempt or in the returned value. Points whose
    reference is not accurate to 1e-12 are skipped and counted.
    """
    if which not in TABLES:
        raise UsageError(f"unknown table {which!r}; choose from {', '.join(TABLES)}")
    cfg = TABLES[which]
    solver = solver or Solver()
    rows = []
    for t in ts:
        for d in ds:
            params = ProblemParams(d, cfg["Do"], cfg["Df"], cfg["alpha"])
            worst, flags, skipped = 0.0, 0, 0
            for y in ys:
                ref = table_oracle(which, float(y), t, d)
                val = solver.solve(float(y), t, params)
                flags += bool(val.flagged or val.direct_flag)
                if not (ref.usable and ref.est_accuracy <= oracles.USABLE):
                    skipped += 1
                    continue
                worst = max(worst, abs(val.density - ref.value) / abs(ref.value))
            rows.append(dict(t=t, d=d, max_rel_error=worst, flagged=flags > 0, flag_count=flags,
                             oracle_skipped=skipped))
    return rows


def run_table(args, out):
    if args.table is None:
        raise UsageError("--table is required (4.1, 4.2 or 4.3)")
    ts = args.t_list or TABLE_TIMES
    ds = args.d_list or TABLE_DIMS
    ys = _linspace(args.y_min, args.y_max, args.y_count, "y")
    rows = table_rows(args.table, ts, ds, ys)
    write_records(rows, TABLE_COLUMNS, out, args.format)
    if _plots_wanted(args):
        from .plotting import plot_table
        plot_table(rows, _figure_path(args.out), f"table {args.table}")
    return EXIT_OK


def window_study_rows(M_list=(80, 160, 320, 640, 1280), alpha=0.4, tau=0.01):
    ref = oracles.cosine_tail_reference(alpha, tau)
    return farfield.window_error_study(ref.value, np.cos, alpha, tau, M_list=M_list)


def run_window_study(args, out):
    rows = window_study_rows()
    if args.format == "json":
        write_records([dict(M=m, E1=a, E2=b) for m, a, b in rows], ["M", "E1", "E2"], out, "json")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["M", "E1", "E2"])
        for m, a, b in rows:
            w.writerow([f"{m:g}", f"{a:.5e}", f"{b:.5e}"])
    if _plots_wanted(args):
        from .plotting import plot_window_study
        plot_window_study(rows, _figure_path(args.out))
    return EXIT_OK


BENCH_COLUMNS = ["d", "evaluations", "total_seconds", "mean_seconds"]


def bench_rows(alpha=0.5, Do=1.0, Df=8.0, ds=BENCH_DIMS, ys=BENCH_Y, ts=BENCH_T, repeat=1, best_of=1):
    """Wall time of the full (y, t) grid per dimension.

    Each row of fixed t is swept ``repeat`` times per measurement and timed on
    its own; the fastest of ``best_of`` measurements is kept per row and the
    rows are summed. Short timed blocks keep a scheduler interruption from
    spoiling a whole grid, and the measurement rounds visit every dimension in
    turn so slow drifts in machine load affect all dimensions alike.
    """
    solver = Solver()
    params = {d: ProblemParams(d, Do, Df, alpha) for d in ds}
    for p in params.values():
        solver.solve(float(ys[1]), float(ts[-1]), p)  # warm the rule caches
    best = {d: [math.inf] * len(ts) for d in ds}
    for _ in range(best_of):
        for d in ds:
            for i, t in enumerate(ts):
                start = time.perf_counter()
                for _ in range(repeat):
                    for y in ys:
                        solver.solve(float(y), float(t), params[d])
                best[d][i] = min(best[d][i], time.perf_counter() - start)
    n = repeat * len(ts) * len(ys)
    return [dict(d=d, evaluations=n, total_seconds=sum(best[d]), mean_seconds=sum(best[d]) / n) for d in ds]


def run_bench(args, out):
    ds = args.d_list or BENCH_DIMS
    rows = bench_rows(args.alpha, args.Do, args.Df, ds, repeat=args.repeat, best_of=args.best_of)
    write_records(rows, BENCH_COLUMNS, out, args.format)
    if _plots_wanted(args):
        from .plotting import plot_bench
        plot_bench(rows, _figure_path(args.out))
    return EXIT_OK


# --------------------------------------------------------------- fixtures

FIXTURE_COLUMNS = ["d", "alpha", "Do", "Df", "t", "y", "reference", "est_accuracy", "recipe-id"]


def fixture_rows():
    """Reference values from the independent oracles, each tagged with its recipe."""
    rows = []

    def add(d, alpha, Do, Df, t, y, res, recipe):
        rows.append({"d": d, "alpha": alpha, "Do": Do, "Df": Df, "t": t, "y": y, "reference": res.value,
                     "est_accuracy": res.est_accuracy, "recipe-id": recipe})

    for d in (1, 3, 5, 9):
        for t, y in ((0.04, 0.3), (0.1, 1.0), (0.2, 2.0)):
            add(d, 0.5, 0.0, 8.0, t, y, oracles.cauchy_density(y, t, d, 8.0), "cauchy-mp50")
    for t, y in ((0.04, 0.0), (0.1, 0.5), (0.2, 1.7)):
        add(1, 0.5, 1.0, 8.0, t, y, oracles.alpha_half_1d(y, t, 1.0, 8.0), "erfcx1d-mp70")
    for d in (3, 5, 9):
        for t, y in ((0.04, 0.25), (0.1, 1.0), (0.2, 2.0)):
            add(d, 0.5, 1.0, 8.0, t, y, oracles.alpha_half_odd_d(y, t, 1.0, 8.0, d), "odd-recurrence-mp70")
    for t, y in ((0.1, 0.01), (0.1, 0.8), (0.2, 0.5), (0.2, 2.0)):
        add(1, 1 / 3, 0.0, 8.0, t, y, oracles.rational_alpha_series(y, t, 1, 8.0, 3), "series-q3")
    add(2, 0.25, 0.0, 8.0, 0.2, 0.5, oracles.rational_alpha_series(0.5, 0.2, 2, 8.0, 4), "series-q4")
    for d, al in ((1, 0.3), (4, 0.5), (9, 0.7)):
        add(d, al, 0.0, 8.0, 0.1, 0.0, oracles.zero_displacement_closed(0.1, d, 8.0, al), "closed-zero-mp30")
    return rows


def seed_fixtures(path):
    with open(path, "w", newline="") as fh:
        write_records(fixture_rows(), FIXTURE_COLUMNS, fh)
    return path


def load_fixtures(path=None):
    if path is None:
        from importlib.resources import files
        text = files("ffpe").joinpath("data/fixtures.csv").read_text()
    else:
        text = Path(path).read_text()
    rows = []
    for r in csv.DictReader(io.StringIO(text)):
        rows.append({k: (v if k == "recipe-id" else (int(v) if k == "d" else float(v))) for k, v in r.items()})
    return rows


# ------------------------------------------------------------------ main

def _plots_wanted(args):
    return args.out is not None and not args.no_plot


def _figure_path(out):
    return Path(out).with_suffix(".png")


def build_parser():
    p = _Parser(prog="ffpe", description="Fundamental solution of the fractional Fokker-Planck equation.")
    p.add_argument("mode", nargs="?", choices=["eval", "grid", "table", "window-study", "bench"])
    g = p.add_argument_group("problem")
    g.add_argument("--d", type=int, default=1, help="space dimension")
    g.add_argument("--alpha", type=float, default=0.5, help="fractional order, 0 < alpha < 1")
    g.add_argument("--Do", type=float, default=1.0, help="ordinary diffusion coefficient")
    g.add_argument("--Df", type=float, default=8.0, help="fractional diffusion coefficient")
    g.add_argument("--b", help="drift vector, comma separated")
    g.add_argument("--x0", help="source point, comma separated")
    e = p.add_argument_group("points")
    e.add_argument("--x", help="evaluation point, comma separated")
    e.add_argument("--y", type=float, help="displacement |x - x0 - b t|")
    e.add_argument("--t", type=float, help="time")
    e.add_argument("--y-min", type=float, default=0.0)
    e.add_argument("--y-max", type=float, default=2.0)
    e.add_argument("--y-count", type=int, default=51)
    e.add_argument("--t-min", type=float, default=0.004)
    e.add_argument("--t-max", type=float, default=0.2)
    e.add_argument("--t-count", type=int, default=50)
    e.add_argument("--t-list", type=_float_list, help="times for table mode, comma separated")
    e.add_argument("--d-list", type=_int_list, help="dimensions for table and bench modes")
    o = p.add_argument_group("output")
    o.add_argument("--out", help="output file (default: standard output); figures go next to it")
    o.add_argument("--format", choices=["csv", "json"], default=None)
    o.add_argument("--no-plot", action="store_true", help="skip the figure")
    o.add_argument("--table", choices=sorted(TABLES), help="which error table to reproduce")
    o.add_argument("--repeat", type=int, default=1, help="grid sweeps per bench measurement")
    o.add_argument("--best-of", type=int, default=3, help="bench measurements per dimension; the fastest is kept")
    o.add_argument("--jobs", type=int, default=1, help="worker threads for grid mode")
    o.add_argument("--seed-fixtures", metavar="PATH", help="write oracle reference values to PATH and exit")
    return p


MODES = {"eval": run_eval, "grid": run_grid, "table": run_table, "window-study": run_window_study,
         "bench": run_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed_fixtures:
        seed_fixtures(args.seed_fixtures)
        return EXIT_OK
    if args.mode is None:
        parser.error("a mode is required unless --seed-fixtures is given")
    if args.format is None:
        args.format = "json" if args.mode == "eval" else "csv"
    try:
        if args.out is None:
            return MODES[args.mode](args, sys.stdout)
        with open(args.out, "w", newline="") as fh:
            return MODES[args.mode](args, fh)
    except UsageError as exc:
        print(f"ffpe: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
