"""Command-line front end.

Subcommands:
    test      run a mean test on a CSV file (rows = time points)
    simulate  write a simulated series to CSV
    mc        Monte Carlo size/power experiments (scenarios S1..S6 or 'size')
    bench     timing benchmark comparing the test pipelines
    rolling   rolling-window p-values over a CSV file

Exit codes: 0 = completed (whatever the decision), 2 = usage or input
error, 3 = numerical failure. Input is CSV only; missing values are
rejected, not imputed — clean the data first. Structured output is JSON;
every number printed in human mode appears verbatim in --json mode.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import sys

import numpy as np

from .baselines import ZcqConfig, sri_test, zcq_test
from .errors import NumericalError
from .harness import (SCENARIOS, ScenarioSpec, run_power_experiment,
                      run_size_experiment, run_timing_benchmark, scenario)
from .model import (CENTERED_GAMMA, GAUSSIAN, InnovationLaw,
                    build_mean_signal, make_process, simulate)
from .testcore import TestConfig, rolling_test, run_test

DISTS = {"gauss": GAUSSIAN, "gamma": CENTERED_GAMMA}


class InputError(Exception):
    """Bad input file or flags; mapped to exit code 2."""


def _innovation(dist):
    if dist not in DISTS:
        raise InputError(f"unknown distribution {dist!r}; valid: gauss, gamma")
    return InnovationLaw(kind=DISTS[dist])


def read_csv_matrix(path, date_column=False):
    """Read a CSV of time rows x variable columns.

    An optional header row of column names is skipped. With date_column,
    the first column must hold ISO dates and is returned as labels only.
    Raises InputError (with the offending line number) for ragged rows,
    unparseable cells, or missing values.
    """
    rows = []
    labels = []
    width = None
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    with handle:
        for lineno, record in enumerate(csv.reader(handle), start=1):
            if not record:
                continue
            cells = record[1:] if date_column else record
            label = record[0] if date_column else None
            if lineno == 1 and not _all_floats(cells):
                continue  # header row
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise InputError(f"ragged row at line {lineno}: expected "
                                 f"{width} columns, got {len(record)}")
            parsed = []
            for cell in cells:
                value = _parse_cell(cell, lineno)
                parsed.append(value)
            if date_column:
                labels.append(_parse_date(label, lineno))
            rows.append(parsed)
    if not rows:
        raise InputError("no data rows found")
    matrix = np.array(rows, dtype=np.float64)
    if matrix.shape[0] < 8:
        raise InputError("need at least 8 data rows")
    return (matrix, labels) if date_column else (matrix, None)


def _all_floats(cells):
    if not cells:
        return False
    for cell in cells:
        try:
            float(cell)
        except ValueError:
            return False
    return True


def _parse_cell(cell, lineno):
    text = cell.strip()
    if text == "":
        raise InputError(f"missing value at line {lineno}: remove or clean "
                         "incomplete rows before testing")
    try:
        value = float(text)
    except ValueError as exc:
        raise InputError(f"unparseable cell {cell!r} at line {lineno}") from exc
    if not np.isfinite(value):
        raise InputError(f"non-finite value at line {lineno}: remove or clean "
                         "incomplete rows before testing")
    return value


def _parse_date(label, lineno):
    try:
        return datetime.date.fromisoformat(label.strip())
    except ValueError as exc:
        raise InputError(f"first column at line {lineno} is not an ISO date: "
                         f"{label!r}") from exc


def _emit(payload, as_json, stream=None):
    stream = stream or sys.stdout
    if as_json:
        print(json.dumps(payload, indent=2), file=stream)
        return
    for key, value in payload.items():
        if isinstance(value, str):
            text = value
        elif isinstance(value, float):
            text = repr(value)  # matches the json float rendering exactly
        else:
            text = json.dumps(value)
        print(f"{key:<14}{text}", file=stream)


def cmd_test(args):
    x, _ = read_csv_matrix(args.file)
    config = TestConfig(alpha=args.alpha, m=args.M)
    if args.method == "tn":
        res = run_test(x, config)
    elif args.method == "zcq":
        res = zcq_test(x, ZcqConfig(b=args.b, lag_window=args.lag_window), args.alpha)
    else:
        res = sri_test(x, args.alpha)
    p_value = res.p_value
    reject = res.reject
    if args.two_sided:
        # convenience doubling of the tail; not part of the core procedure
        p_value = 2.0 * min(res.p_value, 1.0 - res.p_value)
        reject = p_value < args.alpha
    payload = {
        "method": args.method,
        "n": int(x.shape[0]),
        "p": int(x.shape[1]),
        "alpha": args.alpha,
        "two_sided": bool(args.two_sided),
        "statistic": res.statistic,
        "mu_hat": res.mu_hat,
        "sigma2_hat": res.sigma2_hat,
        "z": res.z,
        "p_value": p_value,
        "reject": bool(reject),
        "m_used": res.m_used,
        "elapsed_s": res.elapsed,
    }
    _emit(payload, args.json)
    return 0


def cmd_simulate(args):
    innovation = _innovation(args.dist)
    mean = build_mean_signal(args.p, args.nu, args.phi3, args.omega)
    spec = make_process(args.n, args.p, args.q, innovation=innovation,
                        mean=mean, seed=args.seed)
    x = simulate(spec)
    try:
        out = open(args.out, "w", newline="") if args.out else sys.stdout
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from exc
    try:
        writer = csv.writer(out, lineterminator="\n")
        for row in x:
            writer.writerow([repr(float(v)) for v in row])
    finally:
        if args.out:
            out.close()
    return 0


def cmd_mc(args):
    innovation = _innovation(args.dist)
    methods = tuple(args.methods.split(","))
    if args.scenario == "size":
        spec = ScenarioSpec(n=args.n, p=args.p, q=args.q, innovation=innovation,
                            nu=args.nu, phi3=0.0, reps=args.reps, seed=args.seed,
                            methods=methods, alpha=args.alpha)
        report = run_size_experiment(spec)
    else:
        spec = scenario(args.scenario, innovation=innovation, nu=args.nu,
                        phi3=args.phi3, reps=args.reps, seed=args.seed,
                        methods=methods, alpha=args.alpha)
        if args.phi3 > 0:
            report = run_power_experiment(spec)
        else:
            report = run_size_experiment(spec)
    print(report.to_json() if args.json else report.text())
    return 0


def cmd_bench(args):
    innovation = _innovation(args.dist)
    methods = tuple(args.methods.split(","))
    specs = []
    for triple in args.grid.split(","):
        parts = triple.split(":")
        if len(parts) != 3:
            raise InputError(f"bad grid entry {triple!r}; expected n:p:q")
        try:
            n, p, q = (int(v) for v in parts)
        except ValueError as exc:
            raise InputError(f"bad grid entry {triple!r}; expected integers") from exc
        specs.append(ScenarioSpec(n=n, p=p, q=q, innovation=innovation,
                                  reps=args.reps, seed=args.seed, methods=methods))
    report = run_timing_benchmark(specs, args.reps)
    print(report.to_json() if args.json else report.text())
    return 0


def cmd_rolling(args):
    x, labels = read_csv_matrix(args.file, date_column=args.date_column)
    config = TestConfig(alpha=args.alpha, m=args.M)
    results = rolling_test(x, args.window, config)
    rows = []
    for start, res in results:
        key = labels[start].isoformat() if labels else start
        rows.append({"start": key, "p_value": res.p_value, "z": res.z,
                     "reject": bool(res.reject)})
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print("start,p_value")
        for row in rows:
            print(f"{row['start']},{row['p_value']!r}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hdmean",
        description="Mean testing for high-dimensional time series with "
                    "temporal dependence.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="run a mean test on a CSV file")
    p_test.add_argument("file")
    p_test.add_argument("--alpha", type=float, default=0.05)
    p_test.add_argument("--M", type=int, default=None,
                        help="fixed bandwidth (default: ceil(min(n,p)^(1/8)))")
    p_test.add_argument("--method", choices=("tn", "zcq", "sri"), default="tn")
    p_test.add_argument("--b", type=int, default=None,
                        help="zcq exclusion bandwidth (default: ceil(n^(1/4)))")
    p_test.add_argument("--lag-window", type=int, default=None,
                        help="zcq lag window (default: floor(n/10))")
    p_test.add_argument("--two-sided", action="store_true",
                        help="double the tail (convenience; the procedure "
                             "itself is one-sided)")
    p_test.add_argument("--json", action="store_true")
    p_test.set_defaults(func=cmd_test)

    p_sim = sub.add_parser("simulate", help="simulate a series to CSV")
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--p", type=int, required=True)
    p_sim.add_argument("--q", type=int, default=0)
    p_sim.add_argument("--dist", choices=tuple(DISTS), default="gauss")
    p_sim.add_argument("--nu", type=float, default=0.2)
    p_sim.add_argument("--phi3", type=float, default=0.0)
    p_sim.add_argument("--omega", type=float, default=1.0)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_mc = sub.add_parser("mc", help="Monte Carlo size/power experiment")
    p_mc.add_argument("--scenario", choices=tuple(SCENARIOS) + ("size",),
                      required=True)
    p_mc.add_argument("--n", type=int, default=250, help="rows (scenario=size)")
    p_mc.add_argument("--p", type=int, default=100, help="columns (scenario=size)")
    p_mc.add_argument("--q", type=int, default=0, help="MA order (scenario=size)")
    p_mc.add_argument("--dist", choices=tuple(DISTS), default="gauss")
    p_mc.add_argument("--nu", type=float, default=0.2)
    p_mc.add_argument("--phi3", type=float, default=0.0)
    p_mc.add_argument("--alpha", type=float, default=0.05)
    p_mc.add_argument("--reps", type=int, default=1000)
    p_mc.add_argument("--seed", type=int, default=0)
    p_mc.add_argument("--methods", default="tn", help="comma list of tn,zcq,sri")
    p_mc.add_argument("--json", action="store_true")
    p_mc.set_defaults(func=cmd_mc)

    p_bench = sub.add_parser("bench", help="timing benchmark")
    p_bench.add_argument("--grid", default="250:100:0,500:300:0",
                         help="comma list of n:p:q triples")
    p_bench.add_argument("--dist", choices=tuple(DISTS), default="gauss")
    p_bench.add_argument("--reps", type=int, default=50)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--methods", default="tn,zcq,sri")
    p_bench.add_argument("--json", action="store_true")
    p_bench.set_defaults(func=cmd_bench)

    p_roll = sub.add_parser("rolling", help="rolling-window p-values")
    p_roll.add_argument("file")
    p_roll.add_argument("--window", type=int, required=True)
    p_roll.add_argument("--alpha", type=float, default=0.05)
    p_roll.add_argument("--M", type=int, default=None)
    p_roll.add_argument("--date-column", action="store_true",
                        help="treat the first column as ISO date labels")
    p_roll.add_argument("--json", action="store_true")
    p_roll.set_defaults(func=cmd_rolling)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
