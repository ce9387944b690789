"""Command-line harness: single runs, SFFS-vs-U-curve comparison tables, self test.

Exit codes: 0 success, 1 usage error, 2 data error, 3 self-test failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from . import selftest
from .baselines import EXHAUSTIVE_LIMIT, SffsConfig, exhaustive, sffs
from .cost import PenalizedMceCost, TrapCost, synth_u_instance
from .data import FORMATS, DataError, as_discrete, bundled_path, load_dataset, preprocess
from .lattice import ConfigurationError, format_subset
from .search import SearchConfig, run_ucurve

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_SELFTEST = 0, 1, 2, 3

DEFAULT_UC_BUDGET = 200_000

# bundled stand-ins for the three experiment groups
SUITES: dict[str, list[tuple[str, str]]] = {
    "woperator": [
        ("woperator16_a.csv", ""),
        ("woperator16_b.csv", ""),
        ("woperator16_c.csv", ""),
    ],
    "biological": [("biological27.csv", "quantize=3")],
    "uci": [
        ("pendigits16.csv", "binarize"),
        ("votes16.csv", "binarize"),
        ("ionosphere34.csv", "binarize"),
        ("dorothea60.csv", "filter=100,binarize"),
    ],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit 2, which means "data error" here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunReport:
    algorithm: str
    best_subset: str
    best_cost: float
    computed_nodes: float
    wall_time_seconds: float
    seed: Any
    dataset: str
    config: dict = field(default_factory=dict)

    FIELDS = ("algorithm", "best_subset", "best_cost", "computed_nodes", "wall_time_seconds", "seed", "dataset", "config")


# -- problem construction ---------------------------------------------------


@dataclass
class Problem:
    cost: Any
    dataset_id: str


def _resolve_data(path: str) -> Path:
    if path.startswith("bundled:"):
        return bundled_path(path.split(":", 1)[1])
    return Path(path)


def build_problem(args: argparse.Namespace) -> Problem:
    if args.cost == "synth":
        if args.n is None:
            raise UsageError("--cost synth needs --n")
        return Problem(synth_u_instance(args.n, args.instance_seed if args.instance_seed is not None else args.seed), f"synth(n={args.n})")
    if args.cost == "trap":
        return Problem(TrapCost(), "trap(n=6)")
    if not args.data:
        raise UsageError("--cost pmce needs --data")
    path = _resolve_data(args.data)
    d = load_dataset(path, args.format)
    steps = [s for s in (args.preprocess or "").split(",") if s]
    d = as_discrete(preprocess(d, steps))
    return Problem(PenalizedMceCost(d), path.name)


def _direction(text: str) -> float | str:
    if text == "adaptive":
        return "adaptive"
    if text.startswith("p="):
        try:
            return float(text[2:])
        except ValueError:
            pass
    raise UsageError(f"--direction expects p=<float> or adaptive, got {text!r}")


# -- single runs -------------------------------------------------------------


def _execute(job: tuple) -> tuple[RunReport, list[str]]:
    algo, mode, cost, dataset_id, seed, opts = job
    trace_lines: list[str] = []
    trace = trace_lines.append if opts.get("trace") else None
    start = time.perf_counter()
    n = cost.n
    echo: dict[str, Any] = {"n": n}
    if algo == "ucurve":
        cfg = SearchConfig(
            seed=seed,
            result_capacity=opts["result_capacity"],
            direction_policy=opts["direction"],
            max_evaluations=opts.get("max_evaluations") if mode == "uc" else None,
            exhaust_trial_limit=opts.get("exhaust_limit"),
            stop_below=opts.get("stop_below") if mode == "uc" else None,
            stop_inclusive=opts.get("stop_inclusive", False),
        )
        out = run_ucurve(cost, cfg, trace)
        name = "ucurve_" + mode
        echo.update(
            mode=mode,
            direction=opts["direction"],
            result_capacity=cfg.result_capacity,
            max_evaluations=cfg.max_evaluations,
            stop_below=cfg.stop_below,
            stop_reason=out.stop_reason,
        )
    elif algo == "sffs":
        out = sffs(cost, SffsConfig(delta=opts["delta"], result_capacity=opts["result_capacity"]))
        name = "sffs"
        echo.update(delta=opts["delta"])
    else:
        out = exhaustive(cost, opts["result_capacity"], force=opts.get("force", False))
        name = "exhaustive"
    elapsed = time.perf_counter() - start
    best, value = out.results.entries[0]
    report = RunReport(name, format_subset(best, n), value, out.computed_nodes, elapsed, seed, dataset_id, echo)
    return report, [f"{seed}\t{line}" for line in trace_lines]


def run_jobs(jobs: list[tuple], workers: int) -> list[tuple[RunReport, list[str]]]:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_execute, jobs))
    return [_execute(job) for job in jobs]


def mean_report(reports: list[RunReport]) -> RunReport:
    first = reports[0]
    return RunReport(
        first.algorithm,
        "-",
        statistics.fmean(r.best_cost for r in reports),
        statistics.fmean(r.computed_nodes for r in reports),
        statistics.fmean(r.wall_time_seconds for r in reports),
        "mean",
        first.dataset,
        dict(first.config, repeats=len(reports)),
    )


def cmd_run(args: argparse.Namespace) -> list[RunReport]:
    problem = build_problem(args)
    n = problem.cost.n
    if args.algo == "exhaustive" and n > EXHAUSTIVE_LIMIT and not args.force:
        raise UsageError(f"exhaustive search at n={n} needs --force")
    if args.algo != "ucurve" and args.mode:
        raise UsageError("--mode applies to --algo ucurve only")
    mode = args.mode or "ucc"
    opts: dict[str, Any] = {
        "result_capacity": args.result_capacity,
        "direction": _direction(args.direction),
        "delta": args.delta,
        "max_evaluations": args.max_evaluations,
        "exhaust_limit": args.exhaust_limit,
        "force": args.force,
        "trace": bool(args.trace),
    }
    if args.algo == "ucurve" and mode == "uc":
        target = args.target
        if target is None and args.max_evaluations is None:
            target = sffs(problem.cost, SffsConfig(delta=args.delta)).best_cost
        opts["stop_below"] = target
        opts["max_evaluations"] = args.max_evaluations or DEFAULT_UC_BUDGET
    jobs = [(args.algo, mode, problem.cost, problem.dataset_id, args.seed + i, opts) for i in range(args.repeats)]
    results = run_jobs(jobs, args.jobs)
    reports = [r for r, _ in results]
    if args.trace:
        Path(args.trace).write_text("".join(line + "\n" for _, lines in results for line in lines))
    if args.repeats > 1:
        reports.append(mean_report(reports))
    return reports


# -- comparison tables --------------------------------------------------------


@dataclass
class CompareRow:
    test: str
    winner: str
    sffs_nodes: float
    uc_nodes: float
    ucc_nodes: float | None
    sffs_time: float
    uc_time: float
    ucc_time: float | None
    sffs_cost: float
    uc_costs: list[float]
    ucc_costs: list[float] | None


TABLE_HEADER = (
    "Test",
    "Winner",
    "Computed nodes SFFS",
    "Computed nodes UC",
    "Computed nodes UCC",
    "Time(sec.) SFFS",
    "Time(sec.) UC",
    "Time(sec.) UCC",
)


def compare_problem(
    cost: Any,
    test: str,
    repeats: int = 5,
    seed: int = 0,
    delta: int = 3,
    run_ucc: bool = True,
    uc_budget: int = DEFAULT_UC_BUDGET,
    direction: float | str = 0.5,
) -> CompareRow:
    """SFFS, then UCC (when requested), then UC stopped on beating SFFS.

    UC normally stops on the first node strictly cheaper than the SFFS result.
    When UCC proved the SFFS cost optimal, UC stops on reaching it instead.
    Winner is ``UC`` if the UC runs found something cheaper than SFFS,
    ``EQUAL`` if their best equals it and ``SFFS`` otherwise.
    """
    t0 = time.perf_counter()
    base = sffs(cost, SffsConfig(delta=delta))
    sffs_time = time.perf_counter() - t0
    target = base.best_cost

    ucc_costs = ucc_nodes = ucc_times = None
    if run_ucc:
        ucc_costs, ucc_nodes, ucc_times = [], [], []
        for i in range(repeats):
            t0 = time.perf_counter()
            out = run_ucurve(cost, SearchConfig(seed=seed + i, direction_policy=direction))
            ucc_times.append(time.perf_counter() - t0)
            ucc_costs.append(out.best_cost)
            ucc_nodes.append(out.computed_nodes)
    inclusive = ucc_costs is not None and min(ucc_costs) == target

    uc_costs, uc_nodes, uc_times = [], [], []
    for i in range(repeats):
        cfg = SearchConfig(
            seed=seed + i,
            direction_policy=direction,
            max_evaluations=uc_budget,
            stop_below=target,
            stop_inclusive=inclusive,
        )
        t0 = time.perf_counter()
        out = run_ucurve(cost, cfg)
        uc_times.append(time.perf_counter() - t0)
        uc_costs.append(out.best_cost)
        uc_nodes.append(out.computed_nodes)

    best_uc = min(uc_costs)
    winner = "UC" if best_uc < target else "EQUAL" if best_uc == target else "SFFS"
    return CompareRow(
        test,
        winner,
        base.computed_nodes,
        statistics.fmean(uc_nodes),
        statistics.fmean(ucc_nodes) if ucc_nodes else None,
        sffs_time,
        statistics.fmean(uc_times),
        statistics.fmean(ucc_times) if ucc_times else None,
        target,
        uc_costs,
        ucc_costs,
    )


def _num(value: float | None, digits: int = 0) -> str:
    if value is None:
        return "NA"
    if digits == 0:
        return f"{value:,.0f}"
    return f"{value:.{digits}f}"


def table_cells(row: CompareRow) -> list[str]:
    return [
        row.test,
        row.winner,
        _num(row.sffs_nodes),
        _num(row.uc_nodes),
        _num(row.ucc_nodes),
        _num(row.sffs_time, 2),
        _num(row.uc_time, 2),
        _num(row.ucc_time, 2),
    ]


def render_table(rows: Sequence[CompareRow], out: str, costs: bool = False) -> str:
    header = list(TABLE_HEADER)
    body = [table_cells(r) for r in rows]
    if costs:
        header += ["SFFS cost", "UC cost", "UCC cost"]
        for cells, r in zip(body, rows):
            cells += [repr(r.sffs_cost), repr(min(r.uc_costs)), "NA" if r.ucc_costs is None else repr(min(r.ucc_costs))]
    if out == "md":
        lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
        lines += ["| " + " | ".join(cells) + " |" for cells in body]
        return "\n".join(lines) + "\n"
    if out == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(body)
        return buf.getvalue()
    return "".join(json.dumps(dict(zip(header, cells))) + "\n" for cells in body)


def cmd_compare(args: argparse.Namespace) -> list[CompareRow]:
    problems: list[tuple[Any, str, bool]] = []
    entries: list[tuple[str, str]] = []
    for suite in args.suite or []:
        entries += [(f"bundled:{name}", steps) for name, steps in SUITES[suite]]
    for item in args.data or []:
        path, _, steps = item.partition("@")
        entries.append((path, steps or (args.preprocess or "")))
    for path, steps in entries:
        resolved = _resolve_data(path)
        d = as_discrete(preprocess(load_dataset(resolved, args.format), [s for s in steps.split(",") if s]))
        n = d.feature_count
        problems.append((PenalizedMceCost(d), f"{resolved.stem} ({n})", n <= args.ucc_limit or args.force))
    if args.cost in ("synth", "trap"):
        cost = TrapCost() if args.cost == "trap" else synth_u_instance(args.n or 8, args.seed)
        problems.append((cost, f"{args.cost} ({cost.n})", True))
    if not problems:
        raise UsageError("compare needs --suite, --data or --cost synth/trap")
    direction = _direction(args.direction)
    rows = []
    for cost, test, ucc_ok in problems:
        rows.append(
            compare_problem(
                cost,
                test,
                repeats=args.repeats,
                seed=args.seed,
                delta=args.delta,
                run_ucc=ucc_ok and args.mode != "uc",
                uc_budget=args.max_evaluations or DEFAULT_UC_BUDGET,
                direction=direction,
            )
        )
    return rows


def cmd_selftest(args: argparse.Namespace, log: Callable[[str], Any] = sys.stdout.write) -> selftest.Summary:
    if args.n < 2 or args.trials < 1:
        raise UsageError("selftest needs --n >= 2 and --trials >= 1")
    return selftest.run(n_max=args.n, trials=args.trials, seed=args.seed, log=log)


# -- output -------------------------------------------------------------------


def render_reports(reports: Sequence[RunReport], out: str) -> str:
    if out == "json-lines":
        return "".join(json.dumps(asdict(r), sort_keys=True) + "\n" for r in reports)
    rows = [[getattr(r, f) if f != "config" else json.dumps(r.config, sort_keys=True) for f in RunReport.FIELDS] for r in reports]
    if out == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RunReport.FIELDS)
        w.writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(RunReport.FIELDS) + " |", "|" + "---|" * len(RunReport.FIELDS)]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return "\n".join(lines) + "\n"


# -- argument parsing -----------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value file; command-line flags override it")
    p.add_argument("--cost", choices=("pmce", "synth", "trap"), default="pmce")
    p.add_argument("--format", choices=FORMATS, default="csv_labeled_last")
    p.add_argument("--preprocess", default="", help="comma list of binarize, quantize=k, filter=m")
    p.add_argument("--n", type=int, help="lattice degree for --cost synth")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--delta", type=int, default=3, help="SFFS overshoot")
    p.add_argument("--direction", default="p=0.5", help="p=<float> or adaptive")
    p.add_argument("--max-evaluations", type=int)
    p.add_argument("--force", action="store_true", help="allow full search above the size guard")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ucurve", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one algorithm, optionally repeated over seeds")
    _common(run)
    run.add_argument("--data", help="dataset path, or bundled:<name>")
    run.add_argument("--algo", choices=("ucurve", "sffs", "exhaustive"), default="ucurve")
    run.add_argument("--mode", choices=("uc", "ucc"))
    run.add_argument("--instance-seed", type=int, help="seed of the synthetic instance (default: --seed)")
    run.add_argument("--result-capacity", type=int, default=1)
    run.add_argument("--target", type=float, help="UC mode: stop on the first cost below this")
    run.add_argument("--exhaust-limit", type=int, help="cap on consecutive costlier neighbours per exhausting step")
    run.add_argument("--out", choices=("csv", "md", "json-lines"), default="md")
    run.add_argument("--trace", help="write the search event trace to this file")
    run.add_argument("--jobs", type=int, default=1)

    cmp_ = sub.add_parser("compare", help="SFFS vs U-curve (UC and UCC) table")
    _common(cmp_)
    cmp_.add_argument("--data", action="append", help="dataset path[@steps], repeatable")
    cmp_.add_argument("--suite", action="append", choices=sorted(SUITES))
    cmp_.add_argument("--mode", choices=("uc", "ucc"), help="uc skips the complete search")
    cmp_.add_argument("--ucc-limit", type=int, default=EXHAUSTIVE_LIMIT, help="largest n for which UCC runs")
    cmp_.add_argument("--costs", action="store_true", help="append best-cost columns")
    cmp_.add_argument("--out", choices=("csv", "md", "json-lines"), default="md")
    cmp_.set_defaults(repeats=5)

    st = sub.add_parser("selftest", help="oracle and property checks at small n")
    st.add_argument("--n", type=int, default=12, help="largest lattice degree")
    st.add_argument("--trials", type=int, default=200)
    st.add_argument("--seed", type=int, default=0)
    return parser


def _read_config(path: str) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    sub = parser._subparsers._group_actions[0].choices[args.command]  # type: ignore[union-attr]
    known = {a.dest: a for a in sub._actions}
    defaults: dict[str, Any] = {}
    for key, value in _read_config(args.config).items():
        if key not in known or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r}")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        elif isinstance(action, argparse._AppendAction):
            defaults[key] = [v.strip() for v in value.split(";") if v.strip()]
        else:
            defaults[key] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None, stdout: Callable[[str], Any] | None = None) -> int:
    write = stdout or sys.stdout.write
    parser = make_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
        if args.command == "selftest":
            return EXIT_OK if cmd_selftest(args, write).ok else EXIT_SELFTEST
        if args.repeats < 1:
            raise UsageError("--repeats must be >= 1")
        if args.command == "run":
            write(render_reports(cmd_run(args), args.out))
        else:
            write(render_table(cmd_compare(args), args.out, costs=args.costs))
        return EXIT_OK
    except (UsageError, ConfigurationError) as exc:
        sys.stderr.write(f"ucurve: usage error: {exc}\n")
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        sys.stderr.write(f"ucurve: data error: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
