"""Command-line entry point: ``schedrand <command> ...``."""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

import numpy as np

from .analysis import analyze
from .entropy import EntropyParams, entropy_report
from .experiments import ALL_SCHEMES, EXPERIMENTS, ExperimentSpec, run_experiment
from .scheduler import ExecPolicy, Scheme, SchedulerConfig, simulate
from .spectral import busy_signal, detect_peaks, dft_spectrum, execution_range, occupancy_signal
from .taskgen import BUCKETS, DEFAULT_PERIODS, SMALL_PERIODS, GenConfig, generate_taskset
from .taskmodel import Taskset
from .trace import ScheduleTrace

SCHEME_CHOICES = tuple(s.short for s in Scheme)


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("UsageError", message, code=2)


def _fail(kind: str, message: str, code: int = 1):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    sys.exit(code)


def _emit(obj, out: str | None, name: str):
    text = json.dumps(obj, indent=1)
    if out:
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        (path / name).write_text(text + "\n")
    else:
        print(text)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _periods(text: str) -> tuple[int, ...]:
    if text == "default":
        return DEFAULT_PERIODS
    if text == "small":
        return SMALL_PERIODS
    return _int_list(text)


def cmd_gen(args):
    cfg = GenConfig(n_tasks=tuple(args.n_tasks), util_bucket=BUCKETS[args.bucket], periods=args.periods)
    rng = random.Random(args.seed)
    sets = [generate_taskset(cfg, rng) for _ in range(args.count)]
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for i, ts in enumerate(sets):
            ts.to_json(out / f"taskset_b{args.bucket}_{i:04d}.json")
    else:
        print(json.dumps([ts.to_dict() for ts in sets], indent=1))


def cmd_analyze(args):
    ts = Taskset.from_json(args.taskset)
    _emit({"taskset": ts.to_dict(), **analyze(ts).to_dict()}, args.out, "analysis.json")


def cmd_simulate(args):
    ts = Taskset.from_json(args.taskset)
    cfg = SchedulerConfig(
        scheme=args.scheme, seed=args.seed, exec_policy=ExecPolicy(args.exec_policy),
        hyperperiods=args.hyperperiods, guard=not args.no_guard,
    )
    result = simulate(ts, config=cfg, strict=False)
    if args.format == "csv":
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            result.trace.to_csv(Path(args.out) / "trace.csv")
        else:
            result.trace.to_csv(sys.stdout)
    else:
        _emit(result.to_dict(ts), args.out, "simulation.json")
    if result.misses:
        raise CliError(f"{len(result.misses)} deadline miss(es) during simulation")


def cmd_entropy(args):
    trace = ScheduleTrace.from_csv(args.trace)
    default = EntropyParams.default(trace.L)
    params = EntropyParams(
        m=default.m if args.m is None else args.m,
        pi=default.pi if args.pi is None else args.pi,
    )
    _emit(entropy_report(trace, params, true_entropy=args.true_entropy), args.out, "entropy.json")


def cmd_spectrum(args):
    trace = ScheduleTrace.from_csv(args.trace)
    ids = [args.task] if args.task is not None else sorted(int(x) for x in np.unique(trace.flat) if x)
    signals = {f"task{i}": occupancy_signal(trace, i) for i in ids}
    signals["busy"] = busy_signal(trace)
    report = {}
    for name, sig in signals.items():
        sp = dft_spectrum(sig)
        report[name] = detect_peaks(sp, args.peaks)
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            np.savetxt(
                Path(args.out) / f"spectrum_{name}.csv",
                np.column_stack([sp.frequencies, sp.magnitudes]),
                delimiter=",", header="frequency,magnitude", comments="",
            )
    _emit({"peaks": report, "count": args.peaks}, args.out, "peaks.json")


def cmd_range(args):
    ts = Taskset.from_json(args.taskset)
    trace = ScheduleTrace.from_csv(args.trace)
    rows = []
    for task in ts:
        r = execution_range(trace, ts, task.id)
        rows.append({"task_id": task.id, "width": r.width, "deadline": r.deadline, "ratio": r.ratio})
    ratios = np.array([r["ratio"] for r in rows])
    gmean = float(np.exp(np.log(ratios).mean())) if ratios.min() > 0 else 0.0
    _emit({"tasks": rows, "geometric_mean": gmean}, args.out, "range.json")


def cmd_experiment(args):
    if args.experiment == "correlation":
        overrides = dict(seed=args.seed, workers=args.workers, guard=not args.no_guard, out_dir=args.out)
        if args.hyperperiods is not None:
            overrides["hyperperiods"] = args.hyperperiods
        if args.tasksets_per_bucket is not None:
            overrides["tasksets_per_bucket"] = args.tasksets_per_bucket
        spec = ExperimentSpec.correlation_defaults(**overrides)
    else:
        per_bucket = args.tasksets_per_bucket or (250 if args.full_scale else 25)
        if args.experiment == "spectrum":
            per_bucket = args.tasksets_per_bucket or 10
        spec = ExperimentSpec(
            experiment=args.experiment, schemes=args.schemes, buckets=args.buckets,
            tasksets_per_bucket=per_bucket, hyperperiods=args.hyperperiods or 100,
            seed=args.seed, exec_policy=args.exec_policy, guard=not args.no_guard,
            workers=args.workers, taskset_files=tuple(args.taskset), out_dir=args.out,
        )
    result = run_experiment(spec)
    if not args.out:
        print(json.dumps({"spec": spec.to_dict(), **result}, indent=1))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="schedrand", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, scheme=False):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="output directory (default: stdout)")
        if scheme:
            sp.add_argument("--scheme", choices=SCHEME_CHOICES, default="edf")
            sp.add_argument("--hyperperiods", "-K", type=int, default=1)
            sp.add_argument("--exec-policy", choices=("wcet", "uniform", "fixed"), default="uniform")
            sp.add_argument("--no-guard", action="store_true",
                            help="run the inversion rules without the online feasibility check")

    g = sub.add_parser("gen", help="generate random tasksets")
    common(g)
    g.add_argument("--bucket", type=int, choices=range(len(BUCKETS)), default=4)
    g.add_argument("--n-tasks", type=int, nargs=2, default=(3, 10), metavar=("MIN", "MAX"))
    g.add_argument("--periods", type=_periods, default=DEFAULT_PERIODS,
                   help="'default', 'small' or comma-separated periods")
    g.add_argument("--count", type=int, default=1)
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", help="response-time bounds and inversion budgets")
    a.add_argument("taskset")
    common(a)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="simulate a taskset and write its trace")
    s.add_argument("taskset")
    common(s, scheme=True)
    s.add_argument("--format", choices=("csv", "json"), default="json")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("entropy", help="entropy of a trace CSV")
    e.add_argument("trace")
    common(e)
    e.add_argument("--m", type=int)
    e.add_argument("--pi", type=int)
    e.add_argument("--true-entropy", action="store_true")
    e.set_defaults(func=cmd_entropy)

    f = sub.add_parser("spectrum", help="DFT peaks of a trace CSV")
    f.add_argument("trace")
    common(f)
    f.add_argument("--task", type=int)
    f.add_argument("--peaks", type=int, default=8)
    f.set_defaults(func=cmd_spectrum)

    r = sub.add_parser("range", help="execution range per task")
    r.add_argument("taskset")
    r.add_argument("trace")
    common(r)
    r.set_defaults(func=cmd_range)

    x = sub.add_parser("experiment", help="run a full experiment grid")
    x.add_argument("experiment", choices=EXPERIMENTS)
    common(x)
    x.add_argument("--schemes", type=lambda t: tuple(t.split(",")), default=ALL_SCHEMES)
    x.add_argument("--buckets", type=_int_list, default=tuple(range(len(BUCKETS))))
    x.add_argument("--tasksets-per-bucket", type=int)
    x.add_argument("--hyperperiods", "-K", type=int)
    x.add_argument("--exec-policy", choices=("wcet", "uniform", "fixed"), default="uniform")
    x.add_argument("--taskset", action="append", default=[], help="taskset file (spectrum)")
    x.add_argument("--workers", type=int, default=1)
    x.add_argument("--full-scale", action="store_true", help="250 tasksets per bucket")
    x.add_argument("--no-guard", action="store_true")
    x.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except Exception as exc:  # report everything as JSON for scripted callers
        _fail(type(exc).__name__, str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
