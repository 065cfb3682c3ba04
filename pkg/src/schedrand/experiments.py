"""Experiment drivers that turn generated workloads into CSV/JSON tables.

Every output file carries the full :class:`ExperimentSpec` and per-row seeds,
so any row can be replayed in isolation.
"""

from __future__ import annotations

import csv
import json
import math
import random
import statistics
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from . import __version__
from .entropy import EntropyParams, approx_entropy, empirical_true_entropy
from .scheduler import REORDER_SCHEMES, ExecPolicy, Scheme, SchedulerConfig, simulate
from .spectral import busy_signal, detect_peaks, dft_spectrum, range_ratio_gmean
from .taskgen import BUCKETS, DEFAULT_PERIODS, SMALL_PERIODS, GenConfig, GenerationError, generate_taskset
from .taskmodel import Taskset
from .trace import ScheduleTrace

EXPERIMENTS = ("entropy-vs-util", "range-ratio", "spectrum", "correlation")
ALL_SCHEMES = ("edf", "base", "it", "fg", "utr")


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: str = "entropy-vs-util"
    schemes: tuple[str, ...] = ALL_SCHEMES
    buckets: tuple[int, ...] = tuple(range(9))
    tasksets_per_bucket: int = 25
    hyperperiods: int = 100
    seed: int = 0
    exec_policy: str = "uniform"
    n_tasks: tuple[int, int] = (3, 10)
    periods: tuple[int, ...] = DEFAULT_PERIODS
    # None means the per-hyperperiod defaults ceil(0.35 L) and floor(0.1 L)
    m: int | None = None
    pi: int | None = None
    # observation window; None means the taskset's hyperperiod
    window: int | None = None
    guard: bool = True
    workers: int = 1
    taskset_files: tuple[str, ...] = ()
    out_dir: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        schemes = tuple(Scheme.parse(s).short for s in self.schemes)
        object.__setattr__(self, "schemes", schemes)
        for b in self.buckets:
            if not 0 <= b < len(BUCKETS):
                raise ValueError(f"bucket index {b} outside 0..{len(BUCKETS) - 1}")
        if self.tasksets_per_bucket < 1 or self.hyperperiods < 1:
            raise ValueError("tasksets_per_bucket and hyperperiods must be >= 1")
        for f in self.taskset_files:
            if not Path(f).is_file():
                raise FileNotFoundError(f)

    @classmethod
    def correlation_defaults(cls, **overrides) -> "ExperimentSpec":
        """Small-hyperperiod regime: periods in {2,4,5,10,20}, L=20, K=1500, m=7, pi=2."""
        base = dict(
            experiment="correlation", schemes=("utr",), tasksets_per_bucket=23,
            hyperperiods=1500, n_tasks=(3, 5), periods=SMALL_PERIODS, m=7, pi=2,
            window=20,
        )
        base.update(overrides)
        return cls(**base)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["code_version"] = __version__
        return d


def cell_seed(*parts: int) -> int:
    """Independent 63-bit seed for one grid cell."""
    return int(np.random.SeedSequence([p & 0xFFFFFFFF for p in parts]).generate_state(2, np.uint64)[0] >> 1)


def _entropy_params(spec: ExperimentSpec, L: int) -> EntropyParams:
    default = EntropyParams.default(L)
    return EntropyParams(
        m=default.m if spec.m is None else spec.m,
        pi=default.pi if spec.pi is None else spec.pi,
    )


def _tasksets(spec: ExperimentSpec, bucket: int) -> list[tuple[int, Taskset]]:
    cfg = GenConfig(n_tasks=spec.n_tasks, util_bucket=BUCKETS[bucket], periods=spec.periods)
    out = []
    for idx in range(spec.tasksets_per_bucket):
        seed = cell_seed(spec.seed, bucket, idx)
        try:
            out.append((seed, generate_taskset(cfg, random.Random(seed))))
        except GenerationError as exc:
            raise ExperimentError(f"bucket {bucket} taskset {idx}: {exc}") from exc
    return out


def _run(ts: Taskset, scheme: str, seed: int, spec: ExperimentSpec) -> ScheduleTrace:
    window = spec.window or ts.hyperperiod
    if window % ts.hyperperiod:
        raise ExperimentError(f"window {window} is not a multiple of hyperperiod {ts.hyperperiod}")
    cfg = SchedulerConfig(
        scheme=scheme, seed=seed, exec_policy=ExecPolicy(spec.exec_policy),
        hyperperiods=spec.hyperperiods * window // ts.hyperperiod, guard=spec.guard,
    )
    trace = simulate(ts, config=cfg, record_decisions=False).trace
    return ScheduleTrace.from_flat(trace.flat, window)


def _map(fn, jobs, workers):
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, jobs, chunksize=4))
    return [fn(j) for j in jobs]


def _entropy_cell(job):
    spec, seed, ts, scheme = job
    trace = _run(ts, scheme, seed, spec)
    return approx_entropy(trace, _entropy_params(spec, trace.L))


def _range_cell(job):
    spec, seed, ts, scheme = job
    with warnings.catch_warnings(), np.errstate(divide="ignore"):
        warnings.simplefilter("ignore", RuntimeWarning)
        return range_ratio_gmean(_run(ts, scheme, seed, spec), ts)


def _grid(spec: ExperimentSpec, cell) -> list[dict]:
    jobs, keys = [], []
    for b in spec.buckets:
        for seed, ts in _tasksets(spec, b):
            for scheme in spec.schemes:
                jobs.append((spec, seed, ts, scheme))
                keys.append((b, scheme, seed))
    values = _map(cell, jobs, spec.workers)
    grouped: dict[tuple[int, str], list[float]] = {}
    for (b, scheme, _), v in zip(keys, values):
        grouped.setdefault((b, scheme), []).append(v)
    rows = []
    for (b, scheme), vals in grouped.items():
        lo, hi = BUCKETS[b]
        rows.append({
            "bucket": b, "util_lo": lo, "util_hi": hi, "scheme": scheme,
            "mean": statistics.fmean(vals),
            "stddev": statistics.stdev(vals) if len(vals) > 1 else 0.0,
            "n": len(vals),
        })
    return rows


def run_entropy_experiment(spec: ExperimentSpec) -> list[dict]:
    """Mean approximate entropy per (bucket, scheme).

    ``normalized`` divides each mean by the largest scheme mean in its bucket.
    """
    rows = _grid(spec, _entropy_cell)
    top: dict[int, float] = {}
    for r in rows:
        top[r["bucket"]] = max(top.get(r["bucket"], 0.0), r["mean"])
    for r in rows:
        r["normalized"] = r["mean"] / top[r["bucket"]] if top[r["bucket"]] > 0 else 0.0
    return rows


def run_range_experiment(spec: ExperimentSpec) -> list[dict]:
    """Execution-range to deadline ratio per (bucket, scheme).

    Each taskset contributes the geometric mean over its tasks; ``mean`` is
    the arithmetic mean of those per-taskset values.
    """
    return _grid(spec, _range_cell)


def _correlation_cell(job):
    spec, seed, ts, scheme = job
    trace = _run(ts, scheme, seed, spec)
    return (empirical_true_entropy(trace), approx_entropy(trace, _entropy_params(spec, trace.L)))


def run_correlation_experiment(spec: ExperimentSpec) -> dict:
    """Pearson correlation between true and approximate entropy across tasksets.

    Tasksets whose bucket cannot be generated under the period set are skipped.
    Returns ``correlation=None`` when either series has zero variance.
    """
    jobs = []
    skipped = []
    for b in spec.buckets:
        try:
            pairs = _tasksets(spec, b)
        except ExperimentError as exc:
            skipped.append({"bucket": b, "reason": str(exc)})
            continue
        jobs += [(spec, seed, ts, spec.schemes[0]) for seed, ts in pairs]
    if len(jobs) < 10:
        raise ExperimentError(f"only {len(jobs)} valid tasksets; need at least 10")
    points = _map(_correlation_cell, jobs, spec.workers)
    true_h = np.array([p[0] for p in points])
    approx_h = np.array([p[1] for p in points])
    if np.ptp(true_h) == 0 or np.ptp(approx_h) == 0:
        corr = None
    else:
        corr = float(stats.pearsonr(true_h, approx_h)[0])
    return {
        "correlation": corr,
        "n": len(points),
        "skipped_buckets": skipped,
        "points": [
            {"seed": j[1], "true_entropy": float(t), "approx_entropy": float(a)}
            for j, t, a in zip(jobs, true_h, approx_h)
        ],
    }


def spectrum_report(ts: Taskset, spec: ExperimentSpec, peaks: int = 8) -> dict:
    """Busy-signal spectrum and top peaks for each scheme and seed.

    Seeds run from ``spec.seed`` to ``spec.seed + spec.tasksets_per_bucket - 1``.

    A task counts as identified when ``1/T_i`` is among the top ``peaks``.
    """
    runs = []
    for scheme in spec.schemes:
        for k in range(spec.tasksets_per_bucket):
            seed = spec.seed + k
            trace = _run(ts, scheme, seed, spec)
            sp = dft_spectrum(busy_signal(trace))
            top = detect_peaks(sp, peaks)
            found = [
                t.id for t in ts
                if any(math.isclose(f, 1 / t.period, rel_tol=0, abs_tol=1e-12) for f in top)
            ]
            runs.append({
                "scheme": scheme, "seed": seed, "peaks": top, "identified": found,
                "all_identified": len(found) == len(ts),
                "frequencies": sp.frequencies.tolist(), "magnitudes": sp.magnitudes.tolist(),
            })
    return {"true_frequencies": [1 / t.period for t in ts], "runs": runs}


def run_spectrum_experiment(spec: ExperimentSpec) -> dict:
    """Spectrum study for each taskset file (seeds ``seed .. seed + count - 1``)."""
    if not spec.taskset_files:
        raise ExperimentError("the spectrum experiment needs at least one taskset file")
    return {f: spectrum_report(Taskset.from_json(f), spec) for f in spec.taskset_files}


def write_table(rows: list[dict], spec: ExperimentSpec, out_dir: str | Path, name: str) -> tuple[Path, Path]:
    """Write ``name.csv`` and ``name.json`` (the latter embeds the spec)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path, json_path = out / f"{name}.csv", out / f"{name}.json"
    with csv_path.open("w", newline="") as fh:
        if rows:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    json_path.write_text(json.dumps({"spec": spec.to_dict(), "rows": rows}, indent=1) + "\n")
    return csv_path, json_path


def run_experiment(spec: ExperimentSpec) -> dict:
    """Dispatch on ``spec.experiment``; writes files when ``spec.out_dir`` is set."""
    if spec.experiment == "entropy-vs-util":
        result = {"rows": run_entropy_experiment(spec)}
    elif spec.experiment == "range-ratio":
        result = {"rows": run_range_experiment(spec)}
    elif spec.experiment == "correlation":
        result = run_correlation_experiment(spec)
    else:
        result = {"reports": run_spectrum_experiment(spec)}
    if spec.out_dir:
        name = spec.experiment.replace("-", "_")
        if "rows" in result:
            write_table(result["rows"], spec, spec.out_dir, name)
        else:
            Path(spec.out_dir).mkdir(parents=True, exist_ok=True)
            Path(spec.out_dir, f"{name}.json").write_text(
                json.dumps({"spec": spec.to_dict(), **result}) + "\n"
            )
    return result


__all__ = [
    "ALL_SCHEMES", "EXPERIMENTS", "ExperimentError", "ExperimentSpec", "REORDER_SCHEMES",
    "cell_seed", "run_correlation_experiment", "run_entropy_experiment", "run_experiment",
    "run_range_experiment", "run_spectrum_experiment", "spectrum_report", "write_table",
]
