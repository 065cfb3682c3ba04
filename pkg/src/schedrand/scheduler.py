"""Discrete-time EDF simulator with randomized, budget-bounded priority inversions.

At every decision point (job arrival, completion, inversion-budget expiry or
random yield) the engine picks a job from a candidate list built around the
earliest-deadline job and runs it until the next decision point. Each job
carries a remaining inversion budget (RIB) that is debited while a job with a
later deadline occupies the processor; once the budget of a ready job is
exhausted, nothing with a later deadline may run ahead of it.

Randomness comes from :class:`random.Random` (MT19937). ``randrange`` and
``randint`` draw by rejection on ``getrandbits``, so candidate selection has
no modulo bias and a given seed replays identically on every platform.
"""

from __future__ import annotations

import bisect
import enum
import json
import math
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .analysis import AnalysisResult, analyze
from .feasibility import inversion_is_safe
from .taskmodel import INF, InvalidTaskset, Job, Task, Taskset, idle_job, validate
from .trace import ScheduleTrace

# exec-time draws use their own stream so every scheme sees the same job demands
_EXEC_STREAM_SALT = 0x9E3779B97F4A7C15


class Scheme(enum.IntEnum):
    """Feature levels are cumulative: each scheme includes all earlier ones."""

    VANILLA_EDF = 0
    BASE = 1
    IDLE_TIME = 2
    FINE_GRAINED = 3
    UNUSED_TIME_RECLAMATION = 4

    @property
    def short(self) -> str:
        return _SHORT[self]

    @classmethod
    def parse(cls, value: "str | int | Scheme") -> "Scheme":
        if isinstance(value, cls):
            return value
        if isinstance(value, int):
            return cls(value)
        key = value.strip().lower()
        for scheme, short in _SHORT.items():
            if key in (short, scheme.name.lower()):
                return scheme
        raise ValueError(f"unknown scheme {value!r}; expected one of {', '.join(_SHORT.values())}")


_SHORT = {
    Scheme.VANILLA_EDF: "edf",
    Scheme.BASE: "base",
    Scheme.IDLE_TIME: "it",
    Scheme.FINE_GRAINED: "fg",
    Scheme.UNUSED_TIME_RECLAMATION: "utr",
}

REORDER_SCHEMES = (
    Scheme.BASE,
    Scheme.IDLE_TIME,
    Scheme.FINE_GRAINED,
    Scheme.UNUSED_TIME_RECLAMATION,
)


@dataclass(frozen=True)
class ExecPolicy:
    """How each job's actual execution demand is drawn.

    ``wcet``: every job runs its full WCET.
    ``uniform``: uniform integer in ``[ceil(lo*C), ceil(hi*C)]``, redrawn per job.
    ``fixed``: ``floor(fraction*C)``, at least one slot.
    """

    kind: str = "wcet"
    alpha: tuple[float, float] = (0.5, 1.0)
    fraction: float = 0.8

    def __post_init__(self):
        if self.kind not in ("wcet", "uniform", "fixed"):
            raise ValueError(f"unknown exec policy {self.kind!r}")
        lo, hi = self.alpha
        if not 0 < lo <= hi <= 1:
            raise ValueError(f"alpha range must satisfy 0 < lo <= hi <= 1, got {self.alpha}")
        if not 0 < self.fraction <= 1:
            raise ValueError("fraction must lie in (0, 1]")

    def draw(self, wcet: int, rng: random.Random) -> int:
        if self.kind == "wcet":
            return wcet
        if self.kind == "fixed":
            return max(1, math.floor(self.fraction * wcet))
        lo = max(1, math.ceil(self.alpha[0] * wcet))
        hi = min(wcet, math.ceil(self.alpha[1] * wcet))
        return rng.randint(lo, hi)


@dataclass(frozen=True)
class SchedulerConfig:
    scheme: Scheme = Scheme.VANILLA_EDF
    seed: int = 0
    exec_policy: ExecPolicy = field(default_factory=ExecPolicy)
    hyperperiods: int = 1
    guard: bool = True

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if self.hyperperiods < 1:
            raise ValueError("hyperperiods must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["scheme"] = self.scheme.short
        d["exec_policy"]["alpha"] = list(self.exec_policy.alpha)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SchedulerConfig":
        pol = dict(d.get("exec_policy", {}))
        if "alpha" in pol:
            pol["alpha"] = tuple(pol["alpha"])
        return cls(
            scheme=Scheme.parse(d.get("scheme", "edf")),
            seed=int(d.get("seed", 0)),
            exec_policy=ExecPolicy(**pol),
            hyperperiods=int(d.get("hyperperiods", 1)),
            guard=bool(d.get("guard", True)),
        )


@dataclass(frozen=True)
class DecisionRecord:
    t: int
    task_id: int
    t_next: int
    reason: str  # arrival | completion | budget_expiry | random_yield | guard


@dataclass(frozen=True)
class DeadlineMiss:
    task_id: int
    release: int
    deadline: int
    remaining: int
    detected_at: int


class ProtocolViolation(RuntimeError):
    """A run broke a guarantee the protocol is supposed to provide."""

    def __init__(self, message: str, result: "SimulationResult | None" = None):
        super().__init__(message)
        self.result = result


@dataclass
class SimulationResult:
    trace: ScheduleTrace
    decisions: list[DecisionRecord]
    misses: list[DeadlineMiss]
    config: SchedulerConfig
    analysis: AnalysisResult

    def to_dict(self, taskset: Taskset | None = None) -> dict:
        out = {
            "config": self.config.to_dict(),
            "analysis": self.analysis.to_dict(),
            "hyperperiod": self.trace.L,
            "decisions": [asdict(d) for d in self.decisions],
            "misses": [asdict(m) for m in self.misses],
            "trace": self.trace.slots.tolist(),
        }
        if taskset is not None:
            out["taskset"] = taskset.to_dict()
        return out

    def to_json(self, path: str | Path, taskset: Taskset | None = None) -> None:
        Path(path).write_text(json.dumps(self.to_dict(taskset)) + "\n")


def min_inversion_deadline(ready: Sequence[Job], job: Job) -> int:
    """Smallest deadline among later-deadline ready jobs whose budget is used up.

    "Later" follows the scheduler's total order (deadline, then task id), so a
    job tied on deadline but ranked below ``job`` also counts. Returns
    :data:`INF` when there is none. A budget of exactly zero counts as
    exhausted: such a job may no longer be blocked.
    """
    best = INF
    k = (job.deadline, job.task_id)
    for j in ready:
        if j.rib <= 0 and j.deadline < best and (j.deadline, j.task_id) > k:
            best = j.deadline
    return best


def build_candidates(ready: Sequence[Job]) -> list[Job]:
    """Jobs eligible to run now; ``ready`` must be sorted by :attr:`Job.key`."""
    hp = ready[0]
    if hp.rib <= 0:
        return [hp]
    limit = min_inversion_deadline(ready, hp)
    return [j for j in ready if j.deadline <= limit]


def blocking_budget(ready: Sequence[Job], job: Job) -> int:
    """Smallest RIB among ready jobs with an earlier deadline than ``job``."""
    return min((j.rib for j in ready if j.deadline < job.deadline), default=INF)


def pick_next(
    candidates: Sequence[Job],
    ready: Sequence[Job],
    rng: random.Random,
    scheme: Scheme,
    t: int,
    next_arrival: int,
) -> tuple[Job, int, str]:
    """Choose the job to run from ``t`` and the next decision point ``t'``."""
    hp = ready[0]
    if scheme == Scheme.VANILLA_EDF or len(candidates) == 1:
        chosen = hp
    else:
        chosen = candidates[rng.randrange(len(candidates))]

    if chosen is hp:
        finish = INF if hp.is_idle else t + hp.remaining
        if finish <= next_arrival:
            return hp, finish, "completion"
        return hp, next_arrival, "arrival"

    full = min(chosen.remaining, blocking_budget(ready, chosen))
    delta = full
    if scheme >= Scheme.FINE_GRAINED and full < INF:
        delta = rng.randint(1, full)
    end = t + delta
    if end > next_arrival:
        return chosen, next_arrival, "arrival"
    if delta == chosen.remaining:
        return chosen, end, "completion"
    if end == next_arrival:
        return chosen, end, "arrival"
    return chosen, end, ("budget_expiry" if delta == full else "random_yield")


def tick_budgets(ready: Sequence[Job], running: Job, elapsed: int) -> None:
    """Charge ``elapsed`` slots: to the runner's demand and to every job it blocks."""
    if not running.is_idle:
        running.remaining -= elapsed
    d = running.deadline
    for j in ready:
        if j.deadline < d and j is not running:
            j.rib -= elapsed


def reclaim_unused(ready: Sequence[Job], finished: Job) -> None:
    """Hand a finished job's unused WCET to every ready job with a later deadline."""
    slack = finished.wcet - finished.actual_exec
    if slack <= 0:
        return
    for j in ready:
        if j.deadline > finished.deadline and not j.is_idle:
            j.rib += slack


def _check_choice(ready: list[Job], chosen: Job, scheme: Scheme, t: int) -> None:
    hp = ready[0]
    if chosen is hp:
        return
    if scheme == Scheme.BASE and chosen.is_idle:
        raise ProtocolViolation(f"t={t}: idle task selected under the base scheme")
    for j in ready:
        if j.deadline < chosen.deadline and j.rib <= 0:
            raise ProtocolViolation(
                f"t={t}: task {chosen.task_id} (d={chosen.deadline}) blocks task "
                f"{j.task_id} (d={j.deadline}) whose budget is {j.rib}"
            )
    if chosen.deadline > min_inversion_deadline(ready, hp):
        raise ProtocolViolation(f"t={t}: task {chosen.task_id} runs past the inversion deadline")


def guard_inversion(
    ready: list[Job],
    chosen: Job,
    t: int,
    t_next: int,
    reason: str,
    next_release: Sequence[int],
    tasks: Sequence[Task],
    next_arrival: int,
    horizon: int | None,
) -> tuple[Job, int, str]:
    """Shorten or cancel an inversion that would make some deadline unreachable.

    Returns the pick unchanged when it is safe. Otherwise the longest safe
    prefix is kept; if no slot is safe the earliest-deadline job runs instead.
    """
    hp = ready[0]
    if chosen is hp or chosen.deadline == hp.deadline:
        return chosen, t_next, reason
    delta = t_next - t
    if inversion_is_safe(ready, chosen, delta, t, next_release, tasks, horizon):
        return chosen, t_next, reason
    lo, hi = 0, delta - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if inversion_is_safe(ready, chosen, mid, t, next_release, tasks, horizon):
            lo = mid
        else:
            hi = mid - 1
    if lo > 0:
        return chosen, t + lo, "guard"
    return hp, min(t + hp.remaining, next_arrival), "guard"


def simulate(
    taskset: Taskset,
    analysis: AnalysisResult | None = None,
    config: SchedulerConfig | None = None,
    *,
    rng: random.Random | None = None,
    exec_rng: random.Random | None = None,
    record_decisions: bool = True,
    check_invariants: bool = False,
    strict: bool = True,
) -> SimulationResult:
    """Run ``config.hyperperiods`` hyperperiods from a synchronous release at t=0.

    ``rng`` drives scheduling choices and ``exec_rng`` job demands; both default
    to streams derived from ``config.seed``. With ``strict`` any deadline miss
    raises :class:`ProtocolViolation` (the result is attached to the error).
    """
    config = config or SchedulerConfig()
    problems = validate(taskset)
    if problems:
        raise InvalidTaskset(problems)
    if analysis is None:
        analysis = analyze(taskset)
    if rng is None:
        rng = random.Random(config.seed)
    if exec_rng is None:
        exec_rng = random.Random(config.seed ^ _EXEC_STREAM_SALT)

    scheme = config.scheme
    policy = config.exec_policy
    tasks = taskset.tasks
    n = len(tasks)
    L = taskset.hyperperiod
    end = L * config.hyperperiods

    flat = np.zeros(end, dtype=np.int16 if n < 2**15 else np.int64)
    decisions: list[DecisionRecord] = []
    misses: list[DeadlineMiss] = []
    ready: list[Job] = [idle_job()] if scheme >= Scheme.IDLE_TIME else []
    key = _job_key
    next_release = [0] * n
    guard = config.guard and scheme != Scheme.VANILLA_EDF
    # a fully utilized taskset never idles, so the forward check needs a cap
    guard_span = 2 * L + max(tk.deadline for tk in tasks) if taskset.utilization == 1 else None
    t = 0

    while t < end:
        if ready and ready[0].deadline <= t:
            _collect_misses(ready, t, misses)
        for i in range(n):
            if next_release[i] == t:
                task = tasks[i]
                actual = policy.draw(task.wcet, exec_rng)
                job = Job(i + 1, t, t + task.deadline, actual, actual, task.wcet,
                          analysis.wcib[i])
                bisect.insort(ready, job, key=key)
                next_release[i] = t + task.period
        next_arrival = min(min(next_release), end)

        if not ready:
            if record_decisions:
                decisions.append(DecisionRecord(t, 0, next_arrival, "arrival"))
            t = next_arrival
            continue

        if scheme == Scheme.VANILLA_EDF:
            candidates = ready[:1]
        else:
            candidates = build_candidates(ready)
        chosen, t_next, reason = pick_next(candidates, ready, rng, scheme, t, next_arrival)
        if guard:
            chosen, t_next, reason = guard_inversion(
                ready, chosen, t, t_next, reason, next_release, tasks, next_arrival,
                None if guard_span is None else t + guard_span,
            )
        if check_invariants:
            _check_choice(ready, chosen, scheme, t)
        if record_decisions:
            decisions.append(DecisionRecord(t, chosen.task_id, t_next, reason))

        if not chosen.is_idle:
            flat[t:t_next] = chosen.task_id
        tick_budgets(ready, chosen, t_next - t)
        if not chosen.is_idle and chosen.remaining == 0:
            ready.remove(chosen)
            if scheme == Scheme.UNUSED_TIME_RECLAMATION:
                reclaim_unused(ready, chosen)
        t = t_next

    _collect_misses(ready, end, misses)
    result = SimulationResult(
        ScheduleTrace.from_flat(flat, L), decisions, misses, config, analysis
    )
    if misses and strict:
        first = misses[0]
        raise ProtocolViolation(
            f"{len(misses)} deadline miss(es); first: task {first.task_id} released at "
            f"{first.release}, deadline {first.deadline}, {first.remaining} slot(s) left "
            f"(scheme={scheme.short}, seed={config.seed})",
            result,
        )
    return result


def _job_key(job: Job) -> tuple[int, int]:
    return (job.deadline, job.task_id)


def _collect_misses(ready: list[Job], t: int, misses: list[DeadlineMiss]) -> None:
    late = [j for j in ready if not j.is_idle and j.deadline <= t]
    for j in late:
        misses.append(DeadlineMiss(j.task_id, j.release, j.deadline, j.remaining, t))
        ready.remove(j)
