"""Periodic task model and discrete-time conventions.

Time is an integer count of unit slots. Real tasks carry ids ``1..n`` in
declaration order; id ``0`` is reserved for the idle task.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

#: Stand-in for an infinite deadline / budget. Larger than any real time value.
INF = 2**64 - 1
IDLE_ID = 0

_TIME_MAX = 2**64 - 1


@dataclass(frozen=True)
class Task:
    """Static parameters of one periodic task.

    ``wcib`` is the worst-case inversion budget; it stays ``None`` until the
    offline analysis has been run (see :func:`schedrand.analysis.analyze`).
    """

    wcet: int
    period: int
    deadline: int
    id: int = 0
    wcib: int | None = None

    @property
    def utilization(self) -> Fraction:
        return Fraction(self.wcet, self.period)

    def to_dict(self) -> dict:
        return {"wcet": self.wcet, "period": self.period, "deadline": self.deadline}


@dataclass(frozen=True)
class Taskset:
    tasks: tuple[Task, ...] = field(default_factory=tuple)

    def __post_init__(self):
        # ids follow declaration order so that ties break deterministically
        tasks = tuple(
            t if t.id == i + 1 else replace(t, id=i + 1) for i, t in enumerate(self.tasks)
        )
        object.__setattr__(self, "tasks", tasks)

    @classmethod
    def from_params(cls, params: Iterable[Sequence[int]]) -> "Taskset":
        """Build from ``(C, T)`` or ``(C, T, D)`` tuples."""
        tasks = []
        for p in params:
            c, t = int(p[0]), int(p[1])
            d = int(p[2]) if len(p) > 2 else t
            tasks.append(Task(wcet=c, period=t, deadline=d))
        return cls(tuple(tasks))

    def __len__(self) -> int:
        return len(self.tasks)

    def __iter__(self):
        return iter(self.tasks)

    def __getitem__(self, i: int) -> Task:
        return self.tasks[i]

    @cached_property
    def hyperperiod(self) -> int:
        return hyperperiod(self)

    @cached_property
    def utilization(self) -> Fraction:
        return utilization(self)

    def with_wcib(self, wcib: Sequence[int]) -> "Taskset":
        if len(wcib) != len(self.tasks):
            raise ValueError("one budget per task required")
        return Taskset(tuple(replace(t, wcib=int(v)) for t, v in zip(self.tasks, wcib)))

    def to_dict(self) -> dict:
        return {"tasks": [t.to_dict() for t in self.tasks]}

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def from_dict(cls, data: dict) -> "Taskset":
        try:
            entries = data["tasks"]
        except (KeyError, TypeError):
            raise ValueError('taskset JSON must be an object with a "tasks" list') from None
        tasks = []
        for k, e in enumerate(entries):
            try:
                c, t = int(e["wcet"]), int(e["period"])
            except KeyError as exc:
                raise ValueError(f"task {k + 1}: missing key {exc.args[0]!r}") from None
            tasks.append(Task(wcet=c, period=t, deadline=int(e.get("deadline", t))))
        return cls(tuple(tasks))

    @classmethod
    def from_json(cls, path: str | Path) -> "Taskset":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(slots=True, eq=False)
class Job:
    """One released instance of a task (mutable while it is active)."""

    task_id: int
    release: int
    deadline: int
    remaining: int
    actual_exec: int
    wcet: int
    rib: int

    @property
    def is_idle(self) -> bool:
        return self.task_id == IDLE_ID

    @property
    def key(self) -> tuple[int, int]:
        return (self.deadline, self.task_id)


def idle_job() -> Job:
    """The idle task's single, never-ending job."""
    return Job(IDLE_ID, 0, INF, INF, INF, INF, INF)


def hyperperiod(taskset: Iterable[Task]) -> int:
    """LCM of all periods. Raises ``OverflowError`` past the 64-bit time range."""
    periods = [t.period for t in taskset]
    if not periods:
        raise ValueError("hyperperiod of an empty taskset is undefined")
    if any(p < 1 for p in periods):
        raise ValueError("periods must be >= 1")
    result = 1
    for p in periods:
        result = math.lcm(result, p)
        if result > _TIME_MAX:
            raise OverflowError(f"hyperperiod exceeds 64-bit time range (periods={periods})")
    return result


def utilization(taskset: Iterable[Task]) -> Fraction:
    return sum((Fraction(t.wcet, t.period) for t in taskset), Fraction(0))


def validate(taskset: Taskset) -> list[str]:
    """Return every violated invariant; an empty list means the taskset is usable."""
    problems = []
    for t in taskset:
        name = f"task {t.id}"
        if t.wcet < 1:
            problems.append(f"{name}: wcet must be >= 1 (got {t.wcet})")
        if t.period < 1:
            problems.append(f"{name}: period must be >= 1 (got {t.period})")
        if t.deadline < 1:
            problems.append(f"{name}: deadline must be >= 1 (got {t.deadline})")
        if t.deadline > t.period:
            problems.append(
                f"{name}: constrained deadline violated (D={t.deadline} > T={t.period})"
            )
        if t.wcet > t.deadline:
            problems.append(f"{name}: wcet {t.wcet} exceeds deadline {t.deadline}")
        if t.wcib is not None and t.wcib > t.deadline - t.wcet:
            problems.append(f"{name}: wcib {t.wcib} exceeds D - C = {t.deadline - t.wcet}")
    if not taskset.tasks:
        problems.append("taskset is empty")
    elif all(t.period >= 1 for t in taskset):
        u = utilization(taskset)
        if u > 1:
            problems.append(f"EDF utilization bound violated (U={float(u):.4f} > 1)")
        try:
            hyperperiod(taskset)
        except OverflowError as exc:
            problems.append(str(exc))
    return problems


class InvalidTaskset(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems
