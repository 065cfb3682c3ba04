"""Synthetic periodic tasksets: UUniFast utilizations over a shared hyperperiod."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .taskmodel import Task, Taskset

#: Divisors of 100 greater than 10.
DEFAULT_PERIODS = (20, 25, 50, 100)
#: Small-hyperperiod period set used for the true-vs-approximate entropy study.
SMALL_PERIODS = (2, 4, 5, 10, 20)
MAX_ATTEMPTS = 10_000


def utilization_bucket(i: int) -> tuple[float, float]:
    """Base-utilization bucket ``[0.01 + 0.1 i, 0.1 + 0.1 i]`` for ``0 <= i < 9``."""
    if not 0 <= i < 9:
        raise ValueError(f"bucket index must be in 0..8, got {i}")
    return (round(0.01 + 0.1 * i, 10), round(0.1 + 0.1 * i, 10))


BUCKETS = tuple(utilization_bucket(i) for i in range(9))


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GenConfig:
    n_tasks: tuple[int, int] = (3, 10)
    util_bucket: tuple[float, float] = (0.41, 0.5)
    periods: tuple[int, ...] = DEFAULT_PERIODS
    max_attempts: int = MAX_ATTEMPTS

    def __post_init__(self):
        lo, hi = self.n_tasks
        if not 1 <= lo <= hi:
            raise ValueError(f"invalid task-count range {self.n_tasks}")
        ulo, uhi = self.util_bucket
        if not 0 < ulo <= uhi <= 1:
            raise ValueError(f"utilization bucket must lie in (0, 1], got {self.util_bucket}")
        if not self.periods or min(self.periods) < 1:
            raise ValueError("periods must be positive")


def uunifast(n: int, total_util: float, rng: random.Random) -> list[float]:
    """Split ``total_util`` into ``n`` shares drawn uniformly from the simplex."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < total_util <= 1:
        raise ValueError("total utilization must lie in (0, 1]")
    shares = []
    remaining = total_util
    for i in range(1, n):
        nxt = remaining * rng.random() ** (1.0 / (n - i))
        shares.append(remaining - nxt)
        remaining = nxt
    shares.append(remaining)
    return shares


def generate_taskset(config: GenConfig, rng: random.Random) -> Taskset:
    """Draw tasksets until one passes the EDF utilization test after WCET rounding."""
    ulo, uhi = config.util_bucket
    for _ in range(config.max_attempts):
        n = rng.randint(*config.n_tasks)
        total = rng.uniform(ulo, uhi)
        shares = uunifast(n, total, rng)
        tasks = []
        for u in shares:
            t = rng.choice(config.periods)
            c = max(1, math.ceil(u * t))
            tasks.append(Task(wcet=c, period=t, deadline=t))
        ts = Taskset(tuple(tasks))
        if ts.utilization <= 1:
            return ts
    raise GenerationError(
        f"no EDF-schedulable taskset found for bucket [{ulo}, {uhi}] "
        f"after {config.max_attempts} attempts"
    )


def generate_batch(
    config: GenConfig, count: int, seed: int
) -> list[Taskset]:
    rng = random.Random(seed)
    return [generate_taskset(config, rng) for _ in range(count)]
