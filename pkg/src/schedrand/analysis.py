"""Offline EDF response-time bound and worst-case inversion budgets.

All functions index tasks by their 0-based position ``i`` in the taskset.
"""

from __future__ import annotations

from dataclasses import dataclass

from .taskmodel import Taskset

MAX_ITERATIONS = 10**6


class ConvergenceError(RuntimeError):
    def __init__(self, last: int, iterations: int):
        super().__init__(
            f"busy-period recurrence did not converge after {iterations} steps (last iterate {last})"
        )
        self.last = last
        self.iterations = iterations


@dataclass(frozen=True)
class AnalysisResult:
    response_times: tuple[int, ...]
    wcib: tuple[int, ...]
    busy_period: int
    iterations: int

    def to_dict(self) -> dict:
        return {
            "response_times": list(self.response_times),
            "wcib": list(self.wcib),
            "busy_period": self.busy_period,
            "iterations": self.iterations,
        }


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def interference(taskset: Taskset, i: int, a: int) -> int:
    """Upper bound on the work of other tasks that can delay task ``i`` released at ``a``.

    Each contributing task gets one extra instance on both arguments of the
    min to cover back-to-back hits.
    """
    if a < 0:
        raise ValueError("release offset must be >= 0")
    d_i = taskset[i].deadline
    total = 0
    for j, tj in enumerate(taskset):
        if j == i or tj.deadline > a + d_i:
            continue
        n = min(_ceil_div(d_i, tj.period) + 1, 1 + (a + d_i - tj.deadline) // tj.period + 1)
        total += n * tj.wcet
    return total


def workload(taskset: Taskset, i: int, a: int) -> int:
    t = taskset[i]
    return (a // t.period + 1) * t.wcet + interference(taskset, i, a)


def response_time_at(taskset: Taskset, i: int, a: int) -> int:
    return max(taskset[i].wcet, workload(taskset, i, a) - a)


def busy_period_iterations(taskset: Taskset, max_iterations: int = MAX_ITERATIONS) -> tuple[int, int]:
    """Fixed point of ``r = sum(ceil(r / T_j) * C_j)`` and the number of steps taken."""
    r = sum(t.wcet for t in taskset)
    for k in range(1, max_iterations + 1):
        nxt = sum(_ceil_div(r, t.period) * t.wcet for t in taskset)
        if nxt == r:
            return r, k
        r = nxt
    raise ConvergenceError(r, max_iterations)


def busy_period_bound(taskset: Taskset, max_iterations: int = MAX_ITERATIONS) -> int:
    return busy_period_iterations(taskset, max_iterations)[0]


def wcrt(taskset: Taskset, i: int, busy_period: int | None = None) -> int:
    """Maximum of :func:`response_time_at` over integer offsets ``0 <= a < R^ - C_i``."""
    if busy_period is None:
        busy_period = busy_period_bound(taskset)
    c = taskset[i].wcet
    return max((response_time_at(taskset, i, a) for a in range(busy_period - c)), default=c)


def wcib(taskset: Taskset) -> list[int]:
    return list(analyze(taskset).wcib)


def analyze(taskset: Taskset) -> AnalysisResult:
    busy, iterations = busy_period_iterations(taskset)
    rts = tuple(wcrt(taskset, i, busy) for i in range(len(taskset)))
    budgets = tuple(t.deadline - r for t, r in zip(taskset, rts))
    return AnalysisResult(rts, budgets, busy, iterations)
