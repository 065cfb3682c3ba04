"""Online EDF feasibility check used to veto unsafe priority inversions.

The offline inversion budgets bound the blocking a job suffers after its own
release, but work pushed back by inversions *before* a release can still land
in that job's window. To keep every deadline, an inversion of ``delta`` slots is
admitted only if plain EDF, started from the state that inversion leaves behind,
still meets every deadline. Demands are taken at their WCET-based remainder,
since the scheduler cannot see a job's actual execution time in advance.
"""

from __future__ import annotations

import heapq
from typing import Sequence

from .taskmodel import Job, Task


def edf_meets_deadlines(
    pending: Sequence[tuple[int, int, int]],
    start: int,
    next_release: Sequence[int],
    tasks: Sequence[Task],
    horizon: int | None = None,
) -> bool:
    """Run EDF forward from ``start`` and report whether every deadline holds.

    ``pending`` holds ``(deadline, task_id, remaining_wcet)`` triples. The run
    stops at the first idle instant: from there on only periodic releases
    remain, which an EDF-schedulable taskset handles from any phase. A fully
    utilized taskset may never idle, so ``horizon`` caps the run in that case.
    """
    heap = [p for p in pending if p[2] > 0]
    heapq.heapify(heap)
    rel = list(next_release)
    n = len(tasks)
    t = start
    while True:
        for i in range(n):
            if rel[i] <= t:
                task = tasks[i]
                heapq.heappush(heap, (rel[i] + task.deadline, i + 1, task.wcet))
                rel[i] += task.period
        if not heap:
            return True
        if horizon is not None and t >= horizon:
            return True
        nr = min(rel)
        d, tid, rem = heap[0]
        if t + rem > d:
            return False
        if t + rem <= nr:
            t += rem
            heapq.heappop(heap)
        else:
            heapq.heapreplace(heap, (d, tid, rem - (nr - t)))
            t = nr


def wcet_remaining(job: Job) -> int:
    return job.wcet - (job.actual_exec - job.remaining)


def inversion_is_safe(
    ready: Sequence[Job],
    chosen: Job,
    delta: int,
    t: int,
    next_release: Sequence[int],
    tasks: Sequence[Task],
    horizon: int | None = None,
) -> bool:
    """Whether letting ``chosen`` (or idle) hold the processor for ``delta`` slots is safe."""
    pending = []
    for j in ready:
        if j.is_idle:
            continue
        rem = wcet_remaining(j)
        if j is chosen:
            rem -= delta
        pending.append((j.deadline, j.task_id, rem))
    return edf_meets_deadlines(pending, t + delta, next_release, tasks, horizon)
