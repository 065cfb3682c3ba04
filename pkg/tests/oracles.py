"""Independent reference implementations used only by the tests.

Each one is written the slow, obvious way and shares no code with the package.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter

import numpy as np

EX1 = [(4, 10), (1, 20), (1, 5), (2, 12)]
EX2 = [(1, 10), (2, 20), (2, 5)]
EX3 = [(1, 5), (3, 8), (2, 9), (4, 20)]


def brute_edf(params, horizon, exec_times=None):
    """Slot-by-slot EDF with synchronous release; ties go to the lower index.

    Returns (schedule, response times per task as lists, busy-period end).
    The busy period ends at the first instant ``t > 0`` with no backlog left
    from earlier releases; it is None if that never happens within ``horizon``.
    """
    n = len(params)
    jobs = []  # [deadline, index, remaining, release]
    sched = []
    resp = [[] for _ in range(n)]
    busy_end = None
    counters = [0] * n
    for t in range(horizon + 1):
        if t > 0 and not jobs and busy_end is None:
            busy_end = t
        if t == horizon:
            break
        for i, (c, p) in enumerate(params):
            if t % p == 0:
                demand = c if exec_times is None else exec_times[i][counters[i]]
                counters[i] += 1
                jobs.append([t + p, i, demand, t])
        if not jobs:
            sched.append(0)
            continue
        jobs.sort(key=lambda j: (j[0], j[1]))
        j = jobs[0]
        sched.append(j[1] + 1)
        j[2] -= 1
        if j[2] == 0:
            resp[j[1]].append(t + 1 - j[3])
            jobs.pop(0)
    return sched, resp, busy_end


def brute_dft_magnitudes(x):
    """Direct O(N^2) DFT of the mean-removed signal, positive bins only."""
    x = np.asarray(x, float) - np.mean(x)
    n = len(x)
    out = []
    for k in range(1, n // 2 + 1):
        s = sum(x[t] * complex(math.cos(2 * math.pi * k * t / n), -math.sin(2 * math.pi * k * t / n))
                for t in range(n))
        out.append(abs(s))
    return np.array(out)


def brute_approx_entropy(rows, m, pi):
    """Nested-loop approximate entropy straight from the definition."""
    K, L = len(rows), len(rows[0])
    total = 0.0
    for t in range(L):
        windows = [[row[(t + j) % L] for j in range(m)] for row in rows]
        eta = 0.0
        for k in range(K):
            c = sum(
                1 for k2 in range(K)
                if sum(a != b for a, b in zip(windows[k], windows[k2])) <= pi
            ) / K
            eta -= math.log2(c)
        total += eta / K
    return total / m


def shannon(items):
    counts = Counter(items)
    n = sum(counts.values())
    return -sum(c / n * math.log2(c / n) for c in counts.values())


def rejection_simplex(n, total, rng: random.Random):
    """Uniform point on {u > 0, sum u = total} by rejection from the cube."""
    while True:
        u = [rng.random() for _ in range(n - 1)]
        if sum(u) < 1:
            return [total * x for x in u] + [total * (1 - sum(u))]


def two_pattern_rows(K):
    """Two complementary 5-slot patterns in equal proportion."""
    return np.array([[1, 2, 1, 2, 1], [2, 1, 2, 1, 2]] * (K // 2))


def all_vectors_rows(K):
    """All 32 two-symbol vectors of length 5, cycled."""
    vecs = list(itertools.product([1, 2], repeat=5))
    return np.array([vecs[k % 32] for k in range(K)])
