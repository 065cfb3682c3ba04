"""Schedule entropy over traces observed for several hyperperiods.

The main measure is an approximate-entropy style statistic. For every start
slot ``t`` it compares the length-``m`` window starting at ``t`` across all
observed hyperperiods. Windows within Hamming distance ``pi`` count as matches.
All logarithms are base 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .trace import ScheduleTrace


@dataclass(frozen=True)
class EntropyParams:
    m: int
    pi: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"interval length m must be >= 1, got {self.m}")
        if not 0 <= self.pi <= self.m:
            raise ValueError(f"threshold pi must lie in [0, m], got {self.pi}")

    @classmethod
    def default(cls, hyperperiod: int) -> "EntropyParams":
        """``m = ceil(0.35 L)``, ``pi = floor(0.1 L)``."""
        return cls(m=max(1, math.ceil(0.35 * hyperperiod)), pi=math.floor(0.1 * hyperperiod))


def hamming(u, v) -> int:
    u, v = np.asarray(u), np.asarray(v)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    return int(np.count_nonzero(u != v))


def extract_interval(trace: ScheduleTrace, k: int, t: int, m: int) -> np.ndarray:
    """Window of ``m`` slots of hyperperiod ``k`` (0-based) starting at slot ``t``.

    Wraps modulo ``L`` inside the same hyperperiod.
    """
    if not 0 <= k < trace.K:
        raise IndexError(f"hyperperiod index {k} outside 0..{trace.K - 1}")
    if not 0 <= t < trace.L:
        raise IndexError(f"slot {t} outside 0..{trace.L - 1}")
    if m < 1:
        raise ValueError("m must be >= 1")
    return trace.slots[k, (t + np.arange(m)) % trace.L]


def _pairwise_matches(windows: np.ndarray) -> np.ndarray:
    """Number of equal positions between every pair of rows."""
    matches = np.zeros((len(windows), len(windows)), dtype=np.float32)
    for sym in np.unique(windows):
        onehot = (windows == sym).astype(np.float32)
        matches += onehot @ onehot.T
    return matches


def _interval_entropy(windows: np.ndarray, pi: int) -> float:
    K, m = windows.shape
    uniq, counts = np.unique(windows, axis=0, return_counts=True)
    if len(uniq) == 1:
        return 0.0
    dist = m - np.rint(_pairwise_matches(uniq)).astype(np.int64)
    close = dist <= pi
    c = (close @ counts) / K
    return float(-(counts * np.log2(c)).sum() / K)


def approx_entropy(trace: ScheduleTrace, params: EntropyParams | None = None) -> float:
    if params is None:
        params = EntropyParams.default(trace.L)
    if params.m > trace.L:
        raise ValueError(f"m={params.m} exceeds the hyperperiod length {trace.L}")
    offsets = np.arange(params.m)
    total = 0.0
    for t in range(trace.L):
        windows = trace.slots[:, (t + offsets) % trace.L]
        total += _interval_entropy(windows, params.pi)
    return total / params.m


def _plugin_entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log2(p)).sum())


def slot_shannon_entropy(trace: ScheduleTrace) -> float:
    """Sum over slots of the Shannon entropy of that slot's symbol."""
    total = 0.0
    for col in trace.slots.T:
        total += _plugin_entropy(np.unique(col, return_counts=True)[1])
    return total


def empirical_true_entropy(trace: ScheduleTrace) -> float:
    """Plug-in Shannon entropy of whole-hyperperiod schedules.

    Only meaningful when ``K`` is large relative to the number of distinct
    schedules (small hyperperiods).
    """
    return _plugin_entropy(np.unique(trace.slots, axis=0, return_counts=True)[1])


def entropy_report(trace: ScheduleTrace, params: EntropyParams | None = None,
                   true_entropy: bool = False) -> dict:
    params = params or EntropyParams.default(trace.L)
    return {
        "approx_entropy": approx_entropy(trace, params),
        "slot_shannon": slot_shannon_entropy(trace),
        "true_entropy": empirical_true_entropy(trace) if true_entropy else None,
        "params": {"m": params.m, "pi": params.pi, "K": trace.K, "L": trace.L},
    }
