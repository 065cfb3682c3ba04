"""Frequency-domain view of a schedule, as an observer of execution would see it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .taskmodel import Taskset
from .trace import ScheduleTrace


@dataclass(frozen=True)
class Spectrum:
    """One-sided magnitude spectrum on bins ``k/N`` for ``0 < k <= N/2``.

    Magnitudes are scaled so that their squares sum to the signal's total
    variance energy, ``sum((x - mean(x))**2)``.
    """

    frequencies: np.ndarray
    magnitudes: np.ndarray


@dataclass(frozen=True)
class ExecutionRange:
    task_id: int
    width: int
    deadline: int

    @property
    def ratio(self) -> float:
        return self.width / self.deadline


def occupancy_signal(trace: ScheduleTrace, task_id: int) -> np.ndarray:
    """1 where ``task_id`` holds the slot, row-major over all hyperperiods."""
    return (trace.flat == task_id).astype(np.float64)


def busy_signal(trace: ScheduleTrace) -> np.ndarray:
    """1 wherever any real task runs: what a power or EM probe observes."""
    return (trace.flat != 0).astype(np.float64)


def dft_spectrum(signal) -> Spectrum:
    x = np.asarray(signal, dtype=np.float64)
    n = len(x)
    if n < 2:
        raise ValueError("signal needs at least two samples")
    coeffs = np.fft.rfft(x - x.mean())[1:]
    mags = np.abs(coeffs) * np.sqrt(2.0 / n)
    if n % 2 == 0:
        mags[-1] /= np.sqrt(2.0)  # Nyquist bin has no mirror image
    freqs = np.arange(1, len(coeffs) + 1) / n
    return Spectrum(freqs, mags)


def detect_peaks(spectrum: Spectrum, count: int, rel_floor: float = 1e-9) -> list[float]:
    """Frequencies of the ``count`` strongest strict local maxima.

    End bins compare against their single neighbour. Magnitudes below
    ``rel_floor`` times the largest one are treated as numerical noise.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    mag = spectrum.magnitudes
    if len(mag) == 0 or mag.max() == 0:
        return []
    left = np.concatenate(([-np.inf], mag[:-1]))
    right = np.concatenate((mag[1:], [-np.inf]))
    is_peak = (mag > left) & (mag > right) & (mag > rel_floor * mag.max())
    idx = np.flatnonzero(is_peak)
    # strongest first; equal magnitudes resolve toward the lower frequency
    order = np.lexsort((spectrum.frequencies[idx], -mag[idx]))
    return [float(spectrum.frequencies[i]) for i in idx[order][:count]]


def execution_range(trace: ScheduleTrace, taskset: Taskset, task_id: int) -> ExecutionRange:
    """Widest envelope of slots a task occupies, measured from each job's release.

    The width is the latest offset at which any job was seen running minus
    the earliest such offset, over every job in the trace.
    """
    task = taskset[task_id - 1]
    flat = trace.flat
    total = len(flat) - len(flat) % task.period
    rows = (flat[:total] == task_id).reshape(-1, task.period)
    hit = rows.any(axis=1)
    if not hit.any():
        raise ValueError(f"task {task_id} never appears in the trace")
    first = int(rows[hit].argmax(axis=1).min())
    last = int((task.period - 1 - rows[hit][:, ::-1].argmax(axis=1)).max())
    return ExecutionRange(task_id, last - first, task.deadline)


def range_ratio_gmean(trace: ScheduleTrace, taskset: Taskset) -> float:
    """Geometric mean of width-to-deadline ratios across the tasks of one taskset."""
    ratios = [execution_range(trace, taskset, t.id).ratio for t in taskset]
    return float(stats.gmean(ratios))
