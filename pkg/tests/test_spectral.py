import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schedrand.scheduler import ExecPolicy, SchedulerConfig, simulate
from schedrand.spectral import (
    Spectrum, busy_signal, detect_peaks, dft_spectrum, execution_range, occupancy_signal,
    range_ratio_gmean,
)
from schedrand.taskmodel import Taskset
from schedrand.trace import ScheduleTrace

from oracles import brute_dft_magnitudes


def edf_trace(ts, k=1):
    return simulate(ts, config=SchedulerConfig("edf", exec_policy=ExecPolicy("wcet"), hyperperiods=k)).trace


def test_occupancy_signal(ex2):
    tr = edf_trace(ex2)
    assert occupancy_signal(tr, 3).nonzero()[0].tolist() == [0, 1, 5, 6, 10, 11, 15, 16]
    assert not occupancy_signal(tr, 9).any()
    full = ScheduleTrace(np.ones((2, 4), int))
    assert occupancy_signal(full, 1).tolist() == [1.0] * 8
    assert busy_signal(tr).sum() == 12


def test_constant_signal_is_flat():
    assert np.all(dft_spectrum(np.full(16, 3.0)).magnitudes == 0)
    assert detect_peaks(dft_spectrum(np.ones(16)), 3) == []


def test_alternating_signal_peaks_at_nyquist():
    sp = dft_spectrum(np.tile([0, 1], 32))
    assert sp.frequencies[-1] == 0.5
    assert detect_peaks(sp, 1) == [0.5]
    assert detect_peaks(sp, 5) == [0.5]


def test_single_tone():
    n = 200
    x = np.cos(2 * np.pi * 0.1 * np.arange(n))
    assert detect_peaks(dft_spectrum(x), 1) == [pytest.approx(0.1)]


def test_two_square_waves_match_brute_force():
    n = 100
    t = np.arange(n)
    x = (t % 5 < 2).astype(float) + (t % 10 < 5).astype(float)
    sp = dft_spectrum(x)
    brute = brute_dft_magnitudes(x)
    assert np.argsort(-sp.magnitudes)[:2].tolist() == np.argsort(-brute)[:2].tolist()
    assert sorted(detect_peaks(sp, 2)) == pytest.approx([0.1, 0.2])


def test_spectrum_frequency_range():
    sp = dft_spectrum(np.arange(9.0))
    assert sp.frequencies.min() > 0 and sp.frequencies.max() <= 0.5
    assert len(sp.frequencies) == len(sp.magnitudes) == 4
    with pytest.raises(ValueError):
        dft_spectrum([1.0])


def test_peak_ties_prefer_lower_frequency():
    sp = Spectrum(np.array([0.1, 0.2, 0.3, 0.4, 0.5]), np.array([0.0, 2.0, 0.0, 2.0, 0.0]))
    assert detect_peaks(sp, 1) == [0.2]
    with pytest.raises(ValueError):
        detect_peaks(sp, 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=64))
def test_parseval(xs):
    x = np.array(xs)
    mags = dft_spectrum(x).magnitudes
    energy = len(x) * x.var()
    assert (mags**2).sum() == pytest.approx(energy, rel=1e-9, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=2, max_size=40))
def test_magnitude_shape_matches_direct_dft(xs):
    x = np.array(xs)
    brute = brute_dft_magnitudes(x)
    n = len(x)
    scale = np.full(len(brute), np.sqrt(2 / n))
    if n % 2 == 0:
        scale[-1] = np.sqrt(1 / n)
    assert dft_spectrum(x).magnitudes == pytest.approx(brute * scale, abs=1e-7)


def test_execution_range_immediate_task():
    ts = Taskset.from_params([(3, 10)])
    r = execution_range(edf_trace(ts, 4), ts, 1)
    assert (r.width, r.ratio) == (2, pytest.approx(0.2))


def test_execution_range_ex2(ex2):
    tr = edf_trace(ex2)
    # task 3 runs at offsets 0-1 of each period; task 1 at offsets 2 and 2
    assert execution_range(tr, ex2, 3).width == 1
    assert execution_range(tr, ex2, 1).width == 0
    assert execution_range(tr, ex2, 2).width == 1
    with pytest.raises(ValueError):
        execution_range(ScheduleTrace(np.zeros((1, 20), int)), ex2, 1)


def test_range_ratio_bounds(ex1):
    for seed in range(5):
        tr = simulate(ex1, config=SchedulerConfig("utr", seed=seed, hyperperiods=5)).trace
        for t in ex1:
            assert 0 <= execution_range(tr, ex1, t.id).ratio <= 1
        assert 0 <= range_ratio_gmean(tr, ex1) <= 1
