import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from himu.select import (
    PassParams,
    SelectionPhase,
    find_peaks,
    pass_select,
    topk_select,
    uniform_select,
)
from oracles import pass_reference, topk_reference

RNG = np.random.default_rng(31)


def test_params_derived_from_budget():
    p = PassParams(budget=16)
    assert (p.max_peaks, p.neighbors_per_peak, p.window, p.min_distance) == (4, 2, 4, 4)
    p = PassParams(budget=32)
    assert (p.max_peaks, p.neighbors_per_peak, p.window, p.min_distance) == (5, 2, 5, 5)
    p = PassParams(budget=1)
    assert (p.max_peaks, p.neighbors_per_peak, p.window, p.min_distance) == (1, 0, 1, 1)


def test_params_overrides_and_validation():
    p = PassParams(budget=16, max_peaks=7, window=2)
    assert (p.max_peaks, p.neighbors_per_peak, p.window, p.min_distance) == (7, 2, 2, 4)
    with pytest.raises(ValueError):
        PassParams(budget=0)
    with pytest.raises(ValueError):
        PassParams(budget=8, min_distance=0)
    with pytest.raises(ValueError):
        PassParams(budget=8, neighbors_per_peak=-1)


def test_find_peaks_two_bumps():
    curve = np.zeros(50)
    curve[8:13] = [0.3, 0.6, 0.9, 0.6, 0.3]
    curve[38:43] = [0.2, 0.5, 0.8, 0.5, 0.2]
    assert find_peaks(curve, max_peaks=4, min_distance=4) == [10, 40]


def test_find_peaks_monotone_has_none():
    assert find_peaks(np.linspace(0.0, 1.0, 20), 4, 4) == []
    assert find_peaks(np.linspace(1.0, 0.0, 20), 4, 4) == []
    assert find_peaks(np.full(20, 0.4), 4, 4) == []


def test_find_peaks_min_distance_keeps_higher():
    curve = np.zeros(20)
    curve[5] = 0.9
    curve[8] = 0.8  # 3 apart, suppressed when min_distance=4
    assert find_peaks(curve, 4, 4) == [5]
    assert find_peaks(curve, 4, 3) == [5, 8]


def test_find_peaks_excludes_endpoints_and_plateaus():
    curve = np.zeros(12)
    curve[0] = 1.0
    curve[11] = 1.0
    curve[5] = 0.5
    curve[6] = 0.5  # plateau, not a strict maximum
    assert find_peaks(curve, 8, 1) == []
    bump = np.zeros(12)
    bump[4:7] = [0.2, 0.7, 0.2]
    assert find_peaks(bump, 8, 1) == [5]


def test_find_peaks_orders_by_height():
    curve = np.zeros(30)
    curve[5] = 0.4
    curve[15] = 0.9
    curve[25] = 0.6
    assert find_peaks(curve, 2, 2) == [15, 25]


def test_pass_flat_curve_falls_back_to_fill():
    res = pass_select(np.full(40, 0.3), PassParams(budget=8))
    assert res.frames == tuple(range(8))
    assert res.peaks == ()
    assert all(p is SelectionPhase.FILL for p in res.phase.values())


def test_pass_budget_exceeds_timeline():
    res = pass_select(np.array([0.1, 0.9, 0.2]), PassParams(budget=16))
    assert res.frames == (0, 1, 2)


def test_pass_phase_labels_on_simple_bump():
    curve = np.zeros(30)
    curve[9:14] = [0.3, 0.6, 0.9, 0.6, 0.3]
    res = pass_select(curve, PassParams(budget=6, max_peaks=2, neighbors_per_peak=2,
                                        window=4, min_distance=4))
    assert res.peaks == (11,)
    assert res.phase[11] is SelectionPhase.PEAK
    assert res.phase[10] is SelectionPhase.NEIGHBOR
    assert res.phase[12] is SelectionPhase.NEIGHBOR
    fills = [f for f, p in res.phase.items() if p is SelectionPhase.FILL]
    assert len(fills) == 3
    assert len(res.frames) == 6
    assert res.strategy == "pass"


def test_pass_matches_reference_oracle():
    for _ in range(300):
        T = int(RNG.integers(1, 120))
        curve = RNG.random(T)
        budget = int(RNG.choice([1, 2, 4, 8, 16, 32]))
        params = PassParams(budget=budget)
        res = pass_select(curve, params)
        frames, phase, peaks = pass_reference(
            curve, budget, params.max_peaks, params.neighbors_per_peak,
            params.window, params.min_distance,
        )
        assert list(res.frames) == frames
        assert [p.value for _, p in sorted(res.phase.items())] == [
            phase[f] for f in frames
        ]
        assert list(res.peaks) == peaks


def test_pass_selection_invariants_random():
    for _ in range(100):
        T = int(RNG.integers(1, 200))
        curve = RNG.random(T)
        budget = int(RNG.choice([4, 8, 16]))
        res = pass_select(curve, PassParams(budget=budget))
        assert len(res.frames) == min(budget, T)
        assert len(set(res.frames)) == len(res.frames)
        assert list(res.frames) == sorted(res.frames)
        assert set(res.phase) == set(res.frames)
        assert all(0 <= f < T for f in res.frames)
        np.testing.assert_array_equal(res.scores, curve[list(res.frames)])


def test_pass_attribution_restricted_to_selection():
    curve = RNG.random(50)
    attribution = RNG.random((3, 50))
    res = pass_select(curve, PassParams(budget=8), attribution=attribution)
    np.testing.assert_array_equal(res.attribution, attribution[:, list(res.frames)])


def test_topk_tie_break_prefers_earlier_frame():
    res = topk_select(np.array([0.1, 0.9, 0.5, 0.9]), budget=2)
    assert res.frames == (1, 3)
    assert all(p is SelectionPhase.FILL for p in res.phase.values())
    assert res.strategy == "topk"


def test_topk_matches_reference():
    for _ in range(200):
        T = int(RNG.integers(1, 150))
        curve = np.round(RNG.random(T), 2)  # coarse grid forces ties
        budget = int(RNG.integers(1, 20))
        res = topk_select(curve, budget)
        assert list(res.frames) == topk_reference(curve, budget)


def test_uniform_spacing():
    res = uniform_select(10, 2)
    assert res.frames == (0, 9)
    res = uniform_select(600, 16)
    assert res.frames[0] == 0 and res.frames[-1] == 599
    assert len(res.frames) == 16
    gaps = np.diff(res.frames)
    assert gaps.max() - gaps.min() <= 1
    assert res.strategy == "uniform"


def test_uniform_single_frame_budget():
    assert uniform_select(100, 1).frames == (0,)


def test_uniform_handles_collisions():
    res = uniform_select(5, 5)
    assert res.frames == (0, 1, 2, 3, 4)
    res = uniform_select(3, 16)
    assert res.frames == (0, 1, 2)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=120),
    st.integers(min_value=1, max_value=40),
)
def test_pass_property_budget_and_order(values, budget):
    curve = np.array(values)
    res = pass_select(curve, PassParams(budget=budget))
    assert len(res.frames) == min(budget, len(curve))
    assert list(res.frames) == sorted(set(res.frames))
    assert set(res.phase) == set(res.frames)
    for peak in res.peaks:
        assert res.phase[peak] is SelectionPhase.PEAK
