import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import BURST_CYCLE_W
from spikesim import DataError, PatternClass, SolverConfig, classify_pattern, reset_histogram, reset_sequence, simulate
from spikesim.spiketrain import default_tol, default_transient_skip, occupied_clusters


def test_reset_sequence_slicing():
    seq = reset_sequence([1.0, 2.0, 3.0, 4.0, 5.0], 2)
    assert list(seq.values) == [3.0, 4.0, 5.0]
    assert seq.transient_skip == 2 and len(seq) == 3


def test_reset_sequence_empty_after_skip():
    with pytest.raises(DataError):
        reset_sequence([], 0)
    with pytest.raises(DataError):
        reset_sequence([1.0, 2.0], 2)
    with pytest.raises(DataError):
        reset_sequence([1.0, float("nan")], 0)


def test_default_skip():
    assert default_transient_skip(20) == 10
    assert default_transient_skip(100) == 20
    assert default_transient_skip(101) == 21
    assert len(reset_sequence(np.arange(100.0))) == 80


def test_classify_examples():
    assert classify_pattern(np.full(30, 4.2)) == PatternClass("tonic", 1, 0.0, default_tol(np.full(30, 4.2)))
    alt = classify_pattern(np.tile([1.0, 2.0], 15))
    assert (alt.label, alt.period, alt.residual) == ("burst(2)", 2, 0.0)
    three = classify_pattern(np.tile([0.0, 5.0, 1.0], 10))
    assert three.label == "burst(3)"


def test_classify_irregular_reports_best_residual():
    rng = np.random.default_rng(3)
    p = classify_pattern(rng.uniform(0, 1, 60), tol=1e-3)
    assert p.label == "irregular" and p.period is None
    assert 1e-3 < p.residual <= 1.0


def test_short_sequences_search_fewer_periods():
    # only 5 values: a period-2 cycle repeats fewer than three times
    p = classify_pattern([1.0, 2.0, 1.0, 2.0, 1.0], tol=0.0)
    assert p.label == "irregular"
    assert classify_pattern([1.0, 2.0, 1.0, 2.0, 1.0, 2.0], tol=0.0).label == "burst(2)"


def test_pattern_label_invariant():
    with pytest.raises(ValueError):
        PatternClass("tonic", 2)
    with pytest.raises(ValueError):
        PatternClass("burst(3)", 2)
    with pytest.raises(ValueError):
        PatternClass("irregular", 1)


def test_histogram_of_constant_sequence():
    for bins in (1, 5, 20):
        hist = reset_histogram(np.full(12, -3.0), bins)
        assert sum(1 for _, n in hist if n) == 1


def test_histogram_bimodal():
    hist = reset_histogram(np.tile([1.0, 2.0], 20), 20)
    assert occupied_clusters(hist) == 2
    assert [n for _, n in hist if n] == [20, 20]


def test_burst_run_has_two_reset_clusters(burst_model, burst_current, burst_init):
    _, train = simulate(burst_model, burst_current, burst_init, SolverConfig(scheme="euler", dt=0.01))
    seq = reset_sequence(train)
    assert occupied_clusters(reset_histogram(seq, 20)) == 2
    # the two branches sit near the exact cycle
    lows = seq.values[seq.values < np.mean(seq.values)]
    highs = seq.values[seq.values >= np.mean(seq.values)]
    assert np.mean(highs) == pytest.approx(BURST_CYCLE_W[0], abs=0.05)
    assert np.mean(lows) == pytest.approx(BURST_CYCLE_W[1], abs=0.05)


@given(
    st.lists(st.floats(-100, 100), min_size=12, max_size=60),
    st.floats(1e-3, 10.0),
    st.floats(0.01, 100.0),
    st.floats(-50, 50),
)
def test_labels_survive_affine_rescaling(values, tol, scale, shift):
    values = np.asarray(values)
    devs = [np.max(np.abs(values[k:] - values[:-k])) for k in range(1, min(8, len(values) // 3) + 1)]
    # stay clear of the decision boundary, where rounding could flip a comparison
    assume(all(abs(d - tol) > 1e-6 * max(tol, d) for d in devs))
    p = classify_pattern(values, tol)
    q = classify_pattern(scale * values + shift, scale * tol)
    assert (p.label, p.period) == (q.label, q.period)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=40), st.integers(1, 40))
def test_histogram_conserves_count(values, bins):
    hist = reset_histogram(values, bins)
    assert sum(n for _, n in hist) == len(values)
    assert len(hist) == bins


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_detected_period_divides_repeat_lengths(p, seed):
    rng = np.random.default_rng(seed)
    cycle = rng.permutation(p) * 1.0  # distinct values
    values = np.tile(cycle, 8)
    result = classify_pattern(values, tol=0.0, max_period=8)
    assert result.period == p
    for lag in range(1, 9):
        if np.all(values[lag:] == values[:-lag]):
            assert lag % result.period == 0
