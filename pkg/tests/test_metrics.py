import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpdenoise.autoencoder import batch_losses, init_params
from cpdenoise.features import stack_frames
from cpdenoise.metrics import (
    ABNORMAL,
    NORMAL,
    ScoredRecording,
    classify,
    mann_whitney_auc,
    pick_threshold,
    roc_auc,
    roc_curve,
    score_recording,
    trapezoid_auc,
)


def scored(pos, neg):
    return [ScoredRecording(f"a{i}", ABNORMAL, s) for i, s in enumerate(pos)] + [
        ScoredRecording(f"n{i}", NORMAL, s) for i, s in enumerate(neg)
    ]


@pytest.mark.parametrize(
    "pos, neg, expected",
    [
        ([3.0, 4.0], [1.0, 2.0], 1.0),
        ([2.0, 4.0], [1.0, 3.0], 0.75),
        ([1.0, 1.0], [1.0, 1.0], 0.5),
        ([1.0, 2.0], [3.0, 4.0], 0.0),
    ],
)
def test_auc_examples(pos, neg, expected):
    res = roc_auc(scored(pos, neg))
    assert res.auc == expected
    assert trapezoid_auc(res.fpr, res.tpr) == pytest.approx(expected, abs=1e-12)


def test_roc_curve_endpoints_and_monotone():
    fpr, tpr, thr = roc_curve([0.3, 0.9, 0.5], [0.1, 0.5, 0.2, 0.4])
    assert (fpr[0], tpr[0], thr[0]) == (0.0, 0.0, np.inf)
    assert (fpr[-1], tpr[-1]) == (1.0, 1.0)
    assert np.all(np.diff(fpr) >= 0) and np.all(np.diff(tpr) >= 0)
    assert np.all(np.diff(thr) < 0)


def test_pick_threshold_interpolates():
    assert pick_threshold(np.arange(1, 101), 0.99) == pytest.approx(99.01, abs=1e-12)
    assert pick_threshold([5.0], 0.99) == 5.0
    assert pick_threshold([3.0, 1.0, 2.0], 1.0) == 3.0
    with pytest.raises(ValueError):
        pick_threshold([], 0.99)
    with pytest.raises(ValueError):
        pick_threshold([1.0], 0.0)


def test_classify_boundary_is_abnormal():
    assert classify(1.0, 1.0) == ABNORMAL
    assert classify(np.nextafter(1.0, 0.0), 1.0) == NORMAL


def test_score_recording_is_mean_frame_loss():
    p = init_params(12, seed=0)
    slice_ = np.random.default_rng(1).random((4, 9))
    expected = batch_losses(p, stack_frames(slice_, 3)).mean()
    assert score_recording(p, slice_, 3) == pytest.approx(expected, rel=1e-14)


def test_scored_recording_validation():
    with pytest.raises(ValueError):
        ScoredRecording("x", "weird", 1.0)
    with pytest.raises(ValueError):
        ScoredRecording("x", NORMAL, float("nan"))


def test_roc_needs_both_classes():
    with pytest.raises(ValueError):
        roc_auc(scored([1.0], []))


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.integers(0, 6), min_size=1, max_size=15),
    st.lists(st.integers(0, 6), min_size=1, max_size=15),
)
def test_trapezoid_equals_mann_whitney_with_ties(pos, neg):
    fpr, tpr, _ = roc_curve(pos, neg)
    assert abs(trapezoid_auc(fpr, tpr) - mann_whitney_auc(pos, neg)) <= 1e-12


def test_auc_invariant_under_monotone_transform():
    rng = np.random.default_rng(0)
    pos, neg = rng.random(30) + 0.2, rng.random(40)
    base = roc_auc(scored(pos, neg)).auc
    for f in (np.exp, lambda v: 3.0 * v - 7.0, lambda v: v**3):
        assert roc_auc(scored(f(pos), f(neg))).auc == base
