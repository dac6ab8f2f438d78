"""Recording scores, the threshold decision rule, and ROC/AUC."""

from dataclasses import dataclass

import numpy as np

from .autoencoder import batch_losses
from .features import stack_frames

__all__ = [
    "NORMAL",
    "ABNORMAL",
    "ScoredRecording",
    "RocResult",
    "score_recording",
    "classify",
    "pick_threshold",
    "roc_curve",
    "trapezoid_auc",
    "mann_whitney_auc",
    "roc_auc",
]

NORMAL = "normal"
ABNORMAL = "abnormal"


@dataclass(frozen=True)
class ScoredRecording:
    recording_id: str
    label: str
    score: float

    def __post_init__(self):
        if self.label not in (NORMAL, ABNORMAL):
            raise ValueError(f"label must be {NORMAL!r} or {ABNORMAL!r}, got {self.label!r}")
        if not np.isfinite(self.score):
            raise ValueError(f"score for {self.recording_id} is not finite")


@dataclass(frozen=True)
class RocResult:
    """ROC operating points ``(fpr, tpr, threshold)``, thresholds descending."""

    points: list
    auc: float

    @property
    def fpr(self):
        return np.array([p[0] for p in self.points])

    @property
    def tpr(self):
        return np.array([p[1] for p in self.points])

    @property
    def thresholds(self):
        return np.array([p[2] for p in self.points])


def score_recording(params, slice_, mel_width=5):
    """Mean reconstruction error over the stacked frames of one recording."""
    frames = stack_frames(slice_, mel_width)
    return float(batch_losses(params, frames).mean())


def classify(score, phi):
    return ABNORMAL if score >= phi else NORMAL


def pick_threshold(train_scores, quantile=0.99):
    """Empirical quantile of the training scores.

    Uses linear interpolation between order statistics at position
    ``quantile * (n - 1)`` (0-based), so ``[1..100]`` at 0.99 gives 99.01.
    """
    s = np.sort(np.asarray(train_scores, dtype=np.float64))
    if s.size == 0:
        raise ValueError("no training scores")
    if not 0 < quantile <= 1:
        raise ValueError(f"quantile must be in (0, 1], got {quantile}")
    pos = quantile * (s.size - 1)
    lo = int(np.floor(pos))
    hi = min(lo + 1, s.size - 1)
    return float(s[lo] + (pos - lo) * (s[hi] - s[lo]))


def _split(scored):
    scored = list(scored)
    pos = np.array([r.score for r in scored if r.label == ABNORMAL], dtype=np.float64)
    neg = np.array([r.score for r in scored if r.label == NORMAL], dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise ValueError("ROC needs at least one normal and one abnormal recording")
    return pos, neg


def roc_curve(pos, neg):
    """Operating points obtained by lowering the threshold through each unique score.

    A recording is flagged abnormal when ``score >= threshold``. The first
    point, at threshold ``+inf``, is ``(0, 0)``.
    """
    pos = np.asarray(pos, dtype=np.float64)
    neg = np.asarray(neg, dtype=np.float64)
    thresholds = np.unique(np.concatenate([pos, neg]))[::-1]
    pos_sorted = np.sort(pos)
    neg_sorted = np.sort(neg)
    # count of scores >= threshold
    tp = pos.size - np.searchsorted(pos_sorted, thresholds, side="left")
    fp = neg.size - np.searchsorted(neg_sorted, thresholds, side="left")
    fpr = np.concatenate([[0.0], fp / neg.size])
    tpr = np.concatenate([[0.0], tp / pos.size])
    return fpr, tpr, np.concatenate([[np.inf], thresholds])


def trapezoid_auc(fpr, tpr):
    fpr = np.asarray(fpr, dtype=np.float64)
    tpr = np.asarray(tpr, dtype=np.float64)
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def mann_whitney_auc(pos, neg):
    """Fraction of (abnormal, normal) pairs ordered correctly, ties counting 1/2."""
    pos = np.asarray(pos, dtype=np.float64)[:, None]
    neg = np.asarray(neg, dtype=np.float64)[None, :]
    return float(((pos > neg).sum() + 0.5 * (pos == neg).sum()) / (pos.size * neg.size))


def roc_auc(scored):
    """ROC curve and AUC of abnormal-vs-normal scores.

    The AUC is the pairwise Mann-Whitney statistic; :func:`trapezoid_auc` over
    the returned points gives the same number.
    """
    pos, neg = _split(scored)
    fpr, tpr, thr = roc_curve(pos, neg)
    points = list(zip(fpr.tolist(), tpr.tolist(), thr.tolist()))
    return RocResult(points=points, auc=mann_whitney_auc(pos, neg))
