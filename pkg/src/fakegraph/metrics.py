"""Video-level evaluation metrics: accuracy, pairwise AUC, and equal error rate.

AUC follows the pairwise-indicator definition (a tie between a positive and a
negative scores 0.5), implemented with midranks so it matches the double-loop
definition exactly.  EER scans every distinct score plus the midpoints between
adjacent scores and reports the operating point where the false acceptance and
false rejection rates are closest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata


class UndefinedMetricError(ValueError):
    """Raised when a metric needs both classes but only one is present."""


def _as_scores_labels(scores, labels):
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.ndim != 1 or y.shape != s.shape:
        raise ValueError(f"scores/labels must be matching 1-D, got {s.shape} vs {y.shape}")
    if s.size == 0:
        raise ValueError("no scores given")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 (real) or 1 (fake)")
    return s, y.astype(np.int64)


def video_level_aggregate(frame_scores) -> float:
    """Collapse per-frame fake-probabilities into one video score (their mean)."""
    s = np.asarray(frame_scores, dtype=np.float64)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("frame_scores must be a non-empty 1-D sequence")
    return float(s.mean())


def auc(scores, labels) -> float:
    """Probability that a random fake outscores a random real, ties at 0.5."""
    s, y = _as_scores_labels(scores, labels)
    n_pos = int(y.sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs at least one fake and one real sample")
    ranks = rankdata(s)  # midranks handle ties exactly like the 0.5 credit
    pos_rank_sum = float(ranks[y == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def acc(scores, labels, threshold: float = 0.5) -> float:
    """Fraction of correct calls with scores >= threshold predicted fake."""
    s, y = _as_scores_labels(scores, labels)
    predicted = (s >= threshold).astype(np.int64)
    return float((predicted == y).mean())


def eer(scores, labels) -> tuple[float, float]:
    """Equal error rate and the threshold achieving it.

    Thresholds are scanned in ascending order over all distinct scores,
    midpoints between adjacent distinct scores, and one point above the
    maximum; the reported rate is (FAR + FRR) / 2 at the threshold minimizing
    |FAR - FRR|.  Gaps are compared as the integer |fp*n_pos - fn*n_neg| so
    float rounding never decides a tie, and ties go to the lowest threshold.
    """
    s, y = _as_scores_labels(scores, labels)
    n_pos = int(y.sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("EER needs at least one fake and one real sample")

    distinct = np.unique(s)
    thresholds = np.unique(
        np.concatenate(
            [distinct, (distinct[:-1] + distinct[1:]) / 2.0, [distinct[-1] + 1.0]]
        )
    )
    pred = s[None, :] >= thresholds[:, None]  # (n_thresholds, n_samples)
    fp = np.sum(pred & (y == 0)[None, :], axis=1)
    fn = np.sum(~pred & (y == 1)[None, :], axis=1)
    gap = np.abs(fp * n_pos - fn * n_neg)  # |FAR-FRR| scaled by n_neg*n_pos
    best = int(np.argmin(gap))  # argmin keeps the lowest tied threshold
    far = fp[best] / n_neg
    frr = fn[best] / n_pos
    return float((far + frr) / 2.0), float(thresholds[best])


@dataclass
class EvalReport:
    """Per-video scores plus the three summary metrics for one evaluation."""

    per_video_scores: list[tuple[str, float, int]] = field(default_factory=list)
    acc: float = 0.0
    auc: float = 0.0
    eer: float = 0.0
    threshold_at_eer: float = 0.0

    @classmethod
    def from_scores(cls, video_ids, scores, labels) -> "EvalReport":
        s, y = _as_scores_labels(scores, labels)
        if len(video_ids) != s.size:
            raise ValueError("video_ids length must match scores")
        eer_value, eer_threshold = eer(s, y)
        return cls(
            per_video_scores=[
                (str(v), float(p), int(l)) for v, p, l in zip(video_ids, s, y)
            ],
            acc=acc(s, y),
            auc=auc(s, y),
            eer=eer_value,
            threshold_at_eer=eer_threshold,
        )

    def to_json(self) -> str:
        payload = {
            "acc": self.acc,
            "auc": self.auc,
            "eer": self.eer,
            "threshold_at_eer": self.threshold_at_eer,
            "per_video_scores": [
                {"video_id": v, "fake_probability": p, "label": l}
                for v, p, l in self.per_video_scores
            ],
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        payload = json.loads(text)
        return cls(
            per_video_scores=[
                (r["video_id"], r["fake_probability"], r["label"])
                for r in payload["per_video_scores"]
            ],
            acc=payload["acc"],
            auc=payload["auc"],
            eer=payload["eer"],
            threshold_at_eer=payload["threshold_at_eer"],
        )
