"""
Classification metrics: one-vs-rest precision, recall and f1, their unweighted
(macro) mean over a class set, and Student-t confidence intervals.
"""

import math
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from hellogram.core.config import DEFAULT_CONFIDENCE
from hellogram.core.errors import EmptyClassSet, LengthMismatch


def _check_lengths(truth: Sequence[str], pred: Sequence[str]) -> None:
    if len(truth) != len(pred):
        raise LengthMismatch(
            f"{len(truth)} true labels but {len(pred)} predictions",
            details={"truth": len(truth), "pred": len(pred)},
        )


def confusion_counts(truth: Sequence[str], pred: Sequence[str], cls: str) -> Tuple[int, int, int]:
    """True positives, false positives and false negatives for one class."""
    _check_lengths(truth, pred)
    tp = fp = fn = 0
    for t, p in zip(truth, pred):
        if p == cls:
            if t == cls:
                tp += 1
            else:
                fp += 1
        elif t == cls:
            fn += 1
    return tp, fp, fn


def precision_recall(truth: Sequence[str], pred: Sequence[str], cls: str) -> Tuple[float, float]:
    tp, fp, fn = confusion_counts(truth, pred, cls)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return precision, recall


def f1_per_class(truth: Sequence[str], pred: Sequence[str], cls: str) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0.

    Raises:
        LengthMismatch: truth and pred differ in length.
    """
    precision, recall = precision_recall(truth, pred, cls)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def per_class_f1(truth: Sequence[str], pred: Sequence[str], classes: Iterable[str]) -> Dict[str, float]:
    return {cls: f1_per_class(truth, pred, cls) for cls in sorted(set(classes))}


def unbiased_f1(truth: Sequence[str], pred: Sequence[str], classes: Iterable[str]) -> float:
    """Unweighted mean of per-class f1 over ``classes``.

    Predictions outside the class set (such as "Unknown") count as misses for
    the true class and add no class of their own.

    Raises:
        EmptyClassSet: ``classes`` is empty.
        LengthMismatch: truth and pred differ in length.
    """
    scores = per_class_f1(truth, pred, classes)
    if not scores:
        raise EmptyClassSet("cannot average f1 over an empty class set")
    return sum(scores.values()) / len(scores)


def mean_confidence_interval(
    values: Sequence[float], confidence: float = DEFAULT_CONFIDENCE
) -> Tuple[float, float]:
    """Sample mean and two-sided Student-t half-width.

    The half-width is 0 for fewer than two values or zero spread.
    """
    if not values:
        raise ValueError("no values to summarize")
    data = np.asarray(values, dtype=np.float64)
    mean = float(data.mean())
    if data.size < 2:
        return mean, 0.0
    sem = float(data.std(ddof=1)) / math.sqrt(data.size)
    if sem == 0.0:
        return mean, 0.0
    critical = float(stats.t.ppf((1.0 + confidence) / 2.0, df=data.size - 1))
    return mean, critical * sem


def keyword_mean(per_class: Dict[str, float], keyword: str) -> Optional[float]:
    """Mean f1 of classes whose label contains ``keyword``, case-insensitively."""
    needle = keyword.lower()
    matches = [score for cls, score in per_class.items() if needle in cls.lower()]
    if not matches:
        return None
    return sum(matches) / len(matches)
