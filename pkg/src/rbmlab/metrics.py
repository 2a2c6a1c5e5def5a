"""Binary confusion counts and the scores derived from them.

Scores never silently return 0 on an empty denominator; they raise
UndefinedMetricError naming the sum that vanished, so report builders
can render the hole explicitly.
"""

from __future__ import annotations

import dataclasses

from .data import ClassLabel
from .errors import DimensionError, UndefinedMetricError


@dataclasses.dataclass(frozen=True)
class ConfusionMatrix:
    """tp/tn/fp/fn counts relative to a designated positive class."""

    tp: int
    tn: int
    fp: int
    fn: int
    positive_class: ClassLabel

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.positive_class is ClassLabel.INDETERMINATE:
            raise ValueError("positive_class must be BENIGN or ATTACK")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(predictions, truth, positive: ClassLabel) -> ConfusionMatrix:
    """Count tp/tn/fp/fn of predictions against ground truth.

    Truth must not contain indeterminate labels. An indeterminate
    prediction is scored as an error against the true class: a false
    negative when the truth is positive, a false positive otherwise, so
    total counts always sum to the number of records.
    """
    preds = list(predictions)
    truths = list(truth)
    if len(preds) != len(truths):
        raise DimensionError(f"{len(preds)} predictions vs {len(truths)} truths")
    if len(preds) == 0:
        raise ValueError("no predictions to score")
    if positive is ClassLabel.INDETERMINATE:
        raise ValueError("positive class must be BENIGN or ATTACK")
    tp = tn = fp = fn = 0
    for p, t in zip(preds, truths):
        if t is ClassLabel.INDETERMINATE:
            raise ValueError("ground truth contains an indeterminate label")
        if p is ClassLabel.INDETERMINATE:
            if t is positive:
                fn += 1
            else:
                fp += 1
        elif p is t:
            if t is positive:
                tp += 1
            else:
                tn += 1
        else:
            if t is positive:
                fn += 1
            else:
                fp += 1
    return ConfusionMatrix(tp, tn, fp, fn, positive)


def _ratio(num: int, den: int, what: str) -> float:
    if den == 0:
        raise UndefinedMetricError(f"{what} is undefined: denominator is zero", what)
    return num / den


def accuracy(cm: ConfusionMatrix) -> float:
    """Percent of records classified correctly."""
    return 100.0 * _ratio(cm.tp + cm.tn, cm.total, "tp+tn+fp+fn")


def class_accuracy(cm: ConfusionMatrix) -> float:
    """Percent tp / (tp + fp).

    Note this is the precision ratio scaled to percent; it is kept as a
    separate name because reports quote it as a per-class accuracy.
    """
    return 100.0 * _ratio(cm.tp, cm.tp + cm.fp, "tp+fp")


def precision(cm: ConfusionMatrix) -> float:
    return _ratio(cm.tp, cm.tp + cm.fp, "tp+fp")


def recall(cm: ConfusionMatrix) -> float:
    return _ratio(cm.tp, cm.tp + cm.fn, "tp+fn")


def f1_from_scores(precision_value: float, recall_value: float) -> float:
    """Harmonic mean of already-computed precision and recall."""
    if precision_value < 0 or recall_value < 0:
        raise ValueError("precision and recall must be >= 0")
    if precision_value + recall_value == 0:
        raise UndefinedMetricError("f1 is undefined: precision + recall is zero",
                                   "precision+recall")
    return 2.0 * precision_value * recall_value / (precision_value + recall_value)


def f1(cm: ConfusionMatrix) -> float:
    return f1_from_scores(precision(cm), recall(cm))
