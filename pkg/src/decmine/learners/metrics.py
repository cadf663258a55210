"""Classification metrics: confusion matrix and support-weighted F1."""

from __future__ import annotations

import numpy as np


def confusion_matrix(y_true, y_pred, n_classes):
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        cm[int(t), int(p)] += 1
    return cm


def weighted_f1(y_true, y_pred, n_classes):
    """Support-weighted mean of per-class F1; classes with undefined precision
    or recall contribute 0 (standard convention)."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    cm = confusion_matrix(y_true, y_pred, n_classes)
    support = cm.sum(axis=1)
    total = support.sum()
    if total == 0:
        return 0.0
    score = 0.0
    for k in range(n_classes):
        tp = cm[k, k]
        fp = cm[:, k].sum() - tp
        fn = support[k] - tp
        if tp == 0:
            f1 = 0.0
        else:
            precision = tp / (tp + fp)
            recall = tp / (tp + fn)
            f1 = 2 * precision * recall / (precision + recall)
        score += support[k] * f1
    return float(score / total)
