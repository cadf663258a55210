"""Vectorized best-split search shared by all tree learners.

Candidate thresholds are midpoints between adjacent distinct sorted values,
so the chosen split depends only on the value multiset, never on row order.
Ties resolve to the lowest feature index, then the lowest threshold.
"""

from __future__ import annotations

import numpy as np

_EPS = 1e-12


def best_split_gini(X, Y, feature_ids, min_leaf):
    """Minimize weighted Gini. X (n,d), Y one-hot (n,K). Returns
    (feature, threshold) or None when no improving split exists."""
    n = X.shape[0]
    if n < 2 * min_leaf or n < 2:
        return None
    F = X[:, feature_ids]
    order = np.argsort(F, axis=0, kind="stable")
    Fs = np.take_along_axis(F, order, axis=0)
    cum = np.cumsum(Y[order], axis=0)  # (n, f, K)
    total = cum[-1]
    nl = np.arange(1, n, dtype=float)[:, None]
    nr = n - nl
    left = cum[:-1]
    right = total[None, :, :] - left
    gini_l = 1.0 - ((left / nl[..., None]) ** 2).sum(-1)
    gini_r = 1.0 - ((right / nr[..., None]) ** 2).sum(-1)
    score = (nl * gini_l + nr * gini_r) / n
    valid = (Fs[:-1] < Fs[1:]) & (nl >= min_leaf) & (nr >= min_leaf)
    score = np.where(valid, score, np.inf)
    flat = score.T.ravel()  # feature-major, so argmin tie-breaks as documented
    k = int(np.argmin(flat))
    if not np.isfinite(flat[k]):
        return None
    counts = total[0] if total.ndim == 2 else total
    parent = 1.0 - ((counts / n) ** 2).sum()
    if flat[k] >= parent - _EPS:
        return None
    f_idx, pos = divmod(k, n - 1)
    threshold = (Fs[pos, f_idx] + Fs[pos + 1, f_idx]) / 2.0
    return int(feature_ids[f_idx]), float(threshold)


def best_split_mse(X, r, feature_ids, min_leaf):
    """Maximize variance reduction for a continuous target r (n,)."""
    n = X.shape[0]
    if n < 2 * min_leaf or n < 2:
        return None
    F = X[:, feature_ids]
    order = np.argsort(F, axis=0, kind="stable")
    Fs = np.take_along_axis(F, order, axis=0)
    cum = np.cumsum(r[order], axis=0)  # (n, f)
    total = cum[-1]
    nl = np.arange(1, n, dtype=float)[:, None]
    nr = n - nl
    sl = cum[:-1]
    sr = total[None, :] - sl
    score = sl**2 / nl + sr**2 / nr
    valid = (Fs[:-1] < Fs[1:]) & (nl >= min_leaf) & (nr >= min_leaf)
    score = np.where(valid, score, -np.inf)
    flat = score.T.ravel()
    k = int(np.argmax(flat))
    if not np.isfinite(flat[k]):
        return None
    base = float(total[0] if total.ndim else total) ** 2 / n
    if flat[k] <= base + _EPS:
        return None
    f_idx, pos = divmod(k, n - 1)
    threshold = (Fs[pos, f_idx] + Fs[pos + 1, f_idx]) / 2.0
    return int(feature_ids[f_idx]), float(threshold)
