"""One-vs-rest linear SVM trained by full-batch subgradient descent on the
hinge loss, with per-class Platt sigmoid calibration on a held-out fifth of
the training rows."""

from __future__ import annotations

import numpy as np

_EPS = 1e-12


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def _fit_platt(margins, targets, iters=100):
    """Fit sigma(a*m + b) to binary targets with Platt's smoothed labels by
    Newton iteration; returns (a, b)."""
    n_pos = float(targets.sum())
    n_neg = float(len(targets) - n_pos)
    if n_pos == 0.0 or n_neg == 0.0:
        prior = (n_pos + 1.0) / (len(targets) + 2.0)
        return 0.0, float(np.log(prior / (1.0 - prior)))
    t = np.where(targets > 0, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))
    a, b = 1.0, 0.0
    for _ in range(iters):
        p = _sigmoid(a * margins + b)
        grad_a = ((p - t) * margins).sum()
        grad_b = (p - t).sum()
        w = np.maximum(p * (1.0 - p), _EPS)
        h_aa = (w * margins * margins).sum() + _EPS
        h_ab = (w * margins).sum()
        h_bb = w.sum() + _EPS
        det = h_aa * h_bb - h_ab * h_ab
        if abs(det) < _EPS:
            break
        da = (h_bb * grad_a - h_ab * grad_b) / det
        db = (h_aa * grad_b - h_ab * grad_a) / det
        a, b = a - da, b - db
        if abs(da) < 1e-10 and abs(db) < 1e-10:
            break
    return float(a), float(b)


class LinearSvmEstimator:
    def __init__(self, regularization=0.1, iters=300, lr0=0.5, calibration_fraction=0.2):
        self.regularization = float(regularization)
        self.iters = int(iters)
        self.lr0 = float(lr0)
        self.calibration_fraction = float(calibration_fraction)
        self.W = None  # (K, d)
        self.b = None  # (K,)
        self.calib = None  # (K, 2) rows (a, b)
        self.n_classes = 0

    def _train_binary(self, X, sign):
        n, d = X.shape
        w = np.zeros(d)
        b = 0.0
        lam = self.regularization
        for t in range(self.iters):
            margins = sign * (X @ w + b)
            viol = margins < 1.0
            grad_w = lam * w - (sign[viol] @ X[viol]) / n
            grad_b = -sign[viol].sum() / n
            lr = self.lr0 / (1.0 + 0.1 * t)
            w -= lr * grad_w
            b -= lr * grad_b
        return w, b

    def fit(self, X, y, n_classes, seed):
        X = np.asarray(X, dtype=float)
        n = len(X)
        self.n_classes = n_classes
        rng = np.random.default_rng(seed)
        perm = rng.permutation(n)
        n_hold = max(1, int(round(self.calibration_fraction * n)))
        hold, train = perm[:n_hold], perm[n_hold:]
        if len(train) == 0:
            train = perm
        self.W = np.zeros((n_classes, X.shape[1]))
        self.b = np.zeros(n_classes)
        self.calib = np.zeros((n_classes, 2))
        for k in range(n_classes):
            sign = np.where(y[train] == k, 1.0, -1.0)
            w, b0 = self._train_binary(X[train], sign)
            self.W[k] = w
            self.b[k] = b0
            hold_targets = (y[hold] == k).astype(float)
            if hold_targets.min() == hold_targets.max():  # held-out split lacks a class
                hold_m = X[train] @ w + b0
                hold_targets = (y[train] == k).astype(float)
            else:
                hold_m = X[hold] @ w + b0
            self.calib[k] = _fit_platt(hold_m, hold_targets)
        return self

    def predict_proba(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        margins = X @ self.W.T + self.b
        probs = _sigmoid(self.calib[:, 0] * margins + self.calib[:, 1])
        probs = np.maximum(probs, _EPS)
        return probs / probs.sum(axis=1, keepdims=True)

    def to_arrays(self):
        return {"W": self.W, "b": self.b, "calib": self.calib}

    def meta(self):
        return {
            "regularization": self.regularization,
            "iters": self.iters,
            "lr0": self.lr0,
            "calibration_fraction": self.calibration_fraction,
            "n_classes": self.n_classes,
        }

    @classmethod
    def from_arrays(cls, meta, arrays):
        est = cls(meta["regularization"], meta["iters"], meta["lr0"], meta["calibration_fraction"])
        est.n_classes = meta["n_classes"]
        est.W, est.b, est.calib = arrays["W"], arrays["b"], arrays["calib"]
        return est
