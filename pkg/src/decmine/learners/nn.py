"""Single-hidden-layer network: ReLU, softmax output, cross-entropy loss,
mini-batch gradient descent with a constant step, early stopping on a 10%
validation split."""

from __future__ import annotations

import numpy as np

_EPS = 1e-12


def init_params(d, hidden, k, rng):
    return {
        "W1": rng.normal(0.0, np.sqrt(2.0 / max(d, 1)), size=(d, hidden)),
        "b1": np.zeros(hidden),
        "W2": rng.normal(0.0, np.sqrt(2.0 / hidden), size=(hidden, k)),
        "b2": np.zeros(k),
    }


def forward(params, X):
    Z1 = X @ params["W1"] + params["b1"]
    A1 = np.maximum(Z1, 0.0)
    Z2 = A1 @ params["W2"] + params["b2"]
    Z2 = Z2 - Z2.max(axis=1, keepdims=True)
    expZ = np.exp(Z2)
    P = expZ / expZ.sum(axis=1, keepdims=True)
    return Z1, A1, P


def loss_and_grad(params, X, Y):
    """Mean cross-entropy and its analytic gradients (used directly by the
    finite-difference gradient check)."""
    n = len(X)
    Z1, A1, P = forward(params, X)
    loss = float(-(Y * np.log(P + _EPS)).sum() / n)
    dZ2 = (P - Y) / n
    grads = {
        "W2": A1.T @ dZ2,
        "b2": dZ2.sum(axis=0),
    }
    dA1 = dZ2 @ params["W2"].T
    dZ1 = dA1 * (Z1 > 0.0)
    grads["W1"] = X.T @ dZ1
    grads["b1"] = dZ1.sum(axis=0)
    return loss, grads


class NeuralNetEstimator:
    def __init__(self, hidden=32, learning_rate=0.05, batch_size=32,
                 max_epochs=200, patience=15, val_fraction=0.1):
        self.hidden = int(hidden)
        self.learning_rate = float(learning_rate)
        self.batch_size = int(batch_size)
        self.max_epochs = int(max_epochs)
        self.patience = int(patience)
        self.val_fraction = float(val_fraction)
        self.params = None
        self.n_classes = 0

    def fit(self, X, y, n_classes, seed):
        X = np.asarray(X, dtype=float)
        n, d = X.shape
        self.n_classes = n_classes
        Y = np.zeros((n, n_classes))
        Y[np.arange(n), y] = 1.0
        rng = np.random.default_rng(seed)
        perm = rng.permutation(n)
        n_val = int(round(self.val_fraction * n))
        val, train = perm[:n_val], perm[n_val:]
        if len(train) == 0:
            train, val = perm, perm[:0]
        Xt, Yt = X[train], Y[train]
        params = init_params(d, self.hidden, n_classes, rng)
        best = {k: v.copy() for k, v in params.items()}
        best_loss = np.inf
        stale = 0
        for _ in range(self.max_epochs):
            order = rng.permutation(len(Xt))
            for start in range(0, len(Xt), self.batch_size):
                batch = order[start:start + self.batch_size]
                _, grads = loss_and_grad(params, Xt[batch], Yt[batch])
                for key in params:
                    params[key] -= self.learning_rate * grads[key]
            if len(val):
                val_loss, _ = loss_and_grad(params, X[val], Y[val])
                if val_loss < best_loss - 1e-9:
                    best_loss = val_loss
                    best = {k: v.copy() for k, v in params.items()}
                    stale = 0
                else:
                    stale += 1
                    if stale >= self.patience:
                        break
        self.params = best if len(val) else params
        return self

    def predict_proba(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        _, _, P = forward(self.params, X)
        return P

    def to_arrays(self):
        return dict(self.params)

    def meta(self):
        return {
            "hidden": self.hidden,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "max_epochs": self.max_epochs,
            "patience": self.patience,
            "val_fraction": self.val_fraction,
            "n_classes": self.n_classes,
        }

    @classmethod
    def from_arrays(cls, meta, arrays):
        est = cls(meta["hidden"], meta["learning_rate"], meta["batch_size"],
                  meta["max_epochs"], meta["patience"], meta["val_fraction"])
        est.n_classes = meta["n_classes"]
        est.params = {k: arrays[k] for k in ("W1", "b1", "W2", "b2")}
        return est
