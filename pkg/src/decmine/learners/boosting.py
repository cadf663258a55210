"""Gradient-boosted trees on the multinomial log-loss: per round one shallow
regression tree per class fit to softmax residuals, Newton-style leaf values,
shrinkage, softmax output."""

from __future__ import annotations

import numpy as np

from .tree import RegressionTree

_EPS = 1e-12


def softmax(F):
    z = F - F.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class GradientBoostingEstimator:
    def __init__(self, rounds=100, learning_rate=0.1, max_depth=3, min_samples_leaf=1):
        self.rounds = int(rounds)
        self.learning_rate = float(learning_rate)
        self.max_depth = int(max_depth)
        self.min_samples_leaf = int(min_samples_leaf)
        self.trees: list[list[RegressionTree]] = []  # [round][class]
        self.n_classes = 0

    def fit(self, X, y, n_classes, seed):
        X = np.asarray(X, dtype=float)
        n = len(X)
        self.n_classes = n_classes
        Y = np.zeros((n, n_classes))
        Y[np.arange(n), y] = 1.0
        F = np.zeros((n, n_classes))
        k_factor = (n_classes - 1) / n_classes
        self.trees = []
        for _ in range(self.rounds):
            P = softmax(F)
            stage = []
            for k in range(n_classes):
                residual = Y[:, k] - P[:, k]
                tree = RegressionTree(self.max_depth, self.min_samples_leaf)
                tree.fit(X, residual)

                def gamma(idx, residual=residual):
                    num = residual[idx].sum()
                    den = (np.abs(residual[idx]) * (1.0 - np.abs(residual[idx]))).sum()
                    return k_factor * num / max(den, _EPS)

                tree.assign_leaf_values(gamma)
                F[:, k] += self.learning_rate * tree.predict(X)
                stage.append(tree)
            self.trees.append(stage)
        return self

    def decision_scores(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        F = np.zeros((len(X), self.n_classes))
        for stage in self.trees:
            for k, tree in enumerate(stage):
                F[:, k] += self.learning_rate * tree.predict(X)
        return F

    def predict_proba(self, X):
        return softmax(self.decision_scores(X))

    def to_arrays(self):
        arrays = {}
        for r, stage in enumerate(self.trees):
            for k, tree in enumerate(stage):
                for key, arr in tree.to_arrays().items():
                    arrays[f"s{r}c{k}_{key}"] = arr
        return arrays

    def meta(self):
        return {
            "rounds": self.rounds,
            "learning_rate": self.learning_rate,
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "n_classes": self.n_classes,
        }

    @classmethod
    def from_arrays(cls, meta, arrays):
        est = cls(meta["rounds"], meta["learning_rate"], meta["max_depth"], meta["min_samples_leaf"])
        est.n_classes = meta["n_classes"]
        for r in range(est.rounds):
            stage = []
            for k in range(est.n_classes):
                prefix = f"s{r}c{k}_"
                sub = {key[len(prefix):]: v for key, v in arrays.items() if key.startswith(prefix)}
                stage.append(RegressionTree.from_arrays(sub))
            est.trees.append(stage)
        return est
