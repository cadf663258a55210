"""Random forest: bagged CART trees, sqrt(d) features per split, vote-fraction
probabilities."""

from __future__ import annotations

import math

import numpy as np

from .tree import ClassificationTree


class RandomForestEstimator:
    def __init__(self, n_trees=100, max_depth=None, min_samples_leaf=1):
        self.n_trees = int(n_trees)
        self.max_depth = max_depth
        self.min_samples_leaf = int(min_samples_leaf)
        self.trees: list[ClassificationTree] = []
        self.n_classes = 0

    def fit(self, X, y, n_classes, seed):
        X = np.asarray(X, dtype=float)
        n, d = X.shape
        self.n_classes = n_classes
        m = max(1, int(round(math.sqrt(d))))
        self.trees = []
        for child_seed in np.random.SeedSequence(seed).spawn(self.n_trees):
            rng = np.random.default_rng(child_seed)
            idx = rng.integers(0, n, size=n)
            tree = ClassificationTree(
                max_depth=self.max_depth,
                min_samples_leaf=self.min_samples_leaf,
                ccp_alpha=0.0,
                n_features_per_split=m,
                rng=rng,
            )
            tree.fit(X[idx], y[idx], n_classes)
            self.trees.append(tree)
        return self

    def predict_proba(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        votes = np.zeros((len(X), self.n_classes))
        for tree in self.trees:
            picked = tree.predict_proba(X).argmax(axis=1)
            votes[np.arange(len(X)), picked] += 1.0
        return votes / len(self.trees)

    def to_arrays(self):
        arrays = {}
        for i, tree in enumerate(self.trees):
            for key, arr in tree.to_arrays().items():
                arrays[f"tree{i}_{key}"] = arr
        return arrays

    def meta(self):
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "n_classes": self.n_classes,
        }

    @classmethod
    def from_arrays(cls, meta, arrays):
        est = cls(meta["n_trees"], meta["max_depth"], meta["min_samples_leaf"])
        est.n_classes = meta["n_classes"]
        for i in range(est.n_trees):
            sub = {k.split("_", 1)[1]: v for k, v in arrays.items() if k.startswith(f"tree{i}_")}
            est.trees.append(ClassificationTree.from_arrays(sub))
        return est
