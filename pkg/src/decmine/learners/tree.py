"""CART-style classification tree (Gini) with minimal cost-complexity pruning,
plus the regression tree used inside gradient boosting."""

from __future__ import annotations

import math

import numpy as np

from .split import best_split_gini, best_split_mse

_MAX_DEPTH_CAP = 64


class _Node:
    __slots__ = ("feature", "threshold", "left", "right", "counts", "value")

    def __init__(self):
        self.feature = -1  # -1 marks a leaf
        self.threshold = 0.0
        self.left = None
        self.right = None
        self.counts = None  # class counts at this node (classification)
        self.value = 0.0  # leaf value (regression)

    @property
    def is_leaf(self):
        return self.feature < 0


def _iter_nodes(root):
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        if not node.is_leaf:
            stack.append(node.left)
            stack.append(node.right)


class ClassificationTree:
    """Deterministic CART; optional per-node feature subsampling for forests."""

    def __init__(self, max_depth=5, min_samples_leaf=5, ccp_alpha=0.0,
                 n_features_per_split=None, rng=None):
        self.max_depth = _MAX_DEPTH_CAP if max_depth is None else int(max_depth)
        self.min_samples_leaf = int(min_samples_leaf)
        self.ccp_alpha = float(ccp_alpha)
        self.n_features_per_split = n_features_per_split
        self.rng = rng
        self.root = None
        self.n_classes = 0

    def fit(self, X, y, n_classes, seed=0):
        # seed unused: plain CART is deterministic
        X = np.asarray(X, dtype=float)
        n, d = X.shape
        self.n_classes = n_classes
        Y = np.zeros((n, n_classes))
        Y[np.arange(n), y] = 1.0
        all_features = np.arange(d)
        self.root = self._grow(X, Y, all_features, depth=0)
        if self.ccp_alpha > 0.0:
            self._prune(n)
        return self

    def _candidate_features(self, all_features):
        if self.n_features_per_split is None or self.n_features_per_split >= len(all_features):
            return all_features
        picked = self.rng.choice(len(all_features), size=self.n_features_per_split, replace=False)
        return all_features[np.sort(picked)]

    def _grow(self, X, Y, all_features, depth):
        node = _Node()
        node.counts = Y.sum(axis=0)
        if depth >= self.max_depth or len(X) < 2 * self.min_samples_leaf or node.counts.max() == len(X):
            return node
        feats = self._candidate_features(all_features)
        found = best_split_gini(X, Y, feats, self.min_samples_leaf)
        if found is None and len(feats) < len(all_features):
            found = best_split_gini(X, Y, all_features, self.min_samples_leaf)
        if found is None:
            return node
        f, thr = found
        mask = X[:, f] <= thr
        node.feature = f
        node.threshold = thr
        node.left = self._grow(X[mask], Y[mask], all_features, depth + 1)
        node.right = self._grow(X[~mask], Y[~mask], all_features, depth + 1)
        return node

    # minimal cost-complexity pruning: collapse internal nodes whose
    # per-leaf impurity gain is at most alpha
    def _prune(self, n_total):
        def gini_risk(counts):
            n = counts.sum()
            if n == 0:
                return 0.0
            return (1.0 - ((counts / n) ** 2).sum()) * n / n_total

        def subtree_stats(node):
            if node.is_leaf:
                return gini_risk(node.counts), 1
            rl, ll = subtree_stats(node.left)
            rr, lr = subtree_stats(node.right)
            return rl + rr, ll + lr

        while True:
            weakest, weakest_g = None, math.inf
            for node in _iter_nodes(self.root):
                if node.is_leaf:
                    continue
                r_sub, leaves = subtree_stats(node)
                g = (gini_risk(node.counts) - r_sub) / (leaves - 1)
                if g < weakest_g - 1e-15:
                    weakest, weakest_g = node, g
            if weakest is None or weakest_g > self.ccp_alpha + 1e-12:
                break
            weakest.feature = -1
            weakest.left = weakest.right = None

    def predict_proba(self, X):
        X = np.asarray(X, dtype=float)
        out = np.zeros((len(X), self.n_classes))
        stack = [(self.root, np.arange(len(X)))]
        while stack:
            node, idx = stack.pop()
            if len(idx) == 0:
                continue
            if node.is_leaf:
                out[idx] = node.counts / node.counts.sum()
                continue
            mask = X[idx, node.feature] <= node.threshold
            stack.append((node.left, idx[mask]))
            stack.append((node.right, idx[~mask]))
        return out

    def node_count(self):
        return sum(1 for _ in _iter_nodes(self.root))

    # ---- flat array form (serialization) ----

    def to_arrays(self):
        nodes = []

        def collect(node):
            i = len(nodes)
            nodes.append(node)
            if not node.is_leaf:
                collect(node.left)
                collect(node.right)
            return i

        collect(self.root)
        index = {id(n): i for i, n in enumerate(nodes)}
        m = len(nodes)
        feature = np.full(m, -1, dtype=np.int32)
        threshold = np.zeros(m)
        left = np.full(m, -1, dtype=np.int32)
        right = np.full(m, -1, dtype=np.int32)
        counts = np.zeros((m, self.n_classes))
        for i, node in enumerate(nodes):
            counts[i] = node.counts
            if not node.is_leaf:
                feature[i] = node.feature
                threshold[i] = node.threshold
                left[i] = index[id(node.left)]
                right[i] = index[id(node.right)]
        return {"feature": feature, "threshold": threshold, "left": left,
                "right": right, "counts": counts}

    @classmethod
    def from_arrays(cls, arrays, max_depth=None, min_samples_leaf=1, ccp_alpha=0.0):
        tree = cls(max_depth=max_depth, min_samples_leaf=min_samples_leaf, ccp_alpha=ccp_alpha)
        feature, threshold = arrays["feature"], arrays["threshold"]
        left, right, counts = arrays["left"], arrays["right"], arrays["counts"]
        tree.n_classes = counts.shape[1]

        def build(i):
            node = _Node()
            node.counts = counts[i].copy()
            if feature[i] >= 0:
                node.feature = int(feature[i])
                node.threshold = float(threshold[i])
                node.left = build(int(left[i]))
                node.right = build(int(right[i]))
            return node

        tree.root = build(0)
        return tree

    def meta(self):
        return {
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "ccp_alpha": self.ccp_alpha,
            "n_classes": self.n_classes,
        }

    @classmethod
    def restore(cls, meta, arrays):
        return cls.from_arrays(
            arrays,
            max_depth=meta["max_depth"],
            min_samples_leaf=meta["min_samples_leaf"],
            ccp_alpha=meta["ccp_alpha"],
        )


class RegressionTree:
    """Variance-reduction tree for boosting residuals; leaf values are set by
    the caller through ``assign_leaf_values``."""

    def __init__(self, max_depth=3, min_samples_leaf=1):
        self.max_depth = _MAX_DEPTH_CAP if max_depth is None else int(max_depth)
        self.min_samples_leaf = int(min_samples_leaf)
        self.root = None

    def fit(self, X, r):
        X = np.asarray(X, dtype=float)
        feats = np.arange(X.shape[1])
        idx = np.arange(len(X))
        self.root = self._grow(X, r, idx, feats, 0)
        return self

    def _grow(self, X, r, idx, feats, depth):
        node = _Node()
        node.value = float(r[idx].mean()) if len(idx) else 0.0
        node.counts = idx  # temporarily store the sample indices for leaf fitting
        if depth >= self.max_depth or len(idx) < 2 * self.min_samples_leaf:
            return node
        found = best_split_mse(X[idx], r[idx], feats, self.min_samples_leaf)
        if found is None:
            return node
        f, thr = found
        mask = X[idx, f] <= thr
        node.feature = f
        node.threshold = thr
        node.left = self._grow(X, r, idx[mask], feats, depth + 1)
        node.right = self._grow(X, r, idx[~mask], feats, depth + 1)
        node.counts = None
        return node

    def leaves(self):
        return [n for n in _iter_nodes(self.root) if n.is_leaf]

    def assign_leaf_values(self, fn):
        """fn(sample_indices) -> leaf value."""
        for leaf in self.leaves():
            leaf.value = float(fn(leaf.counts))
            leaf.counts = None

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        out = np.zeros(len(X))
        stack = [(self.root, np.arange(len(X)))]
        while stack:
            node, idx = stack.pop()
            if len(idx) == 0:
                continue
            if node.is_leaf:
                out[idx] = node.value
                continue
            mask = X[idx, node.feature] <= node.threshold
            stack.append((node.left, idx[mask]))
            stack.append((node.right, idx[~mask]))
        return out

    def to_arrays(self):
        nodes = []

        def collect(node):
            nodes.append(node)
            if not node.is_leaf:
                collect(node.left)
                collect(node.right)

        collect(self.root)
        index = {id(n): i for i, n in enumerate(nodes)}
        m = len(nodes)
        feature = np.full(m, -1, dtype=np.int32)
        threshold = np.zeros(m)
        left = np.full(m, -1, dtype=np.int32)
        right = np.full(m, -1, dtype=np.int32)
        value = np.zeros(m)
        for i, node in enumerate(nodes):
            value[i] = node.value
            if not node.is_leaf:
                feature[i] = node.feature
                threshold[i] = node.threshold
                left[i] = index[id(node.left)]
                right[i] = index[id(node.right)]
        return {"feature": feature, "threshold": threshold, "left": left,
                "right": right, "value": value}

    @classmethod
    def from_arrays(cls, arrays):
        tree = cls()
        feature, threshold = arrays["feature"], arrays["threshold"]
        left, right, value = arrays["left"], arrays["right"], arrays["value"]

        def build(i):
            node = _Node()
            node.value = float(value[i])
            if feature[i] >= 0:
                node.feature = int(feature[i])
                node.threshold = float(threshold[i])
                node.left = build(int(left[i]))
                node.right = build(int(right[i]))
            return node

        tree.root = build(0)
        return tree
