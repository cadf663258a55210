"""Model wrapper and shared helpers for the decision-model learners."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..errors import InputError
from ..situation import FeatureEncoder, FeatureMapping

KINDS = (
    "decision_tree",
    "random_forest",
    "gradient_boosted_trees",
    "svm",
    "neural_network",
)

DecisionMapping = dict[str, float]

PROBABILITY_TOL = 1e-9


def validate_mapping(mapping: Mapping[str, float], alternatives: tuple[str, ...]) -> None:
    if set(mapping) != set(alternatives):
        raise AssertionError("decision mapping keys must equal the alternatives")
    total = sum(mapping.values())
    if abs(total - 1.0) > PROBABILITY_TOL or any(p < 0 or p > 1 for p in mapping.values()):
        raise AssertionError(f"invalid decision mapping (sum {total})")


class ConstantEstimator:
    """Single observed decision: probability mass 1 on that class."""

    def __init__(self, class_index: int = 0):
        self.class_index = class_index

    def fit(self, X, y, n_classes, seed):
        self.class_index = int(y[0]) if len(y) else 0
        return self

    def predict_proba(self, X):
        out = np.zeros((len(X), 1))
        out[:, 0] = 1.0
        return out

    def to_arrays(self):
        return {"class_index": np.array([self.class_index], dtype=np.int64)}

    def meta(self):
        return {}

    @classmethod
    def from_arrays(cls, meta, arrays):
        return cls(int(arrays["class_index"][0]))


@dataclass(frozen=True)
class TrainedDecisionModel:
    """A classifier over encoded feature vectors returning one probability per
    alternative of the decision point (id order)."""

    kind: str
    encoder: FeatureEncoder
    alternatives: tuple[str, ...]
    class_order: tuple[str, ...]  # classes seen in training, id-ordered
    estimator: object
    params: Mapping[str, object] = field(default_factory=dict)
    seed: int = 0
    degenerate: bool = False

    def predict_proba_matrix(self, X: np.ndarray) -> np.ndarray:
        """(n, len(alternatives)) probabilities; unseen alternatives get 0."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != len(self.encoder):
            raise InputError(
                f"expected vectors of length {len(self.encoder)}, got {X.shape[1]}"
            )
        inner = self.estimator.predict_proba(X)
        out = np.zeros((len(X), len(self.alternatives)))
        col = {t: i for i, t in enumerate(self.alternatives)}
        for j, cls in enumerate(self.class_order):
            out[:, col[cls]] = inner[:, j]
        return out

    def predict_mapping(self, fmap: FeatureMapping) -> DecisionMapping:
        x = self.encoder.transform(fmap)
        probs = self.predict_proba_matrix(x[None, :])[0]
        return {t: float(p) for t, p in zip(self.alternatives, probs)}

    def argmax(self, mapping: DecisionMapping) -> str:
        # ties resolve to the earliest alternative in class (id) order
        best = max(range(len(self.alternatives)), key=lambda i: (mapping[self.alternatives[i]], -i))
        return self.alternatives[best]
