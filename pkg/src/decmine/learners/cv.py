"""Training, stratified cross-validation with grid search, model suggestion."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..errors import InputError
from ..situation import FeatureEncoder, SituationTable, encode_table, fit_encoder
from .base import KINDS, ConstantEstimator, TrainedDecisionModel
from .boosting import GradientBoostingEstimator
from .forest import RandomForestEstimator
from .metrics import weighted_f1
from .nn import NeuralNetEstimator
from .svm import LinearSvmEstimator
from .tree import ClassificationTree

DEFAULT_PARAMS: dict[str, dict] = {
    "decision_tree": {"max_depth": 5, "min_samples_leaf": 5, "ccp_alpha": 0.0},
    "random_forest": {"n_trees": 100, "max_depth": None, "min_samples_leaf": 1},
    "gradient_boosted_trees": {"rounds": 100, "learning_rate": 0.1, "max_depth": 3,
                               "min_samples_leaf": 1},
    "svm": {"regularization": 0.1},
    "neural_network": {"hidden": 32},
}

DEFAULT_GRIDS: dict[str, dict[str, list]] = {
    "decision_tree": {"max_depth": [3, 5, 8], "ccp_alpha": [0.0, 0.01]},
    "random_forest": {"n_trees": [100]},
    "gradient_boosted_trees": {"rounds": [50, 100], "learning_rate": [0.05, 0.1]},
    "svm": {"regularization": [0.01, 0.1, 1.0]},
    "neural_network": {"hidden": [16, 32]},
}

# preference order when mean F1 ties: simpler models first
TIE_ORDER = {"decision_tree": 0, "svm": 1, "random_forest": 2,
             "gradient_boosted_trees": 3, "neural_network": 4}


def _complexity(kind: str, params: Mapping) -> tuple:
    """Sort key: 'simplest model' when grid points tie on mean F1."""
    if kind == "decision_tree":
        return (params["max_depth"], -params["ccp_alpha"])
    if kind == "random_forest":
        return (params["n_trees"],)
    if kind == "gradient_boosted_trees":
        return (params["rounds"], params["learning_rate"])
    if kind == "svm":
        return (-params["regularization"],)
    if kind == "neural_network":
        return (params["hidden"],)
    return ()


def _make_estimator(kind: str, params: Mapping):
    if kind == "decision_tree":
        return ClassificationTree(params["max_depth"], params["min_samples_leaf"],
                                  params["ccp_alpha"])
    if kind == "random_forest":
        return RandomForestEstimator(params["n_trees"], params["max_depth"],
                                     params["min_samples_leaf"])
    if kind == "gradient_boosted_trees":
        return GradientBoostingEstimator(params["rounds"], params["learning_rate"],
                                         params["max_depth"], params["min_samples_leaf"])
    if kind == "svm":
        return LinearSvmEstimator(params["regularization"])
    if kind == "neural_network":
        return NeuralNetEstimator(params["hidden"])
    raise InputError(f"unknown learner kind {kind!r}; choose one of {', '.join(KINDS)}")


def train(kind: str, table: SituationTable, encoder: FeatureEncoder | None = None,
          params: Mapping | None = None, seed: int = 0) -> TrainedDecisionModel:
    """Fit one decision model. A table with a single observed decision yields
    a degenerate constant model instead of an error."""
    if kind not in KINDS:
        raise InputError(f"unknown learner kind {kind!r}; choose one of {', '.join(KINDS)}")
    if not table.rows:
        raise InputError("cannot train on an empty situation table")
    if encoder is None:
        encoder = fit_encoder(table)
    merged = dict(DEFAULT_PARAMS[kind])
    merged.update(params or {})
    X, y_alt = encode_table(encoder, table)
    alternatives = table.decision_point.alternatives
    seen = sorted(set(int(v) for v in y_alt))
    class_order = tuple(alternatives[i] for i in seen)

    if len(seen) == 1:
        estimator = ConstantEstimator().fit(X, np.zeros(len(X), dtype=int), 1, seed)
        return TrainedDecisionModel(kind, encoder, alternatives, class_order,
                                    estimator, merged, seed, degenerate=True)

    remap = {alt: i for i, alt in enumerate(seen)}
    y = np.array([remap[int(v)] for v in y_alt], dtype=np.int64)
    estimator = _make_estimator(kind, merged)
    estimator.fit(X, y, len(seen), seed)
    return TrainedDecisionModel(kind, encoder, alternatives, class_order,
                                estimator, merged, seed, degenerate=False)


def predict(model: TrainedDecisionModel, fmap) -> dict[str, float]:
    return model.predict_mapping(fmap)


@dataclass(frozen=True)
class CVReport:
    kind: str
    fold_f1: tuple[float, ...]
    mean_f1: float
    params: Mapping
    degenerate: bool = False
    loo_fallback: bool = False
    grid_scores: tuple = ()  # ((params, mean_f1), ...)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "fold_f1": list(self.fold_f1),
            "mean_f1": self.mean_f1,
            "params": dict(self.params),
            "degenerate": self.degenerate,
            "loo_fallback": self.loo_fallback,
            "grid_scores": [{"params": dict(p), "mean_f1": s} for p, s in self.grid_scores],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CVReport":
        return cls(
            kind=doc["kind"],
            fold_f1=tuple(doc["fold_f1"]),
            mean_f1=doc["mean_f1"],
            params=doc["params"],
            degenerate=doc["degenerate"],
            loo_fallback=doc["loo_fallback"],
            grid_scores=tuple((g["params"], g["mean_f1"]) for g in doc.get("grid_scores", ())),
        )


def _stratified_folds(table: SituationTable, k: int, seed: int) -> list[np.ndarray]:
    """Deal class members round-robin over folds with one rolling counter, so
    rare classes spread out and no fold ends up empty."""
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    counter = 0
    for alt_idx, alt in enumerate(table.decision_point.alternatives):
        members = [i for i, row in enumerate(table.rows) if row.decision == alt]
        if not members:
            continue
        members = [members[j] for j in rng.permutation(len(members))]
        for idx in members:
            folds[counter % k].append(idx)
            counter += 1
    return [np.array(sorted(f), dtype=int) for f in folds]


def _grid_points(grid: Mapping[str, list]) -> list[dict]:
    keys = sorted(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def cross_validate(kind: str, table: SituationTable, grid: Mapping[str, list] | None = None,
                   k: int = 5, seed: int = 0) -> CVReport:
    """Stratified k-fold CV with per-fold encoder refits; grid point selection
    by mean weighted F1, ties to the simplest model."""
    if kind not in KINDS:
        raise InputError(f"unknown learner kind {kind!r}; choose one of {', '.join(KINDS)}")
    if not table.rows:
        raise InputError("cannot cross-validate an empty situation table")
    n = len(table.rows)
    if len(table.distinct_decisions) == 1:
        return CVReport(kind, tuple(1.0 for _ in range(min(k, n))), 1.0, {}, degenerate=True)

    loo = n < k
    if loo:
        k = n
    folds = _stratified_folds(table, k, seed)
    points = _grid_points(grid if grid is not None else DEFAULT_GRIDS[kind])
    alternatives = table.decision_point.alternatives
    alt_index = {t: i for i, t in enumerate(alternatives)}

    results = []
    for point in points:
        fold_scores = []
        for i in range(k):
            test_set = set(folds[i].tolist())
            train_rows = tuple(row for j, row in enumerate(table.rows) if j not in test_set)
            test_rows = [table.rows[j] for j in folds[i]]
            if not train_rows or not test_rows:
                continue
            sub = SituationTable(table.decision_point, table.feature_spec, train_rows)
            encoder = fit_encoder(sub)
            model = train(kind, sub, encoder, point, seed)
            X_test = encoder.transform_rows([r.features for r in test_rows])
            pred = model.predict_proba_matrix(X_test).argmax(axis=1)
            y_true = np.array([alt_index[r.decision] for r in test_rows])
            fold_scores.append(weighted_f1(y_true, pred, len(alternatives)))
        mean = float(np.mean(fold_scores)) if fold_scores else 0.0
        results.append((point, tuple(fold_scores), mean))

    best = min(results, key=lambda r: (-r[2], _complexity(kind, {**DEFAULT_PARAMS[kind], **r[0]})))
    merged_best = {**DEFAULT_PARAMS[kind], **best[0]}
    return CVReport(kind, best[1], best[2], merged_best, degenerate=False, loo_fallback=loo,
                    grid_scores=tuple((p, m) for p, _, m in results))


def suggest_best(reports: Mapping[str, CVReport] | list[CVReport]) -> str:
    """Kind with the highest mean F1 among non-degenerate reports; ties prefer
    the simpler family."""
    if isinstance(reports, Mapping):
        reports = list(reports.values())
    candidates = [r for r in reports if not r.degenerate]
    if not candidates:
        raise InputError("all decision models are degenerate; nothing to suggest")
    best = min(candidates, key=lambda r: (-r.mean_f1, TIE_ORDER.get(r.kind, 99)))
    return best.kind
