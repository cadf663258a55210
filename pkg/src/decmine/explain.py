"""Shapley attributions for decision predictions: exact subset enumeration,
permutation sampling for larger unit counts, and global aggregation.

A model evaluated on a partial feature set is read as the marginal
expectation over a background sample: in-subset columns come from the
instance, the rest from each background row, averaged. The value of the empty
subset is the base value; attributions of the full set telescope from base to
predicted probability (efficiency).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from ._json import canonical_dump_bytes
from .errors import InputError
from .learners.base import TrainedDecisionModel

EXACT_UNIT_LIMIT = 20
DEFAULT_BACKGROUND_SIZE = 100
DEFAULT_PERMUTATIONS = 200
AUTO_EXACT_THRESHOLD = 12


class TooManyUnitsError(InputError):
    """Exact enumeration refused; use sampled_shap."""


@dataclass(frozen=True)
class Background:
    """Encoded training rows used to marginalize out-of-subset columns."""

    data: np.ndarray  # (B, d)

    def __post_init__(self):
        if self.data.ndim != 2 or len(self.data) == 0:
            raise InputError("background must be a non-empty 2-D array")

    @classmethod
    def from_matrix(cls, X: np.ndarray, size: int = DEFAULT_BACKGROUND_SIZE,
                    seed: int = 0) -> "Background":
        X = np.asarray(X, dtype=float)
        if len(X) == 0:
            raise InputError("cannot build a background from an empty matrix")
        if len(X) <= size:
            return cls(X.copy())
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(len(X), size=size, replace=False))
        return cls(X[idx])


@dataclass(frozen=True)
class ShapExplanation:
    target: str
    attributions: tuple[tuple[str, float], ...]  # ordered by |value| descending
    base_value: float
    predicted_value: float
    method: str  # "exact" | "sampled"
    feature_values: Mapping[str, float] = field(default_factory=dict)
    standard_errors: Mapping[str, float] = field(default_factory=dict)
    metadata: Mapping[str, object] = field(default_factory=dict)

    def attribution_sum(self) -> float:
        return float(sum(v for _, v in self.attributions))

    def to_dict(self) -> dict:
        doc = {
            "target": self.target,
            "base_value": self.base_value,
            "predicted_value": self.predicted_value,
            "method": self.method,
            "attributions": [
                {
                    "name": name,
                    "value": value,
                    "feature_value": self.feature_values.get(name),
                }
                for name, value in self.attributions
            ],
            "metadata": dict(self.metadata),
        }
        if self.standard_errors:
            doc["se"] = {k: v for k, v in self.standard_errors.items()}
        return doc

    def dump_json(self) -> bytes:
        return canonical_dump_bytes(self.to_dict())


@dataclass(frozen=True)
class GlobalExplanation:
    """Mean |attribution| per unit per target, plus the raw per-instance
    matrix for beeswarm-style plots."""

    targets: tuple[str, ...]
    unit_names: tuple[str, ...]
    unit_sources: tuple[str, ...]
    mean_abs: Mapping[str, np.ndarray]  # target -> (units,)
    matrices: Mapping[str, np.ndarray]  # target -> (instances, units)
    instance_values: np.ndarray  # (instances, units) feature values
    instance_count: int

    def ranked(self, target: str, exclude_sources: Sequence[str] = ()) -> list[tuple[str, float]]:
        values = self.mean_abs[target]
        keep = [
            i for i, src in enumerate(self.unit_sources)
            if not any(ex in src for ex in exclude_sources)
        ]
        order = sorted(keep, key=lambda i: (-values[i], self.unit_names[i]))
        return [(self.unit_names[i], float(values[i])) for i in order]

    def to_dict(self) -> dict:
        return {
            "targets": list(self.targets),
            "unit_names": list(self.unit_names),
            "unit_sources": list(self.unit_sources),
            "mean_abs": {t: [float(v) for v in self.mean_abs[t]] for t in self.targets},
            "matrices": {t: [[float(v) for v in row] for row in self.matrices[t]] for t in self.targets},
            "instance_values": [[float(v) for v in row] for row in self.instance_values],
            "instance_count": self.instance_count,
        }

    def dump_json(self) -> bytes:
        return canonical_dump_bytes(self.to_dict())


# ---------------------------------------------------------------------------
# units and value function

PredictFn = Callable[[np.ndarray], np.ndarray]


def _as_predict_fn(model, target: str | None) -> PredictFn:
    if callable(model) and not isinstance(model, TrainedDecisionModel):
        return model
    if target is None:
        raise InputError("a target transition is required when explaining a decision model")
    if target not in model.alternatives:
        raise InputError(f"unknown target transition {target!r}")
    t_idx = model.alternatives.index(target)

    def fn(X: np.ndarray) -> np.ndarray:
        return model.predict_proba_matrix(X)[:, t_idx]

    return fn


def _units(model, n_columns: int, grouping: str) -> tuple[list[str], list[str], list[np.ndarray]]:
    """Returns (names, sources, column-index groups)."""
    if isinstance(model, TrainedDecisionModel):
        cols = model.encoder.columns
        if grouping == "by-source":
            names, sources, groups = [], [], []
            for i, col in enumerate(cols):
                if col.source in sources:
                    groups[sources.index(col.source)] = np.append(
                        groups[sources.index(col.source)], i
                    )
                else:
                    names.append(col.source)
                    sources.append(col.source)
                    groups.append(np.array([i]))
            return names, sources, groups
        if grouping != "columns":
            raise InputError(f"unknown grouping {grouping!r}")
        return (
            [c.name for c in cols],
            [c.source for c in cols],
            [np.array([i]) for i in range(len(cols))],
        )
    names = [f"x{i}" for i in range(n_columns)]
    return names, list(names), [np.array([i]) for i in range(n_columns)]


class _ValueFunction:
    """v(S) = mean over background rows of f(composite); memoized by subset
    mask since instance, background and target are fixed."""

    def __init__(self, fn: PredictFn, x: np.ndarray, background: Background,
                 groups: list[np.ndarray]):
        self.fn = fn
        self.x = np.asarray(x, dtype=float)
        self.bg = background.data
        self.groups = groups
        self._cache: dict[int, float] = {}

    def __call__(self, mask: int) -> float:
        cached = self._cache.get(mask)
        if cached is not None:
            return cached
        Z = self.bg.copy()
        for i, cols in enumerate(self.groups):
            if mask >> i & 1:
                Z[:, cols] = self.x[cols]
        value = float(np.mean(self.fn(Z)))
        self._cache[mask] = value
        return value

    def walk(self, order: np.ndarray) -> np.ndarray:
        """Prefix values along one player ordering, evaluated in a single
        batched model call: v(∅), v({o1}), v({o1,o2}), ..., v(F)."""
        B, d = self.bg.shape
        n = len(order)
        Z = np.broadcast_to(self.bg, (n + 1, B, d)).copy()
        for j, unit in enumerate(order):
            cols = self.groups[int(unit)]
            Z[j + 1:, :, cols] = self.x[cols]
        preds = self.fn(Z.reshape((n + 1) * B, d)).reshape(n + 1, B)
        return preds.mean(axis=1)


def value_function(model, instance: np.ndarray, subset: Sequence[int],
                   background: Background, target: str | None = None) -> float:
    """Marginal-expectation value of a column subset (public, unmemoized entry)."""
    fn = _as_predict_fn(model, target)
    x = np.asarray(instance, dtype=float)
    bad = [c for c in subset if c < 0 or c >= x.shape[0]]
    if bad:
        raise InputError(f"subset columns out of range: {bad}")
    Z = background.data.copy()
    cols = np.array(sorted(set(int(c) for c in subset)), dtype=int)
    if len(cols):
        Z[:, cols] = x[cols]
    return float(np.mean(fn(Z)))


# ---------------------------------------------------------------------------
# exact Shapley values


def _subset_weights(n: int) -> np.ndarray:
    import math

    return np.array(
        [math.factorial(s) * math.factorial(n - s - 1) / math.factorial(n) for s in range(n)]
    )


def exact_shap(model, instance: np.ndarray, target: str | None = None,
               background: Background | None = None, grouping: str = "columns") -> ShapExplanation:
    """Exact subset enumeration with the factorial weights; refuses more than
    20 attribution units."""
    if background is None:
        raise InputError("a background sample is required")
    x = np.asarray(instance, dtype=float)
    fn = _as_predict_fn(model, target)
    names, sources, groups = _units(model, x.shape[0], grouping)
    n = len(groups)
    if n > EXACT_UNIT_LIMIT:
        raise TooManyUnitsError(
            f"{n} attribution units exceed the exact limit of {EXACT_UNIT_LIMIT}; "
            "use sampled_shap"
        )
    v = _ValueFunction(fn, x, background, groups)
    weights = _subset_weights(n)
    full = (1 << n) - 1
    values = np.empty(1 << n)
    for mask in range(1 << n):
        values[mask] = v(mask)
    psi = np.zeros(n)
    for i in range(n):
        bit = 1 << i
        rest = [m for m in range(1 << n) if not m & bit]
        for m in rest:
            psi[i] += weights[bin(m).count("1")] * (values[m | bit] - values[m])
    base, predicted = values[0], values[full]
    order = sorted(range(n), key=lambda i: (-abs(psi[i]), names[i]))
    fvals = _feature_value_map(names, groups, x)
    return ShapExplanation(
        target=target if target is not None else "",
        attributions=tuple((names[i], float(psi[i])) for i in order),
        base_value=float(base),
        predicted_value=float(predicted),
        method="exact",
        feature_values=fvals,
        metadata={"grouping": grouping, "units": n},
    )


def _feature_value_map(names, groups, x) -> dict[str, float]:
    out = {}
    for name, cols in zip(names, groups):
        if len(cols) == 1:
            out[name] = float(x[cols[0]])
    return out


# ---------------------------------------------------------------------------
# permutation sampling


def sampled_shap(model, instance: np.ndarray, target: str | None = None,
                 background: Background | None = None,
                 n_permutations: int = DEFAULT_PERMUTATIONS, seed: int = 0,
                 grouping: str = "columns",
                 enforce_efficiency: bool = True) -> ShapExplanation:
    """Monte-Carlo Shapley estimate over random player orderings: per-unit
    mean marginal contribution, standard errors, optional residual
    redistribution so the attributions telescope exactly."""
    if n_permutations < 1:
        raise InputError("n_permutations must be >= 1")
    if background is None:
        raise InputError("a background sample is required")
    x = np.asarray(instance, dtype=float)
    fn = _as_predict_fn(model, target)
    names, sources, groups = _units(model, x.shape[0], grouping)
    n = len(groups)
    v = _ValueFunction(fn, x, background, groups)
    rng = np.random.default_rng(seed)
    contrib = np.zeros((n_permutations, n))
    base = predicted = 0.0
    for p in range(n_permutations):
        order = rng.permutation(n)
        prefix_values = v.walk(order)
        contrib[p, order] = np.diff(prefix_values)
        base, predicted = float(prefix_values[0]), float(prefix_values[-1])
    psi = contrib.mean(axis=0)
    if n_permutations > 1:
        se = contrib.std(axis=0, ddof=1) / np.sqrt(n_permutations)
    else:
        se = np.zeros(n)

    redistributed = False
    if enforce_efficiency:
        residual = (predicted - base) - psi.sum()
        scale = np.abs(psi).sum()
        if scale > 0:
            psi = psi + residual * np.abs(psi) / scale
        else:
            psi = psi + residual / n
        redistributed = True

    order = sorted(range(n), key=lambda i: (-abs(psi[i]), names[i]))
    return ShapExplanation(
        target=target if target is not None else "",
        attributions=tuple((names[i], float(psi[i])) for i in order),
        base_value=float(base),
        predicted_value=float(predicted),
        method="sampled",
        feature_values=_feature_value_map(names, groups, x),
        standard_errors={names[i]: float(se[i]) for i in range(n)},
        metadata={
            "grouping": grouping,
            "units": n,
            "n_permutations": n_permutations,
            "seed": seed,
            "residual_redistributed": redistributed,
        },
    )


# ---------------------------------------------------------------------------
# global aggregation


def global_explanation(model, instances: np.ndarray, targets: Sequence[str] | None = None,
                       background: Background | None = None, method: str = "auto",
                       n_permutations: int = DEFAULT_PERMUTATIONS, seed: int = 0,
                       grouping: str = "columns") -> GlobalExplanation:
    """Mean absolute attribution per unit per target over a set of instances."""
    instances = np.atleast_2d(np.asarray(instances, dtype=float))
    if len(instances) == 0:
        raise InputError("at least one instance is required")
    if background is None:
        raise InputError("a background sample is required")
    if targets is None:
        if not isinstance(model, TrainedDecisionModel):
            raise InputError("targets are required for a bare prediction function")
        targets = model.alternatives
    names, sources, groups = _units(model, instances.shape[1], grouping)
    n = len(groups)
    if method == "auto":
        method = "exact" if n <= AUTO_EXACT_THRESHOLD else "sampled"

    matrices = {}
    mean_abs = {}
    for target in targets:
        mat = np.zeros((len(instances), n))
        pos = {name: i for i, name in enumerate(names)}
        for i, x in enumerate(instances):
            if method == "exact":
                exp = exact_shap(model, x, target, background, grouping)
            else:
                exp = sampled_shap(model, x, target, background,
                                   n_permutations=n_permutations, seed=seed + i,
                                   grouping=grouping)
            for name, value in exp.attributions:
                mat[i, pos[name]] = value
        matrices[target] = mat
        mean_abs[target] = np.abs(mat).mean(axis=0)

    unit_values = np.zeros((len(instances), n))
    for j, cols in enumerate(groups):
        if len(cols) == 1:
            unit_values[:, j] = instances[:, cols[0]]
    return GlobalExplanation(
        targets=tuple(targets),
        unit_names=tuple(names),
        unit_sources=tuple(sources),
        mean_abs=mean_abs,
        matrices=matrices,
        instance_values=unit_values,
        instance_count=len(instances),
    )
