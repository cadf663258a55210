"""Independent Shapley oracle for tests: random lookup-style predictors, an
independent marginal-expectation value function, and a permutation-average
implementation that never touches the library's subset-weight code path."""

import itertools

import numpy as np


def make_predictor(seed: int, n_units: int, active=None):
    """Deterministic nonlinear scalar predictor over vectors of length
    ``n_units``; ``active`` restricts which columns it actually reads."""
    rng = np.random.default_rng(seed)
    if active is None:
        active = list(range(n_units))
    active = np.array(sorted(active), dtype=int)
    w1 = rng.normal(size=(len(active), 3))
    b1 = rng.normal(size=3)
    w2 = rng.normal(size=3)

    def predict(X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        h = np.tanh(X[:, active] @ w1 + b1)
        return 1.0 / (1.0 + np.exp(-(h @ w2)))

    return predict


def make_additive_pair_predictor(seed: int, n_units: int, i: int, j: int):
    """Depends on columns i and j only through their sum (for symmetry)."""
    rng = np.random.default_rng(seed)
    others = [c for c in range(n_units) if c not in (i, j)]
    w = rng.normal(size=len(others))
    a = rng.normal()

    def predict(X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        s = X[:, i] + X[:, j]
        rest = X[:, others] @ w if others else 0.0
        return 1.0 / (1.0 + np.exp(-(a * s + rest)))

    return predict


def oracle_value(predict, x, background, subset) -> float:
    """Marginal-expectation value function, written independently."""
    total = 0.0
    for row in background:
        z = [row[c] for c in range(len(x))]
        for c in subset:
            z[c] = x[c]
        total += float(predict(np.array(z)[None, :])[0])
    return total / len(background)


def value_table(predict, x, background, n_units) -> np.ndarray:
    """v(S) for every subset mask, via the independent value function but
    batched for speed: one predictor call per mask."""
    background = np.asarray(background, dtype=float)
    values = np.empty(1 << n_units)
    for mask in range(1 << n_units):
        Z = background.copy()
        for c in range(n_units):
            if mask >> c & 1:
                Z[:, c] = x[c]
        values[mask] = float(np.mean(predict(Z)))
    return values


def permutation_average_shap(predict, x, background, n_units) -> np.ndarray:
    """Average marginal contribution over all n! player orderings."""
    values = value_table(predict, x, background, n_units)
    perms = np.array(list(itertools.permutations(range(n_units))), dtype=np.int64)
    psi = np.zeros(n_units)
    masks = np.zeros(len(perms), dtype=np.int64)
    prev = np.full(len(perms), values[0])
    for j in range(n_units):
        masks = masks | (1 << perms[:, j])
        cur = values[masks]
        np.add.at(psi, perms[:, j], cur - prev)
        prev = cur
    return psi / len(perms)
