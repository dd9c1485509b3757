"""Extremely randomized regression trees, built from scratch.

Every tree trains on the full sample (no bootstrapping). At each node a
random subset of the non-constant features is drawn, one candidate
threshold per feature is drawn uniformly inside that feature's (min, max)
over the node sample, and the candidate with the highest variance reduction
wins (ties go to the earliest-drawn candidate). Predictions average the
reached leaf values across trees.

Determinism contract: all randomness flows from numpy's PCG64 bit
generator. Tree ``i`` draws from ``PCG64(seed ^ i)``, so results are
bit-identical no matter how many threads build trees.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidParamsError,
    MissingFeatureError,
    NonFiniteError,
    TooShortError,
)
from .timeseries import FeatureTable

MODEL_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExtraTreesParams:
    """Ensemble hyperparameters.

    ``k_features=None`` means "use every feature available at fit time",
    the recommended choice for regression, as is ``min_samples_split=5``.
    """

    n_trees: int = 100
    k_features: int | None = None
    min_samples_split: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise InvalidParamsError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.k_features is not None and self.k_features < 1:
            raise InvalidParamsError(f"k_features must be >= 1, got {self.k_features}")
        if self.min_samples_split < 2:
            raise InvalidParamsError(
                f"min_samples_split must be >= 2, got {self.min_samples_split}"
            )
        if not 0 <= self.seed < 2**64:
            raise InvalidParamsError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class Leaf:
    """Terminal node: predicts the mean target of its training rows."""

    value: float
    count: int


@dataclass(frozen=True)
class Split:
    """Internal node: rows with feature < threshold go left, >= goes right."""

    feature_index: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Leaf | Split


class RandomSplitSampler:
    """Split randomness drawn from a numpy Generator (PCG64 in production)."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def choose_features(self, candidates: list[int], k: int) -> list[int]:
        """Draw ``k`` distinct entries of ``candidates`` uniformly, in draw order.

        Partial Fisher-Yates: one integer draw per selection.
        """
        pool = list(candidates)
        for i in range(k):
            j = i + int(self.rng.integers(0, len(pool) - i))
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def draw_threshold(self, lo: float, hi: float) -> float:
        """Uniform draw strictly inside (lo, hi)."""
        while True:
            t = float(self.rng.uniform(lo, hi))
            if lo < t < hi:
                return t


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    k_features: int,
    min_samples_split: int,
    sampler: RandomSplitSampler,
    importance_acc: np.ndarray | None = None,
) -> TreeNode:
    """Build one extremely randomized tree over the full sample.

    Nodes are expanded depth-first, left child before right child; the
    sampler is consulted once per node for the feature subset and once per
    candidate feature for its threshold, in that order. Tests rely on this
    visit order to replay recorded draws.

    When ``importance_acc`` is given, each split adds its variance
    reduction, weighted by the fraction of rows passing through the node,
    to the winning feature's slot.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    return _grow(X, y, k_features, min_samples_split, sampler, importance_acc, y.size)


def _grow(
    X: np.ndarray,
    y: np.ndarray,
    k: int,
    min_split: int,
    sampler: RandomSplitSampler,
    acc: np.ndarray | None,
    n_total: int,
) -> TreeNode:
    n = y.size
    if n < min_split or y.min() == y.max():
        return Leaf(float(y.mean()), int(n))
    # a feature qualifies when some float lies strictly between its min and
    # max over the node sample, so a threshold can separate the rows
    mins = X.min(axis=0)
    maxs = X.max(axis=0)
    candidates = np.flatnonzero(np.nextafter(mins, maxs) < maxs)
    if candidates.size == 0:
        return Leaf(float(y.mean()), int(n))

    chosen = sampler.choose_features(
        [int(j) for j in candidates], min(k, candidates.size)
    )
    thresholds = np.array(
        [sampler.draw_threshold(float(mins[j]), float(maxs[j])) for j in chosen]
    )

    # score every candidate at once: variance reduction written in terms of
    # each side's sum and sum of squares
    masks = X[:, chosen] < thresholds  # (n, k)
    y_sum, ysq_sum = float(y.sum()), float(y @ y)
    n_left = masks.sum(axis=0)
    left_sum = y @ masks
    left_sq = (y * y) @ masks
    sse_left = left_sq - left_sum**2 / n_left
    sse_right = (ysq_sum - left_sq) - (y_sum - left_sum) ** 2 / (n - n_left)
    parent_var = (ysq_sum - y_sum**2 / n) / n
    scores = parent_var - (sse_left + sse_right) / n

    best = int(np.argmax(scores))  # argmax keeps the earliest-drawn candidate on ties
    if acc is not None:
        # reductions are nonnegative in exact arithmetic; guard float rounding
        acc[chosen[best]] += (n / n_total) * max(float(scores[best]), 0.0)
    mask = masks[:, best]
    left = _grow(X[mask], y[mask], k, min_split, sampler, acc, n_total)
    right = _grow(X[~mask], y[~mask], k, min_split, sampler, acc, n_total)
    return Split(int(chosen[best]), float(thresholds[best]), left, right)


@dataclass(frozen=True, eq=False)
class ExtraTreesModel:
    """A fitted ensemble: tree roots, hyperparameters, and importances."""

    trees: tuple[TreeNode, ...]
    params: ExtraTreesParams
    feature_names: tuple[str, ...]
    importances: np.ndarray

    def __post_init__(self) -> None:
        if len(self.trees) != self.params.n_trees:
            raise InvalidParamsError(
                f"model has {len(self.trees)} trees for n_trees={self.params.n_trees}"
            )
        arr = np.asarray(self.importances, dtype=np.float64)
        arr.flags.writeable = False
        object.__setattr__(self, "importances", arr)

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(model_to_dict(self), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "ExtraTreesModel":
        return model_from_dict(json.loads(text))


def _resolve_threads(n_threads: int | None) -> int:
    if n_threads is None:
        env = os.environ.get("NOWCAST_THREADS", "").strip()
        n_threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, n_threads)


def fit(
    table: FeatureTable, params: ExtraTreesParams, n_threads: int | None = None
) -> ExtraTreesModel:
    """Train an ensemble on a table's feature columns against its target.

    ``n_threads`` defaults to the NOWCAST_THREADS environment variable, or
    the machine's core count. The result does not depend on it.
    """
    if table.target is None:
        raise InvalidParamsError("fit requires the table's target to be set")
    names = table.feature_names
    if not names:
        raise InvalidParamsError("fit requires at least one feature column")
    if len(table) < 2:
        raise TooShortError(f"fit requires at least 2 rows, got {len(table)}")

    X = table.matrix(names)
    y = np.asarray(table.target_values(), dtype=np.float64)
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise NonFiniteError("training data contains NaN or infinite values")

    k = params.k_features if params.k_features is not None else X.shape[1]
    if k > X.shape[1]:
        raise InvalidParamsError(
            f"k_features={k} exceeds the {X.shape[1]} available features"
        )

    def build(i: int) -> tuple[TreeNode, np.ndarray]:
        rng = np.random.Generator(np.random.PCG64(params.seed ^ i))
        acc = np.zeros(X.shape[1], dtype=np.float64)
        root = grow_tree(X, y, k, params.min_samples_split, RandomSplitSampler(rng), acc)
        return root, acc

    n_threads = min(_resolve_threads(n_threads), params.n_trees)
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            built = list(pool.map(build, range(params.n_trees)))
    else:
        built = [build(i) for i in range(params.n_trees)]

    trees = tuple(root for root, _ in built)
    # summed in tree order, so the result is independent of thread scheduling;
    # normalized across the whole ensemble (all zero when no split exists)
    acc = np.zeros(X.shape[1], dtype=np.float64)
    for _, tree_acc in built:
        acc += tree_acc
    total = acc.sum()
    importances = acc / total if total > 0 else acc
    return ExtraTreesModel(trees, params, names, importances)


def predict(model: ExtraTreesModel, rows: FeatureTable) -> np.ndarray:
    """Mean leaf value across trees, per row of ``rows``."""
    missing = [n for n in model.feature_names if n not in rows.columns]
    if missing:
        raise MissingFeatureError(f"rows lack fitted feature columns: {missing}")
    X = rows.matrix(model.feature_names)
    out = np.zeros(X.shape[0], dtype=np.float64)
    scratch = np.empty(X.shape[0], dtype=np.float64)
    for root in model.trees:
        _route(root, X, np.arange(X.shape[0]), scratch)
        out += scratch
    return out / len(model.trees)


def _route(node: TreeNode, X: np.ndarray, idx: np.ndarray, out: np.ndarray) -> None:
    if isinstance(node, Leaf):
        out[idx] = node.value
        return
    mask = X[idx, node.feature_index] < node.threshold
    _route(node.left, X, idx[mask], out)
    _route(node.right, X, idx[~mask], out)


def feature_importances(model: ExtraTreesModel) -> dict[str, float]:
    """Importances keyed by feature name; sum to 1 unless no split exists."""
    return {name: float(v) for name, v in zip(model.feature_names, model.importances)}


def _node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {"kind": "leaf", "value": node.value, "count": node.count}
    return {
        "kind": "split",
        "feature_index": node.feature_index,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(d: dict) -> TreeNode:
    if d["kind"] == "leaf":
        return Leaf(float(d["value"]), int(d["count"]))
    return Split(
        int(d["feature_index"]),
        float(d["threshold"]),
        _node_from_dict(d["left"]),
        _node_from_dict(d["right"]),
    )


def model_to_dict(model: ExtraTreesModel) -> dict:
    """Versioned JSON-ready encoding of a fitted model."""
    return {
        "schema_version": MODEL_SCHEMA_VERSION,
        "params": {
            "n_trees": model.params.n_trees,
            "k_features": model.params.k_features,
            "min_samples_split": model.params.min_samples_split,
            "seed": model.params.seed,
        },
        "feature_names": list(model.feature_names),
        "importances": [float(v) for v in model.importances],
        "trees": [_node_to_dict(t) for t in model.trees],
    }


def model_from_dict(d: dict) -> ExtraTreesModel:
    if d.get("schema_version") != MODEL_SCHEMA_VERSION:
        raise ValueError(f"unsupported model schema_version: {d.get('schema_version')}")
    p = d["params"]
    params = ExtraTreesParams(
        n_trees=int(p["n_trees"]),
        k_features=None if p["k_features"] is None else int(p["k_features"]),
        min_samples_split=int(p["min_samples_split"]),
        seed=int(p["seed"]),
    )
    return ExtraTreesModel(
        trees=tuple(_node_from_dict(t) for t in d["trees"]),
        params=params,
        feature_names=tuple(d["feature_names"]),
        importances=np.asarray(d["importances"], dtype=np.float64),
    )
