"""Greedy Gini decision trees with path-to-predicate extraction.

The learner serves three masters: separating κ-payload rows during clause
refinement, classifying embedding rows, and turning root-to-leaf paths into
the propositional predicates that explanations and refined clauses reuse.
Numeric features split on midpoints of consecutive distinct values; the
categorical ``__label`` feature splits on equality.  Missing numeric values
count as 0 both when fitting and when routing.  Ties break toward the lowest
Gini, then the lexicographically smallest feature key, then the smallest
threshold — which makes fitting deterministic without any randomness.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _cart_np
from .declare import DataPredicate

__all__ = [
    "Leaf",
    "Split",
    "TrainedTree",
    "DecisionPath",
    "FALSE_PREDICATE",
    "fit",
    "fit_ternary",
    "predict",
    "accuracy",
    "purity",
    "paths",
    "class_formula",
    "to_json",
    "from_json",
    "active_backend",
]

# A key no payload uses: class_formula over zero paths must be unsatisfiable,
# and a missing-key atom is false under predicate semantics.
FALSE_PREDICATE = DataPredicate(((("__false__", ">", 0.0),),))

_numeric_split_numpy = _cart_np.best_numeric_split
_ternary_split_numpy = _cart_np.best_ternary_split
_numeric_split = _numeric_split_numpy
_ternary_split = _ternary_split_numpy
_BACKEND = "numpy"
if os.environ.get("POLYDECLARE_NO_NUMBA", "") != "1":
    try:
        from . import _cart_nb

        _numeric_split = _cart_nb.best_numeric_split
        _ternary_split = _cart_nb.best_ternary_split
        _BACKEND = "numba"
    except ImportError:  # pragma: no cover - exercised only without numba
        pass


def active_backend() -> str:
    return _BACKEND


@dataclass(frozen=True, slots=True)
class Leaf:
    klass: int
    counts: tuple[tuple[int, int], ...]  # (class label, sample count), sorted


@dataclass(frozen=True, slots=True)
class Split:
    feature: str
    threshold: float | None  # x ≤ threshold routes left
    category: str | None  # x = category routes left
    left: "Leaf | Split"
    right: "Leaf | Split"


@dataclass(frozen=True, slots=True)
class TrainedTree:
    root: Leaf | Split
    max_depth: int
    classes: tuple[int, ...]
    n_samples: int


@dataclass(frozen=True, slots=True)
class DecisionPath:
    predicate: DataPredicate
    predicted_class: int


def _leaf(counts: np.ndarray, classes: Sequence[int]) -> Leaf:
    majority = classes[int(np.argmax(counts))]  # argmax tie → smallest class
    pairs = tuple(
        (classes[c], int(counts[c])) for c in range(len(classes)) if counts[c] > 0
    )
    return Leaf(majority, pairs)


_MISSING_CAT = ""


def fit(
    rows: Sequence[tuple[Mapping[str, object], int]],
    max_depth: int,
    seed: int = 0,
) -> TrainedTree:
    """Fit on (feature map, class) rows.

    ``seed`` is accepted for interface stability; the algorithm is fully
    deterministic through its tie-breaking rules and never draws from it.
    """
    del seed
    if not rows:
        raise ValueError("cannot fit a tree on zero rows")
    if max_depth < 0:
        raise ValueError(f"max_depth must be >= 0, got {max_depth}")
    classes = tuple(sorted({label for _, label in rows}))
    class_index = {label: i for i, label in enumerate(classes)}
    y = np.array([class_index[label] for _, label in rows], dtype=np.int64)
    n = len(rows)

    categorical: set[str] = set()
    numeric: set[str] = set()
    for features, _ in rows:
        for key, value in features.items():
            if isinstance(value, str):
                categorical.add(key)
            else:
                numeric.add(key)
    clash = categorical & numeric
    if clash:
        raise ValueError(f"feature keys mix strings and numbers: {sorted(clash)}")

    num_keys = sorted(numeric)
    num_col = {key: i for i, key in enumerate(num_keys)}
    X = np.zeros((n, len(num_keys)), dtype=np.float64)
    for i, (features, _) in enumerate(rows):
        for key, value in features.items():
            if key in num_col:
                X[i, num_col[key]] = float(value)  # missing keys stay 0
    cat_values = {
        key: np.array([str(features.get(key, _MISSING_CAT)) for features, _ in rows])
        for key in sorted(categorical)
    }
    all_keys = sorted(numeric | categorical)
    k = len(classes)

    def grow(idx: np.ndarray, depth: int) -> Leaf | Split:
        counts = np.bincount(y[idx], minlength=k)
        if depth >= max_depth or idx.size < 2 or counts.max() == idx.size:
            return _leaf(counts, classes)
        best_gini = np.inf
        best: tuple[str, object] | None = None
        for key in all_keys:
            if key in num_col:
                gini, thr, ok = _numeric_split(
                    np.ascontiguousarray(X[idx, num_col[key]]), y[idx], k
                )
                if ok and gini < best_gini:
                    best_gini, best = gini, (key, float(thr))
            else:
                vals = cat_values[key][idx]
                n_here = float(idx.size)
                for v in np.unique(vals):
                    mask = vals == v
                    left = np.bincount(y[idx][mask], minlength=k)
                    nl = float(left.sum())
                    if nl == 0.0 or nl == n_here:
                        continue
                    right = counts - left
                    nr = n_here - nl
                    sl = float(np.sum(left * left))
                    sr = float(np.sum(right * right))
                    gini = (nl - sl / nl + nr - sr / nr) / n_here
                    if gini < best_gini:
                        best_gini, best = gini, (key, str(v))
        if best is None:
            return _leaf(counts, classes)
        key, pivot = best
        if isinstance(pivot, float):
            mask = X[idx, num_col[key]] <= pivot
            node = Split(key, pivot, None, grow(idx[mask], depth + 1), grow(idx[~mask], depth + 1))
        else:
            mask = cat_values[key][idx] == pivot
            node = Split(key, None, pivot, grow(idx[mask], depth + 1), grow(idx[~mask], depth + 1))
        return node

    root = grow(np.arange(n), 0)
    return TrainedTree(root, max_depth, classes, n)


def fit_ternary(
    frame: np.ndarray,
    keys: Sequence[str],
    labels: Sequence[int],
    max_depth: int,
    seed: int = 0,
) -> TrainedTree:
    """Fast path for {−1,0,+1} matrices: same tree as ``fit`` on dict rows.

    ``keys`` must be sorted ascending — column order is the tie-break order.
    """
    del seed
    frame = np.ascontiguousarray(frame, dtype=np.int8)
    n, m = frame.shape
    if n == 0:
        raise ValueError("cannot fit a tree on zero rows")
    if list(keys) != sorted(keys) or len(keys) != m:
        raise ValueError("keys must be sorted and match the frame's columns")
    classes = tuple(sorted(set(labels)))
    class_index = {label: i for i, label in enumerate(classes)}
    y = np.array([class_index[label] for label in labels], dtype=np.int64)
    k = len(classes)
    onehot = np.zeros((n, k), dtype=np.int64)
    onehot[np.arange(n), y] = 1

    def grow(idx: np.ndarray, depth: int) -> Leaf | Split:
        counts = np.bincount(y[idx], minlength=k)
        if depth >= max_depth or idx.size < 2 or counts.max() == idx.size or m == 0:
            return _leaf(counts, classes)
        gini, thr, valid = _ternary_split(frame[idx], onehot[idx])
        gini = np.where(valid, gini, np.inf)
        col = int(np.argmin(gini))  # first minimum = smallest key
        if not valid[col]:
            return _leaf(counts, classes)
        pivot = float(thr[col])
        mask = frame[idx, col] <= pivot
        return Split(
            keys[col], pivot, None, grow(idx[mask], depth + 1), grow(idx[~mask], depth + 1)
        )

    root = grow(np.arange(n), 0)
    return TrainedTree(root, max_depth, classes, n)


def _route(node: Leaf | Split, row: Mapping[str, object]) -> Leaf:
    while isinstance(node, Split):
        if node.category is not None:
            value = row.get(node.feature, _MISSING_CAT)
            node = node.left if value == node.category else node.right
        else:
            value = row.get(node.feature, 0.0)
            if isinstance(value, str):
                value = 0.0
            node = node.left if float(value) <= node.threshold else node.right
    return node


def predict(tree: TrainedTree, row: Mapping[str, object]) -> int:
    return _route(tree.root, row).klass


def accuracy(tree: TrainedTree, rows: Sequence[tuple[Mapping[str, object], int]]) -> float:
    if not rows:
        raise ValueError("accuracy needs at least one row")
    hits = sum(1 for features, label in rows if predict(tree, features) == label)
    return hits / len(rows)


def purity(tree: TrainedTree) -> float:
    """Sample-weighted mean of leaf majority fractions."""
    weighted = 0
    total = 0
    stack = [tree.root]
    while stack:
        node = stack.pop()
        if isinstance(node, Split):
            stack.append(node.left)
            stack.append(node.right)
        else:
            weighted += max(count for _, count in node.counts)
            total += sum(count for _, count in node.counts)
    return weighted / total


def paths(tree: TrainedTree) -> list[DecisionPath]:
    """One (conjunction, class) per leaf, in left-to-right order."""
    out: list[DecisionPath] = []

    def walk(node: Leaf | Split, conditions: tuple) -> None:
        if isinstance(node, Leaf):
            out.append(DecisionPath(DataPredicate((conditions,)), node.klass))
            return
        if node.category is not None:
            walk(node.left, conditions + ((node.feature, "=", node.category),))
            walk(node.right, conditions + ((node.feature, "!=", node.category),))
        else:
            walk(node.left, conditions + ((node.feature, "<=", node.threshold),))
            walk(node.right, conditions + ((node.feature, ">", node.threshold),))

    walk(tree.root, ())
    return out


def class_formula(tree: TrainedTree, klass: int) -> DataPredicate:
    """Disjunction of the path predicates predicting ``klass``."""
    disjuncts = tuple(
        p.predicate.disjuncts[0] for p in paths(tree) if p.predicted_class == klass
    )
    if not disjuncts:
        return FALSE_PREDICATE
    return DataPredicate(disjuncts)


def _node_to_obj(node: Leaf | Split) -> dict:
    if isinstance(node, Leaf):
        return {"class": node.klass, "counts": {str(c): n for c, n in node.counts}}
    obj: dict = {"feature": node.feature}
    if node.category is not None:
        obj["category"] = node.category
    else:
        obj["threshold"] = node.threshold
    obj["left"] = _node_to_obj(node.left)
    obj["right"] = _node_to_obj(node.right)
    return obj


def to_json(tree: TrainedTree) -> dict:
    return {
        "max_depth": tree.max_depth,
        "classes": list(tree.classes),
        "n_samples": tree.n_samples,
        "root": _node_to_obj(tree.root),
    }


def _node_from_obj(obj: dict) -> Leaf | Split:
    if "feature" in obj:
        return Split(
            obj["feature"],
            obj.get("threshold"),
            obj.get("category"),
            _node_from_obj(obj["left"]),
            _node_from_obj(obj["right"]),
        )
    counts = tuple(sorted((int(c), int(n)) for c, n in obj["counts"].items()))
    return Leaf(obj["class"], counts)


def from_json(obj: dict) -> TrainedTree:
    return TrainedTree(
        _node_from_obj(obj["root"]),
        int(obj["max_depth"]),
        tuple(int(c) for c in obj["classes"]),
        int(obj["n_samples"]),
    )
