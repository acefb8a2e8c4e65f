"""Gradient-boosted decision trees over feature histograms.

Binary problems are fit with logistic loss, multiclass ones with softmax
cross-entropy and one tree ensemble per class. Trees grow leaf by leaf,
always splitting the leaf with the highest gain, with split candidates
taken from at most `n_bins` per-feature histogram bins. Ties between
candidate splits break toward the lowest feature index and then the
lowest threshold, which makes training deterministic.
"""

from __future__ import annotations

import json
import math

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .errors import DegenerateDataError, ShapeError
from .validation import check_matrix, check_vector

_EPS = 1e-16


def _bin_features(X: np.ndarray, n_bins: int):
    """Per-feature upper bin edges and the binned (integer) matrix.

    Edges are midpoints between consecutive distinct values; when a
    feature has more distinct values than bins, boundaries fall on
    evenly spaced quantiles of the distinct values.
    """
    n_rows, n_features = X.shape
    edges = []
    binned = np.empty((n_rows, n_features), dtype=np.int32)
    for j in range(n_features):
        distinct = np.unique(X[:, j])
        if len(distinct) <= 1:
            cut = np.empty(0, dtype=np.float64)
        elif len(distinct) <= n_bins:
            cut = (distinct[:-1] + distinct[1:]) / 2.0
        else:
            qs = np.linspace(0, 1, n_bins + 1)[1:-1]
            cut = np.unique(np.quantile(distinct, qs))
        edges.append(cut)
        binned[:, j] = np.searchsorted(cut, X[:, j], side="left")
    return edges, binned


class _Tree:
    """One regression tree stored as parallel node arrays."""

    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def add_leaf(self, value: float) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.value) - 1

    def split_node(self, node: int, feature: int, threshold: float,
                   left_value: float, right_value: float) -> tuple[int, int]:
        left = self.add_leaf(left_value)
        right = self.add_leaf(right_value)
        self.feature[node] = feature
        self.threshold[node] = threshold
        self.left[node] = left
        self.right[node] = right
        return left, right

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[0])
        for i, row in enumerate(X):
            node = 0
            while self.feature[node] >= 0:
                if row[self.feature[node]] <= self.threshold[node]:
                    node = self.left[node]
                else:
                    node = self.right[node]
            out[i] = self.value[node]
        return out

    def to_dict(self) -> dict:
        return {"feature": self.feature, "threshold": self.threshold,
                "left": self.left, "right": self.right, "value": self.value}

    @classmethod
    def from_dict(cls, data: dict) -> "_Tree":
        tree = cls()
        tree.feature = list(data["feature"])
        tree.threshold = [float(t) for t in data["threshold"]]
        tree.left = list(data["left"])
        tree.right = list(data["right"])
        tree.value = [float(v) for v in data["value"]]
        return tree


class _LeafState:
    """Bookkeeping for a growable leaf during training."""

    __slots__ = ("node", "rows", "best_gain", "best_feature", "best_bin",
                 "left_rows", "right_rows", "left_value", "right_value")

    def __init__(self, node: int, rows: np.ndarray):
        self.node = node
        self.rows = rows
        self.best_gain = 0.0
        self.best_feature = -1
        self.best_bin = -1


def _leaf_objective(g_sum: float, h_sum: float, reg_lambda: float) -> float:
    return (g_sum * g_sum) / (h_sum + reg_lambda + _EPS)


def _find_best_split(leaf: _LeafState, binned: np.ndarray, grad: np.ndarray,
                     hess: np.ndarray, edges, min_samples_leaf: int,
                     reg_lambda: float) -> None:
    rows = leaf.rows
    g_total = float(grad[rows].sum())
    h_total = float(hess[rows].sum())
    parent = _leaf_objective(g_total, h_total, reg_lambda)
    best = (0.0, -1, -1)
    for j in range(binned.shape[1]):
        cut = edges[j]
        if len(cut) == 0:
            continue
        b = binned[rows, j]
        n_b = len(cut) + 1
        counts = np.bincount(b, minlength=n_b)
        g_hist = np.bincount(b, weights=grad[rows], minlength=n_b)
        h_hist = np.bincount(b, weights=hess[rows], minlength=n_b)
        count_left = np.cumsum(counts)[:-1]
        g_left = np.cumsum(g_hist)[:-1]
        h_left = np.cumsum(h_hist)[:-1]
        count_right = len(rows) - count_left
        ok = (count_left >= min_samples_leaf) & (count_right >= min_samples_leaf)
        if not ok.any():
            continue
        gains = (
            (g_left ** 2) / (h_left + reg_lambda + _EPS)
            + ((g_total - g_left) ** 2) / ((h_total - h_left) + reg_lambda + _EPS)
            - parent
        )
        gains[~ok] = -np.inf
        k = int(np.argmax(gains))
        if gains[k] > best[0]:
            best = (float(gains[k]), j, k)
    leaf.best_gain, leaf.best_feature, leaf.best_bin = best
    if leaf.best_feature >= 0:
        b = binned[rows, leaf.best_feature]
        mask = b <= leaf.best_bin
        leaf.left_rows = rows[mask]
        leaf.right_rows = rows[~mask]
        for side, attr in ((leaf.left_rows, "left_value"), (leaf.right_rows, "right_value")):
            g = float(grad[side].sum())
            h = float(hess[side].sum())
            setattr(leaf, attr, -g / (h + reg_lambda + _EPS))


def _grow_tree(binned: np.ndarray, grad: np.ndarray, hess: np.ndarray, edges,
               learning_rate: float, max_leaves: int, min_samples_leaf: int,
               reg_lambda: float) -> _Tree:
    tree = _Tree()
    all_rows = np.arange(binned.shape[0])
    root_value = -float(grad.sum()) / (float(hess.sum()) + reg_lambda + _EPS)
    root = tree.add_leaf(root_value * learning_rate)
    frontier = [_LeafState(root, all_rows)]
    _find_best_split(frontier[0], binned, grad, hess, edges,
                     min_samples_leaf, reg_lambda)
    n_leaves = 1
    while n_leaves < max_leaves:
        candidates = [leaf for leaf in frontier if leaf.best_gain > 0.0]
        if not candidates:
            break
        # highest gain; ties toward lowest feature then lowest threshold bin
        winner = min(candidates,
                     key=lambda s: (-s.best_gain, s.best_feature, s.best_bin))
        frontier.remove(winner)
        threshold = float(edges[winner.best_feature][winner.best_bin])
        left_node, right_node = tree.split_node(
            winner.node, winner.best_feature, threshold,
            winner.left_value * learning_rate, winner.right_value * learning_rate)
        for node, rows in ((left_node, winner.left_rows),
                           (right_node, winner.right_rows)):
            child = _LeafState(node, rows)
            _find_best_split(child, binned, grad, hess, edges,
                             min_samples_leaf, reg_lambda)
            frontier.append(child)
        n_leaves += 1
    return tree


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class GradientBoostingClassifier(ClassifierMixin, BaseEstimator):
    """Histogram-based boosted trees with a scikit-learn estimator surface.

    Defaults mirror the common conventions for this model family:
    100 trees, learning rate 0.1, at most 31 leaves per tree, 20 samples
    per leaf, 255 histogram bins.
    """

    def __init__(self, n_trees=100, learning_rate=0.1, max_leaves=31,
                 min_samples_leaf=20, n_bins=255, reg_lambda=0.0,
                 random_state=0):
        self.n_trees = n_trees
        self.learning_rate = learning_rate
        self.max_leaves = max_leaves
        self.min_samples_leaf = min_samples_leaf
        self.n_bins = n_bins
        self.reg_lambda = reg_lambda
        self.random_state = random_state

    def fit(self, X, y, sample_weight=None):
        X = check_matrix(X)
        y = check_vector(y)
        if X.shape[0] != len(y):
            raise ShapeError(f"{X.shape[0]} rows but {len(y)} labels")
        if X.shape[0] < 2:
            raise DegenerateDataError("need at least two training rows")
        self.classes_ = np.unique(y)
        if len(self.classes_) < 2:
            raise DegenerateDataError("training labels contain a single class")
        if sample_weight is None:
            sample_weight = np.ones(len(y))
        else:
            sample_weight = np.asarray(sample_weight, dtype=np.float64)
            if len(sample_weight) != len(y):
                raise ShapeError("sample_weight length mismatch")

        self.n_features_in_ = X.shape[1]
        y_idx = np.searchsorted(self.classes_, y)
        n_classes = len(self.classes_)
        edges, binned = _bin_features(X, self.n_bins)

        counts = np.bincount(y_idx, weights=sample_weight, minlength=n_classes)
        priors = counts / counts.sum()
        priors = np.clip(priors, 1e-12, 1.0)

        self.train_losses_ = []
        if n_classes == 2:
            self.base_score_ = [float(np.log(priors[1] / priors[0]))]
            raw = np.full(len(y), self.base_score_[0])
            target = (y_idx == 1).astype(np.float64)
            self.trees_ = [[]]
            for _ in range(self.n_trees):
                p = _sigmoid(raw)
                grad = (p - target) * sample_weight
                hess = np.maximum(p * (1.0 - p), _EPS) * sample_weight
                tree = _grow_tree(binned, grad, hess, edges, self.learning_rate,
                                  self.max_leaves, self.min_samples_leaf,
                                  self.reg_lambda)
                self.trees_[0].append(tree)
                raw += tree.predict(X)
                self.train_losses_.append(self._logloss_binary(raw, target,
                                                               sample_weight))
        else:
            self.base_score_ = [float(np.log(p)) for p in priors]
            raw = np.tile(self.base_score_, (len(y), 1))
            onehot = np.eye(n_classes)[y_idx]
            self.trees_ = [[] for _ in range(n_classes)]
            for _ in range(self.n_trees):
                p = _softmax(raw)
                for k in range(n_classes):
                    grad = (p[:, k] - onehot[:, k]) * sample_weight
                    hess = np.maximum(p[:, k] * (1.0 - p[:, k]), _EPS) * sample_weight
                    tree = _grow_tree(binned, grad, hess, edges,
                                      self.learning_rate, self.max_leaves,
                                      self.min_samples_leaf, self.reg_lambda)
                    self.trees_[k].append(tree)
                    raw[:, k] += tree.predict(X)
                self.train_losses_.append(self._logloss_multi(raw, y_idx,
                                                              sample_weight))
        return self

    @staticmethod
    def _logloss_binary(raw, target, weight):
        p = np.clip(_sigmoid(raw), 1e-15, 1 - 1e-15)
        ll = -(target * np.log(p) + (1 - target) * np.log(1 - p))
        return float((ll * weight).sum() / weight.sum())

    @staticmethod
    def _logloss_multi(raw, y_idx, weight):
        p = np.clip(_softmax(raw), 1e-15, 1.0)
        ll = -np.log(p[np.arange(len(y_idx)), y_idx])
        return float((ll * weight).sum() / weight.sum())

    def _raw_scores(self, X: np.ndarray) -> np.ndarray:
        n_ensembles = len(self.trees_)
        raw = np.tile(self.base_score_, (X.shape[0], 1))
        for k in range(n_ensembles):
            for tree in self.trees_[k]:
                raw[:, k] += tree.predict(X)
        return raw

    def predict_proba(self, X) -> np.ndarray:
        X = check_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ShapeError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}")
        raw = self._raw_scores(X)
        if len(self.classes_) == 2:
            p1 = _sigmoid(raw[:, 0])
            return np.column_stack([1.0 - p1, p1])
        return _softmax(raw)

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    # ------------------------------------------------------------------
    # JSON serialization: enough to reload bit-exact predictions.
    # ------------------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({
            "params": self.get_params(),
            "classes": [int(c) for c in self.classes_],
            "n_features": self.n_features_in_,
            "base_score": self.base_score_,
            "trees": [[t.to_dict() for t in ensemble] for ensemble in self.trees_],
        })

    @classmethod
    def from_json(cls, blob: str) -> "GradientBoostingClassifier":
        data = json.loads(blob)
        model = cls(**data["params"])
        model.classes_ = np.asarray(data["classes"])
        model.n_features_in_ = data["n_features"]
        model.base_score_ = [float(b) for b in data["base_score"]]
        model.trees_ = [[_Tree.from_dict(t) for t in ensemble]
                        for ensemble in data["trees"]]
        model.train_losses_ = []
        return model
