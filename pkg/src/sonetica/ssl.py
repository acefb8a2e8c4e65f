"""Semi-supervised strategies: graph label spreading, self-training,
spread-pretraining with optional minority oversampling.

All operations are deterministic given their inputs and seed; rows marked
with `UNLABELED` (-1) carry no label.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, clone

from .errors import DegenerateProblemError, KernelError, TooFewSamplesError
from .validation import check_matrix, check_vector

UNLABELED = -1


@dataclass(frozen=True)
class SslProblem:
    """Feature matrix with a partially labeled target vector."""

    X: np.ndarray
    y: np.ndarray
    labeled_ids: np.ndarray
    unlabeled_ids: np.ndarray

    def __post_init__(self):
        n = self.X.shape[0]
        merged = np.concatenate([self.labeled_ids, self.unlabeled_ids])
        if len(merged) != n or len(np.unique(merged)) != n:
            raise DegenerateProblemError("labeled/unlabeled ids must partition rows")
        if len(self.labeled_ids) == 0:
            raise DegenerateProblemError("no labeled rows")
        if len(np.unique(self.y[self.labeled_ids])) < 2:
            raise DegenerateProblemError("labeled rows contain a single class")

    @classmethod
    def from_labels(cls, X, y) -> "SslProblem":
        """Build a problem from a label vector using the UNLABELED marker."""
        X = check_matrix(X)
        y = check_vector(y).astype(np.int64)
        labeled = np.flatnonzero(y != UNLABELED)
        unlabeled = np.flatnonzero(y == UNLABELED)
        return cls(X=X, y=y, labeled_ids=labeled, unlabeled_ids=unlabeled)

    @property
    def classes(self) -> np.ndarray:
        return np.unique(self.y[self.labeled_ids])


@dataclass(frozen=True)
class SpreadResult:
    F: np.ndarray
    hard_labels: np.ndarray
    n_iter: int
    converged: bool
    defaulted_rows: np.ndarray  # disconnected rows filled with the majority label


def _rbf_affinity(X: np.ndarray, gamma: float) -> np.ndarray:
    sq = np.sum(X ** 2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    W = np.exp(-gamma * d2)
    np.fill_diagonal(W, 0.0)
    return W


def _knn_affinity(X: np.ndarray, k: int) -> np.ndarray:
    n = X.shape[0]
    if k >= n:
        raise KernelError(f"knn needs k < n, got k={k} with n={n}")
    sq = np.sum(X ** 2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.fill_diagonal(d2, np.inf)
    W = np.zeros((n, n))
    for i in range(n):
        nearest = np.argsort(d2[i], kind="stable")[:k]
        W[i, nearest] = 1.0
    return np.maximum(W, W.T)


def build_affinity(X: np.ndarray, kernel: str, gamma: float = 20.0,
                   k: int = 7) -> np.ndarray:
    if kernel == "rbf":
        return _rbf_affinity(X, gamma)
    if kernel == "knn":
        return _knn_affinity(X, k)
    raise KernelError(f"unknown kernel {kernel!r}")


def label_spreading(problem: SslProblem, kernel: str = "rbf",
                    gamma: float = 20.0, k: int = 7, alpha: float = 0.2,
                    max_iter: int = 30, tol: float = 1e-3) -> SpreadResult:
    """Diffuse labels over the normalized affinity graph with soft clamping.

    Iterates F <- alpha*S*F + (1-alpha)*Y from the one-hot seed matrix Y,
    with S the symmetrically normalized affinity, until the largest entry
    change drops below `tol` or `max_iter` sweeps. Rows are normalized to
    distributions at the end; rows that no label mass can reach fall back
    to the global majority label.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    X, y = problem.X, problem.y
    classes = problem.classes
    W = build_affinity(X, kernel, gamma=gamma, k=k)
    degree = W.sum(axis=1)
    inv_sqrt = np.zeros_like(degree)
    positive = degree > 0
    inv_sqrt[positive] = 1.0 / np.sqrt(degree[positive])
    S = W * inv_sqrt[:, None] * inv_sqrt[None, :]

    Y = np.zeros((len(y), len(classes)))
    for idx in problem.labeled_ids:
        Y[idx, np.searchsorted(classes, y[idx])] = 1.0

    F = Y.copy()
    n_iter = 0
    converged = False
    for n_iter in range(1, max_iter + 1):
        F_next = alpha * (S @ F) + (1.0 - alpha) * Y
        delta = np.abs(F_next - F).max()
        F = F_next
        if delta < tol:
            converged = True
            break

    row_sums = F.sum(axis=1)
    reached = row_sums > 0
    F_norm = np.zeros_like(F)
    F_norm[reached] = F[reached] / row_sums[reached, None]

    labeled_idx = np.searchsorted(classes, y[problem.labeled_ids])
    majority = int(np.argmax(np.bincount(labeled_idx, minlength=len(classes))))
    defaulted = ~reached
    F_norm[defaulted, majority] = 1.0

    hard = classes[np.argmax(F_norm, axis=1)]
    return SpreadResult(F=F_norm, hard_labels=hard, n_iter=n_iter,
                        converged=converged, defaulted_rows=defaulted)


def self_train(base, problem: SslProblem, threshold: float = 0.75,
               max_iter: int = 10):
    """Pseudo-label confident unlabeled rows and refit until stable.

    Returns a fresh fitted clone of `base`; original labels are never
    overwritten and the labeled pool only grows.
    """
    if not 0.5 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0.5, 1], got {threshold}")
    X = problem.X
    y = problem.y.copy()
    labeled = list(problem.labeled_ids)
    unlabeled = list(problem.unlabeled_ids)
    model = clone(base)
    for _ in range(max_iter):
        model.fit(X[labeled], y[labeled])
        if not unlabeled:
            return model
        probs = model.predict_proba(X[unlabeled])
        confident = probs.max(axis=1) >= threshold
        if not confident.any():
            return model
        picked = np.asarray(unlabeled)[confident]
        y[picked] = model.classes_[np.argmax(probs[confident], axis=1)]
        labeled.extend(picked.tolist())
        unlabeled = [u for u, c in zip(unlabeled, confident) if not c]
    model.fit(X[labeled], y[labeled])
    return model


def smote(X_minority, k: int, n_synthetic: int, rng: np.random.Generator):
    """Synthesize minority points on segments toward nearest neighbors.

    Each synthetic point is x + u*(x_nn - x) with u uniform in [0, 1),
    x a random minority row and x_nn one of its min(k, n-1) nearest
    minority neighbors.
    """
    X = check_matrix(X_minority)
    n = X.shape[0]
    if n < 2:
        raise TooFewSamplesError("smote needs at least two minority rows")
    if k < 1:
        raise ValueError("k must be >= 1")
    k_eff = min(k, n - 1)
    sq = np.sum(X ** 2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.fill_diagonal(d2, np.inf)
    neighbors = np.argsort(d2, axis=1, kind="stable")[:, :k_eff]
    out = np.empty((n_synthetic, X.shape[1]))
    for s in range(n_synthetic):
        i = int(rng.integers(n))
        j = int(neighbors[i, rng.integers(k_eff)])
        u = rng.random()
        out[s] = X[i] + u * (X[j] - X[i])
    return out


def oversample_to_majority(X, y, k: int, rng: np.random.Generator):
    """Equalize class counts by SMOTE up to the majority class size.

    Classes with fewer than two rows cannot be interpolated and are left
    as-is with a warning.
    """
    X = check_matrix(X)
    y = check_vector(y)
    classes, counts = np.unique(y, return_counts=True)
    majority = counts.max()
    parts_X, parts_y = [X], [y]
    for cls, count in zip(classes, counts):
        deficit = int(majority - count)
        if deficit == 0:
            continue
        rows = X[y == cls]
        if len(rows) < 2:
            warnings.warn(
                f"class {cls!r} has {len(rows)} row(s); skipping oversampling")
            continue
        synthetic = smote(rows, k, deficit, rng)
        parts_X.append(synthetic)
        parts_y.append(np.full(deficit, cls, dtype=y.dtype))
    return np.vstack(parts_X), np.concatenate(parts_y)


def ls_pretrain_pipeline(problem: SslProblem, base, kernel: str = "rbf",
                         gamma: float = 20.0, k: int = 7, alpha: float = 0.2,
                         use_smote: bool = False, smote_k: int = 5,
                         seed: int = 0, spread_max_iter: int = 30,
                         spread_tol: float = 1e-3):
    """Spread labels over the graph, then fit `base` on all spread rows.

    With `use_smote`, minority classes among the spread labels are
    oversampled to the majority count before the supervised fit.
    """
    spread = label_spreading(problem, kernel=kernel, gamma=gamma, k=k,
                             alpha=alpha, max_iter=spread_max_iter,
                             tol=spread_tol)
    X_train, y_train = problem.X, spread.hard_labels
    if use_smote:
        rng = np.random.default_rng(seed)
        X_train, y_train = oversample_to_majority(X_train, y_train, smote_k, rng)
    model = clone(base)
    model.fit(X_train, y_train)
    return model


# ---------------------------------------------------------------------------
# Estimator wrappers so the strategies compose like any other classifier.
# ---------------------------------------------------------------------------


class LabelSpreading(BaseEstimator):
    """Transductive estimator face of `label_spreading`."""

    def __init__(self, kernel="rbf", gamma=20.0, n_neighbors=7, alpha=0.2,
                 max_iter=30, tol=1e-3):
        self.kernel = kernel
        self.gamma = gamma
        self.n_neighbors = n_neighbors
        self.alpha = alpha
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y):
        problem = SslProblem.from_labels(X, y)
        result = label_spreading(problem, kernel=self.kernel, gamma=self.gamma,
                                 k=self.n_neighbors, alpha=self.alpha,
                                 max_iter=self.max_iter, tol=self.tol)
        self.classes_ = problem.classes
        self.label_distributions_ = result.F
        self.transduction_ = result.hard_labels
        self.n_iter_ = result.n_iter
        self.converged_ = result.converged
        self.defaulted_rows_ = result.defaulted_rows
        return self


class SelfTrainingClassifier(ClassifierMixin, BaseEstimator):
    def __init__(self, base_estimator=None, threshold=0.75, max_iter=10):
        self.base_estimator = base_estimator
        self.threshold = threshold
        self.max_iter = max_iter

    def fit(self, X, y):
        problem = SslProblem.from_labels(X, y)
        self.model_ = self_train(self.base_estimator, problem,
                                 threshold=self.threshold,
                                 max_iter=self.max_iter)
        self.classes_ = self.model_.classes_
        return self

    def predict_proba(self, X):
        return self.model_.predict_proba(X)

    def predict(self, X):
        return self.model_.predict(X)


class SpreadPretrainClassifier(ClassifierMixin, BaseEstimator):
    def __init__(self, base_estimator=None, kernel="rbf", gamma=20.0,
                 n_neighbors=7, alpha=0.2, use_smote=False, smote_k=5,
                 spread_max_iter=30, spread_tol=1e-3, random_state=0):
        self.base_estimator = base_estimator
        self.kernel = kernel
        self.gamma = gamma
        self.n_neighbors = n_neighbors
        self.alpha = alpha
        self.use_smote = use_smote
        self.smote_k = smote_k
        self.spread_max_iter = spread_max_iter
        self.spread_tol = spread_tol
        self.random_state = random_state

    def fit(self, X, y):
        problem = SslProblem.from_labels(X, y)
        self.model_ = ls_pretrain_pipeline(
            problem, self.base_estimator, kernel=self.kernel, gamma=self.gamma,
            k=self.n_neighbors, alpha=self.alpha, use_smote=self.use_smote,
            smote_k=self.smote_k, seed=self.random_state,
            spread_max_iter=self.spread_max_iter, spread_tol=self.spread_tol)
        self.classes_ = self.model_.classes_
        return self

    def predict_proba(self, X):
        return self.model_.predict_proba(X)

    def predict(self, X):
        return self.model_.predict(X)
