"""Classification metrics and the paired statistical test used to compare
pipelines across cross-validation repeats.
"""

from __future__ import annotations

import math
from statistics import NormalDist

import numpy as np

from .errors import (
    DomainError,
    LengthMismatchError,
    SingleClassError,
    TooFewPairsError,
)
from .validation import check_vector


def _check_lengths(a, b):
    a, b = check_vector(a), check_vector(b)
    if len(a) != len(b):
        raise LengthMismatchError(f"{len(a)} vs {len(b)} values")
    if len(a) == 0:
        raise LengthMismatchError("empty inputs")
    return a, b


def f1_weighted(y_true, y_pred) -> float:
    """Support-weighted mean of per-class F1 scores.

    A class with no true positives scores 0 regardless of how the zero
    numerator arose.
    """
    y_true, y_pred = _check_lengths(y_true, y_pred)
    total = 0.0
    for cls in np.unique(y_true):
        support = int(np.sum(y_true == cls))
        tp = int(np.sum((y_true == cls) & (y_pred == cls)))
        fp = int(np.sum((y_true != cls) & (y_pred == cls)))
        fn = support - tp
        f1 = 2.0 * tp / (2 * tp + fp + fn) if tp > 0 else 0.0
        total += support * f1
    return total / len(y_true)


def cohens_kappa(y_true, y_pred) -> float:
    """Chance-corrected agreement (p_o - p_e) / (1 - p_e); 0 when p_e is 1."""
    y_true, y_pred = _check_lengths(y_true, y_pred)
    classes = np.unique(np.concatenate([y_true, y_pred]))
    n = len(y_true)
    p_obs = float(np.mean(y_true == y_pred))
    p_exp = 0.0
    for cls in classes:
        p_exp += (np.sum(y_true == cls) / n) * (np.sum(y_pred == cls) / n)
    if p_exp == 1.0:
        return 0.0
    return (p_obs - p_exp) / (1.0 - p_exp)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def auc_binary(y_true, scores) -> float:
    """Probability a positive outranks a negative, ties counted half."""
    y_true, scores = _check_lengths(y_true, np.asarray(scores, dtype=np.float64))
    classes = np.unique(y_true)
    if len(classes) != 2:
        raise SingleClassError(f"need exactly two classes, got {len(classes)}")
    positive = y_true == classes[1]
    n_pos = int(positive.sum())
    n_neg = len(y_true) - n_pos
    ranks = _average_ranks(scores)
    rank_sum = float(ranks[positive].sum())
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def auc_multiclass(y_true, prob_matrix, classes=None) -> float:
    """Macro mean of one-vs-rest AUCs over the classes present in y_true."""
    y_true = check_vector(y_true)
    probs = np.asarray(prob_matrix, dtype=np.float64)
    if probs.ndim != 2 or probs.shape[0] != len(y_true):
        raise LengthMismatchError("probability matrix shape mismatch")
    if np.abs(probs.sum(axis=1) - 1.0).max() > 1e-6:
        raise DomainError("probability rows must sum to 1")
    if classes is None:
        classes = np.unique(y_true)
    classes = np.asarray(classes)
    present = np.unique(y_true)
    if len(present) < 2:
        raise SingleClassError("need at least two observed classes")
    aucs = []
    for cls in present:
        col = int(np.flatnonzero(classes == cls)[0])
        aucs.append(auc_binary((y_true == cls).astype(int), probs[:, col]))
    return float(np.mean(aucs))


def _exact_wilcoxon_p(ranks: np.ndarray, w_min: float) -> float:
    """Exact two-sided tail by convolving the doubled-rank distribution."""
    doubled = np.rint(ranks * 2).astype(np.int64)
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    upper = 0
    for r in doubled:
        counts[r:upper + r + 1] += counts[0:upper + 1]
        upper += r
    cdf = float(counts[: int(round(w_min * 2)) + 1].sum() / counts.sum())
    return min(1.0, 2.0 * cdf)


def wilcoxon_signed_rank(a, b) -> tuple[float, float]:
    """Two-sided signed-rank test on paired samples.

    Zero differences are discarded and tied magnitudes get average ranks.
    The statistic is min(W+, W-). The p-value is exact (full null
    distribution) for up to 12 nonzero pairs and a tie-corrected normal
    approximation beyond; with fewer than 5 pairs the test cannot reach
    conventional significance.
    """
    a, b = _check_lengths(a, b)
    diffs = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    diffs = diffs[diffs != 0.0]
    n = len(diffs)
    if n == 0:
        raise TooFewPairsError("all paired differences are zero")
    magnitudes = np.abs(diffs)
    ranks = _average_ranks(magnitudes)
    w_plus = float(ranks[diffs > 0].sum())
    w_minus = float(ranks[diffs < 0].sum())
    statistic = min(w_plus, w_minus)
    if n <= 12:
        p_value = _exact_wilcoxon_p(ranks, statistic)
    else:
        mu = n * (n + 1) / 4.0
        var = n * (n + 1) * (2 * n + 1) / 24.0
        _, tie_counts = np.unique(magnitudes, return_counts=True)
        var -= float(np.sum(tie_counts ** 3 - tie_counts)) / 48.0
        z = (statistic - mu) / math.sqrt(var)
        p_value = min(1.0, 2.0 * NormalDist().cdf(z))
    return statistic, p_value


def min_sample_size(alpha: float, power: float, cohens_d: float) -> int:
    """Two-sample, two-sided normal-approximation minimum group size."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if not 0.0 < power < 1.0:
        raise DomainError(f"power must be in (0, 1), got {power}")
    if cohens_d <= 0.0:
        raise DomainError(f"effect size must be positive, got {cohens_d}")
    z_alpha = NormalDist().inv_cdf(1.0 - alpha / 2.0)
    z_power = NormalDist().inv_cdf(power)
    return math.ceil(2.0 * ((z_alpha + z_power) / cohens_d) ** 2)
