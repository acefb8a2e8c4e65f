import numpy as np
import pytest
from sklearn.base import BaseEstimator, ClassifierMixin

from sonetica.errors import DegenerateProblemError, KernelError, TooFewSamplesError
from sonetica.learners import GradientBoostingClassifier
from sonetica.ssl import (
    SslProblem,
    UNLABELED,
    build_affinity,
    label_spreading,
    ls_pretrain_pipeline,
    oversample_to_majority,
    self_train,
    smote,
)

from oracles import spreading_closed_form


def _normalized(W):
    degree = W.sum(axis=1)
    inv = np.zeros_like(degree)
    inv[degree > 0] = 1.0 / np.sqrt(degree[degree > 0])
    return W * inv[:, None] * inv[None, :]


def _connected(W):
    n = len(W)
    seen = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in np.flatnonzero(W[i] > 0):
            if j not in seen:
                seen.add(j)
                frontier.append(int(j))
    return len(seen) == n


def make_instance(rng, kernel, n=None):
    n = n or int(rng.integers(4, 51))
    X = rng.normal(size=(n, int(rng.integers(1, 5))))
    y = np.full(n, UNLABELED)
    classes = [0, 1] if rng.random() < 0.7 else [0, 1, 2]
    labeled = rng.choice(n, size=len(classes), replace=False)
    for cls, idx in zip(classes, labeled):
        y[idx] = cls
    if kernel == "rbf":
        params = {"gamma": float(rng.uniform(0.05, 2.0))}
    else:
        params = {"k": int(rng.integers(2, max(3, n // 2)))}
    return X, y, params


def diffusion_reaches_all_rows(W, y, alpha=0.2, floor=1e-6):
    """Rows that receive ~zero label mass make the row-normalized
    comparison ill-conditioned for any float implementation; instances
    must be connected in the diffusion sense, not just graph-reachable.
    """
    S = _normalized(W)
    classes = np.unique(y[y != UNLABELED])
    Y = np.zeros((len(y), len(classes)))
    for i, label in enumerate(y):
        if label != UNLABELED:
            Y[i, list(classes).index(label)] = 1.0
    F = (1 - alpha) * np.linalg.inv(np.eye(len(y)) - alpha * S) @ Y
    return float(F.sum(axis=1).min()) >= floor


class TestLabelSpreading:
    def test_disconnected_pairs_inherit_pair_label(self):
        X = np.array([[0.0, 0.0], [0.0, 0.1], [10.0, 10.0], [10.0, 10.1]])
        y = np.array([0, UNLABELED, 1, UNLABELED])
        result = label_spreading(SslProblem.from_labels(X, y), kernel="knn",
                                 k=1, alpha=0.2, max_iter=500, tol=1e-9)
        assert result.hard_labels.tolist() == [0, 0, 1, 1]

    def test_all_labeled_near_clamp_keeps_labels(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(10, 2))
        y = np.array([0, 1] * 5)
        result = label_spreading(SslProblem.from_labels(X, y), kernel="rbf",
                                 gamma=0.5, alpha=0.01, max_iter=2000, tol=1e-12)
        assert result.hard_labels.tolist() == y.tolist()

    @pytest.mark.parametrize("kernel", ["rbf", "knn"])
    def test_matches_closed_form_oracle(self, kernel):
        rng = np.random.default_rng(11)
        done = 0
        while done < 25:
            X, y, params = make_instance(rng, kernel)
            W = build_affinity(X, kernel, **params)
            if not _connected(W) or not diffusion_reaches_all_rows(W, y):
                continue
            problem = SslProblem.from_labels(X, y)
            result = label_spreading(problem, kernel=kernel, alpha=0.2,
                                     max_iter=100000, tol=1e-12, **params)
            expected = spreading_closed_form(
                X, y, problem.classes, _normalized(W), 0.2)
            assert np.abs(result.F - expected).max() < 1e-6
            done += 1

    def test_four_point_rbf_closed_form(self):
        X = np.array([[0.0], [0.2], [1.0], [1.3]])
        y = np.array([0, UNLABELED, 1, UNLABELED])
        problem = SslProblem.from_labels(X, y)
        result = label_spreading(problem, kernel="rbf", gamma=1.0, alpha=0.2,
                                 max_iter=100000, tol=1e-12)
        W = build_affinity(X, "rbf", gamma=1.0)
        expected = spreading_closed_form(X, y, problem.classes,
                                         _normalized(W), 0.2)
        assert np.abs(result.F - expected).max() < 1e-6

    def test_rows_are_distributions(self):
        rng = np.random.default_rng(2)
        X, y, params = make_instance(rng, "rbf", n=30)
        result = label_spreading(SslProblem.from_labels(X, y), kernel="rbf",
                                 **params)
        assert np.abs(result.F.sum(axis=1) - 1.0).max() < 1e-6

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(12, 3))
        y = np.array([0, 1] + [UNLABELED] * 10)
        base = label_spreading(SslProblem.from_labels(X, y), kernel="rbf",
                               gamma=0.8, max_iter=5000, tol=1e-12)
        perm = rng.permutation(12)
        permuted = label_spreading(
            SslProblem.from_labels(X[perm], y[perm]), kernel="rbf", gamma=0.8,
            max_iter=5000, tol=1e-12)
        assert np.allclose(base.F[perm], permuted.F, atol=1e-9)

    def test_affinity_symmetry(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(15, 3))
        W_rbf = build_affinity(X, "rbf", gamma=0.7)
        assert (W_rbf == W_rbf.T).all()
        assert (np.diag(W_rbf) == 0).all()
        W_knn = build_affinity(X, "knn", k=3)
        assert (W_knn == W_knn.T).all()

    def test_single_class_raises(self):
        X = np.zeros((4, 1))
        y = np.array([1, 1, UNLABELED, UNLABELED])
        with pytest.raises(DegenerateProblemError):
            SslProblem.from_labels(X, y)

    def test_knn_k_too_large_raises(self):
        X = np.zeros((4, 1))
        y = np.array([0, 1, UNLABELED, UNLABELED])
        with pytest.raises(KernelError):
            label_spreading(SslProblem.from_labels(X, y), kernel="knn", k=4)

    def test_disconnected_unlabeled_gets_majority(self):
        # three labeled points close together (two of class 0), one far
        # unlabeled point with no neighbors
        X = np.array([[0.0], [0.1], [0.2], [100.0]])
        y = np.array([0, 0, 1, UNLABELED])
        result = label_spreading(SslProblem.from_labels(X, y), kernel="rbf",
                                 gamma=5.0, max_iter=200)
        assert result.defaulted_rows.tolist() == [False, False, False, True]
        assert result.hard_labels[3] == 0


class _ConstantProba(ClassifierMixin, BaseEstimator):
    """Predicts fixed sub-threshold probabilities; fit only records data."""

    def __init__(self, peak=0.6):
        self.peak = peak

    def fit(self, X, y):
        self.classes_ = np.unique(y)
        self.fit_sizes_ = getattr(self, "fit_sizes_", []) + [len(y)]
        return self

    def predict_proba(self, X):
        n_classes = len(self.classes_)
        rest = (1.0 - self.peak) / (n_classes - 1)
        row = np.full(n_classes, rest)
        row[0] = self.peak
        return np.tile(row, (len(X), 1))


class _Recording(ClassifierMixin, BaseEstimator):
    def fit(self, X, y):
        self.classes_, self.class_counts_ = np.unique(y, return_counts=True)
        self.seen_X_ = np.asarray(X).copy()
        self.seen_y_ = np.asarray(y).copy()
        return self

    def predict_proba(self, X):
        return np.full((len(X), len(self.classes_)), 1.0 / len(self.classes_))


class TestSelfTrain:
    def _gbdt(self):
        return GradientBoostingClassifier(n_trees=10, min_samples_leaf=1,
                                          max_leaves=4)

    def test_no_unlabeled_equals_plain_fit(self):
        X = np.array([[-1.0], [-0.5], [0.5], [1.0]])
        y = np.array([0, 0, 1, 1])
        problem = SslProblem.from_labels(X, y)
        model = self_train(self._gbdt(), problem)
        plain = self._gbdt().fit(X, y)
        assert np.array_equal(model.predict_proba(X), plain.predict_proba(X))

    def test_threshold_one_with_timid_base_adds_nothing(self):
        X = np.array([[-1.0], [1.0], [0.0], [0.3]])
        y = np.array([0, 1, UNLABELED, UNLABELED])
        problem = SslProblem.from_labels(X, y)
        model = self_train(_ConstantProba(peak=0.6), problem, threshold=1.0)
        assert model.fit_sizes_ == [2]

    def test_two_clusters_fully_pseudo_labeled(self):
        rng = np.random.default_rng(21)
        left = rng.normal(-3, 0.2, size=(11, 1))
        right = rng.normal(3, 0.2, size=(11, 1))
        X = np.vstack([left[:1], right[:1], left[1:], right[1:]])
        y = np.array([0, 1] + [UNLABELED] * 20)
        problem = SslProblem.from_labels(X, y)
        model = self_train(self._gbdt(), problem, threshold=0.6, max_iter=10)
        preds = model.predict(X)
        assert (preds[2:12] == 0).all()
        assert (preds[12:] == 1).all()

    def test_threshold_validation(self):
        X = np.array([[-1.0], [1.0]])
        y = np.array([0, 1])
        with pytest.raises(ValueError):
            self_train(self._gbdt(), SslProblem.from_labels(X, y), threshold=0.4)


class _FakeRng:
    """Drives smote deterministically: always row 0, neighbor slot 0, u=0.5."""

    def integers(self, n):
        return 0

    def random(self):
        return 0.5


class TestSmote:
    def test_forced_midpoint(self):
        X = np.array([[0.0, 0.0], [2.0, 0.0]])
        out = smote(X, k=1, n_synthetic=1, rng=_FakeRng())
        assert out.tolist() == [[1.0, 0.0]]

    def test_identical_points_stay_identical(self):
        X = np.array([[3.0, 4.0]] * 5)
        out = smote(X, k=2, n_synthetic=10, rng=np.random.default_rng(0))
        assert (out == [3.0, 4.0]).all()

    def test_bounding_box(self):
        rng = np.random.default_rng(13)
        X = rng.normal(size=(20, 3))
        out = smote(X, k=5, n_synthetic=200, rng=np.random.default_rng(1))
        assert (out >= X.min(axis=0) - 1e-12).all()
        assert (out <= X.max(axis=0) + 1e-12).all()

    def test_reproducible_bit_exact(self):
        rng = np.random.default_rng(13)
        X = rng.normal(size=(10, 2))
        a = smote(X, k=3, n_synthetic=50, rng=np.random.default_rng(99))
        b = smote(X, k=3, n_synthetic=50, rng=np.random.default_rng(99))
        assert np.array_equal(a, b)

    def test_on_segment_between_minority_points(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(8, 2))
        out = smote(X, k=3, n_synthetic=100, rng=np.random.default_rng(5))
        for point in out:
            best = min(
                _distance_to_segment(point, X[i], X[j])
                for i in range(len(X))
                for j in range(len(X))
                if i != j
            )
            assert best < 1e-9

    def test_too_few_rows(self):
        with pytest.raises(TooFewSamplesError):
            smote(np.array([[1.0, 2.0]]), k=1, n_synthetic=1,
                  rng=np.random.default_rng(0))


def _distance_to_segment(p, a, b):
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(p - a))
    t = np.clip((p - a) @ ab / denom, 0.0, 1.0)
    return float(np.linalg.norm(p - (a + t * ab)))


class TestOversample:
    def test_balances_to_majority(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(100, 2))
        y = np.array([0] * 90 + [1] * 10)
        X_out, y_out = oversample_to_majority(X, y, k=5,
                                              rng=np.random.default_rng(0))
        values, counts = np.unique(y_out, return_counts=True)
        assert counts.tolist() == [90, 90]
        assert len(X_out) == 180

    def test_balanced_input_unchanged(self):
        X = np.arange(8, dtype=float).reshape(4, 2)
        y = np.array([0, 0, 1, 1])
        X_out, y_out = oversample_to_majority(X, y, k=1,
                                              rng=np.random.default_rng(0))
        assert np.array_equal(X_out, X)
        assert np.array_equal(y_out, y)

    def test_singleton_class_skipped_with_warning(self):
        X = np.arange(10, dtype=float).reshape(5, 2)
        y = np.array([0, 0, 0, 0, 1])
        with pytest.warns(UserWarning):
            X_out, y_out = oversample_to_majority(X, y, k=1,
                                                  rng=np.random.default_rng(0))
        assert len(X_out) == 5


class TestPretrainPipeline:
    def _problem(self):
        rng = np.random.default_rng(17)
        left = rng.normal(-3, 0.3, size=(15, 2))
        right = rng.normal(3, 0.3, size=(15, 2))
        X = np.vstack([left, right])
        y = np.full(30, UNLABELED)
        y[0], y[15] = 0, 1
        return SslProblem.from_labels(X, y)

    def test_without_smote_equals_fit_on_spread_labels(self):
        problem = self._problem()
        base = GradientBoostingClassifier(n_trees=10, min_samples_leaf=1)
        model = ls_pretrain_pipeline(problem, base, kernel="rbf", gamma=0.5)
        spread = label_spreading(problem, kernel="rbf", gamma=0.5)
        direct = GradientBoostingClassifier(n_trees=10, min_samples_leaf=1)
        direct.fit(problem.X, spread.hard_labels)
        assert np.array_equal(model.predict_proba(problem.X),
                              direct.predict_proba(problem.X))

    def test_balanced_spread_smote_adds_nothing(self):
        problem = self._problem()
        model = ls_pretrain_pipeline(problem, _Recording(), kernel="rbf",
                                     gamma=0.5, use_smote=True, seed=3)
        assert model.class_counts_.tolist() == [15, 15]
        assert len(model.seen_y_) == 30

    def test_imbalanced_spread_smote_equalizes(self):
        rng = np.random.default_rng(23)
        big = rng.normal(0, 0.3, size=(27, 2))
        small = rng.normal(6, 0.3, size=(3, 2))
        X = np.vstack([big, small])
        y = np.full(30, UNLABELED)
        y[0], y[27] = 0, 1
        problem = SslProblem.from_labels(X, y)
        model = ls_pretrain_pipeline(problem, _Recording(), kernel="rbf",
                                     gamma=0.5, use_smote=True, seed=3)
        assert model.class_counts_.tolist() == [27, 27]
