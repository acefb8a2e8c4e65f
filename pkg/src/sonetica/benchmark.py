"""Random cross-validation benchmark over semantic models, semi-supervised
pipelines, feature/corpus ablations, and supervised baselines.

Every cell (repeat x category x combination x variant) derives its own RNG
seed from the master seed, so runs with identical configuration produce
byte-identical reports regardless of execution order.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import ALL_CATEGORIES, Corpus, category_label
from .embeddings import DesignMatrix, SentenceEmbeddingStore, assemble_design_matrix
from .errors import ConfigError, SoneticaError, TooFewPairsError
from .learners import GradientBoostingClassifier
from .lexicon import GamFeatureVector
from .metrics import auc_binary, auc_multiclass, cohens_kappa, f1_weighted, wilcoxon_signed_rank
from .ssl import (
    SelfTrainingClassifier,
    SpreadPretrainClassifier,
    SslProblem,
    UNLABELED,
    oversample_to_majority,
)

PIPELINE_NAMES = (
    "ST-GBDT",
    "LS-GBDT-KNN",
    "LS-GBDT-RBF",
    "LS-GBDT-SMOTE-KNN",
    "LS-GBDT-SMOTE-RBF",
)

VARIANTS = ("full", "no_gam", "disco_only", "baseline", "baseline_smote")


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from string parts (platform independent)."""
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class CvSplit:
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]
    repeat_index: int
    seed: int


def cv_sample(corpus: Corpus, n_per_value: int = 2, seed: int = 0,
              categories=None, repeat_index: int = 0) -> CvSplit:
    """Sample a train set with n_per_value sonnets per (category, value).

    The train set is the union over all requested categories; the test
    set is the remaining annotated sonnets. Values with fewer annotated
    sonnets than requested contribute everything they have, with a
    warning.
    """
    annotated = list(corpus.annotated_ids())
    categories = list(categories if categories is not None else ALL_CATEGORIES)
    rng = np.random.default_rng(seed)
    train: set[str] = set()
    for kind, name in categories:
        by_value: dict[int, list[str]] = {}
        for sid in annotated:
            value = category_label(corpus.annotations[sid], kind, name)
            by_value.setdefault(value, []).append(sid)
        for value in sorted(by_value):
            pool = by_value[value]
            take = min(n_per_value, len(pool))
            if take < n_per_value:
                warnings.warn(
                    f"{kind}:{name} value {value}: only {len(pool)} annotated "
                    f"sonnets, requested {n_per_value}")
            picked = rng.choice(len(pool), size=take, replace=False)
            train.update(pool[i] for i in picked)
    train_ids = tuple(sid for sid in annotated if sid in train)
    test_ids = tuple(sid for sid in annotated if sid not in train)
    return CvSplit(train_ids, test_ids, repeat_index, seed)


@dataclass(frozen=True)
class ModelParams:
    alpha: float = 0.2
    gamma: float = 20.0
    knn_k: int = 7
    spread_max_iter: int = 30
    spread_tol: float = 1e-3
    self_train_threshold: float = 0.75
    self_train_max_iter: int = 10
    smote_k: int = 5
    gbdt_trees: int = 100
    gbdt_learning_rate: float = 0.1
    gbdt_max_leaves: int = 31
    gbdt_min_samples_leaf: int = 20
    gbdt_bins: int = 255


def make_pipeline(name: str, params: ModelParams, seed: int):
    base = GradientBoostingClassifier(
        n_trees=params.gbdt_trees, learning_rate=params.gbdt_learning_rate,
        max_leaves=params.gbdt_max_leaves,
        min_samples_leaf=params.gbdt_min_samples_leaf,
        n_bins=params.gbdt_bins, random_state=seed)
    if name == "ST-GBDT":
        return SelfTrainingClassifier(base, threshold=params.self_train_threshold,
                                      max_iter=params.self_train_max_iter)
    if name in ("LS-GBDT-KNN", "LS-GBDT-RBF", "LS-GBDT-SMOTE-KNN", "LS-GBDT-SMOTE-RBF"):
        return SpreadPretrainClassifier(
            base, kernel="knn" if name.endswith("KNN") else "rbf",
            gamma=params.gamma, n_neighbors=params.knn_k, alpha=params.alpha,
            use_smote="-SMOTE-" in name, smote_k=params.smote_k,
            spread_max_iter=params.spread_max_iter,
            spread_tol=params.spread_tol, random_state=seed)
    raise ConfigError(f"unknown predictive model {name!r}")


@dataclass(frozen=True)
class MetricsRecord:
    category: str
    semantic_model: str
    predictive_model: str
    variant: str
    repeat: int
    f1_weighted: float
    kappa: float
    auc: float
    test_class_counts: dict[int, int]

    def key(self):
        return (self.category, self.semantic_model, self.predictive_model,
                self.variant, self.repeat)


@dataclass
class BenchmarkConfig:
    corpus: Corpus
    stores: dict[str, SentenceEmbeddingStore]
    gam: dict[str, GamFeatureVector] | None = None
    categories: tuple = ALL_CATEGORIES
    semantic_models: tuple[str, ...] = ()
    predictive_models: tuple[str, ...] = PIPELINE_NAMES
    n_repeats: int = 20  # min_sample_size(0.1, 0.8, 0.8) sets the floor
    n_per_value: int = 2
    master_seed: int = 0
    run_q2: bool = False
    run_q3: bool = False
    run_baselines: bool = True
    independent_splits: bool = False
    params: ModelParams = field(default_factory=ModelParams)
    config_echo: dict = field(default_factory=dict)

    def validate(self):
        if not self.semantic_models:
            self.semantic_models = tuple(sorted(self.stores))
        for name in self.semantic_models:
            if name not in self.stores:
                raise ConfigError(f"no embedding store for semantic model {name!r}")
        for name in self.predictive_models:
            if name not in PIPELINE_NAMES:
                raise ConfigError(f"unknown predictive model {name!r}")
        if not self.predictive_models:
            raise ConfigError("empty predictive model grid")
        if self.run_q2 and self.gam is None:
            raise ConfigError("the no_gam ablation needs lexicon features to ablate")
        if not self.corpus.annotations:
            raise ConfigError("corpus has no annotated sonnets")
        for kind, name in self.categories:
            if (kind, name) not in ALL_CATEGORIES:
                raise ConfigError(f"unknown category {kind}:{name}")


@dataclass
class BenchmarkReport:
    records: list[MetricsRecord]
    failures: list[dict]
    aggregates: list[dict]
    best_combinations: dict[str, dict]
    comparisons: list[dict]
    config_echo: dict


def _category_key(kind: str, name: str) -> str:
    return f"{kind}:{name}"


def _predict_scores(model, X_test: np.ndarray):
    probs = model.predict_proba(X_test)
    preds = model.classes_[np.argmax(probs, axis=1)]
    return probs, preds


def _score_cell(y_test, probs, preds, classes) -> tuple[float, float, float]:
    f1 = f1_weighted(y_test, preds)
    kappa = cohens_kappa(y_test, preds)
    if len(classes) == 2:
        auc = auc_binary(y_test, probs[:, 1])
    else:
        auc = auc_multiclass(y_test, probs, classes=classes)
    return float(f1), float(kappa), float(auc)


def unlabeled_pool(corpus: Corpus, variant: str) -> list[str]:
    """Unannotated sonnets feeding the semi-supervised problem.

    The corpus-restriction ablation keeps only the original diachronic
    corpus, dropping the modern extension.
    """
    if variant == "disco_only":
        return [s.id for s in corpus.sonnets
                if s.id not in corpus.annotations and s.source == "DISCO"]
    return [s.id for s in corpus.sonnets if s.id not in corpus.annotations]


def _run_repeat(config: BenchmarkConfig, repeat: int):
    """All cells of one cross-validation repeat (safe to run in parallel)."""
    corpus = config.corpus
    annotated_ids = list(corpus.annotated_ids())
    unannotated_all = unlabeled_pool(corpus, "full")
    unannotated_disco = unlabeled_pool(corpus, "disco_only")

    variants = ["full"]
    if config.run_q2:
        variants.append("no_gam")
    if config.run_q3:
        variants.append("disco_only")

    records: list[MetricsRecord] = []
    failures: list[dict] = []
    design_cache: dict[tuple, DesignMatrix] = {}

    def _design(semantic: str, variant: str, split: CvSplit) -> DesignMatrix:
        key = (semantic, variant, split.train_ids)
        if key not in design_cache:
            store = config.stores[semantic]
            if variant == "baseline":
                ids, gam = tuple(annotated_ids), config.gam
            else:
                pool = unannotated_disco if variant == "disco_only" else unannotated_all
                ids = tuple(annotated_ids) + tuple(pool)
                gam = None if variant == "no_gam" else config.gam
            design_cache[key] = assemble_design_matrix(ids, store, gam,
                                                       split.train_ids)
        return design_cache[key]

    if not config.independent_splits:
        shared = cv_sample(corpus, config.n_per_value,
                           seed=derive_seed(config.master_seed, "split", repeat),
                           categories=config.categories, repeat_index=repeat)
    for kind, name in config.categories:
        cat = _category_key(kind, name)
        if config.independent_splits:
            split = cv_sample(
                corpus, config.n_per_value,
                seed=derive_seed(config.master_seed, "split", repeat, cat),
                categories=[(kind, name)], repeat_index=repeat)
        else:
            split = shared
        y_by_id = {sid: category_label(corpus.annotations[sid], kind, name)
                   for sid in annotated_ids}
        test_counts: dict[int, int] = {}
        for sid in split.test_ids:
            test_counts[y_by_id[sid]] = test_counts.get(y_by_id[sid], 0) + 1
        test_counts = dict(sorted(test_counts.items()))

        for semantic in config.semantic_models:
            for variant in variants:
                design = _design(semantic, variant, split)
                _run_grid_cells(config, design, split, y_by_id, cat, semantic,
                                variant, repeat, test_counts, records, failures)
            if config.run_baselines:
                design = _design(semantic, "baseline", split)
                _run_baseline_cells(config, design, split, y_by_id, cat,
                                    semantic, repeat, test_counts,
                                    records, failures)
    return records, failures


def run_benchmark(config: BenchmarkConfig, jobs: int = 1) -> BenchmarkReport:
    """Execute the full grid; results are merged in a deterministic order."""
    config.validate()
    records: list[MetricsRecord] = []
    failures: list[dict] = []
    if jobs > 1 and config.n_repeats > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=min(jobs, config.n_repeats)) as pool:
            for recs, fails in pool.map(_run_repeat, [config] * config.n_repeats,
                                        range(config.n_repeats)):
                records.extend(recs)
                failures.extend(fails)
    else:
        for repeat in range(config.n_repeats):
            recs, fails = _run_repeat(config, repeat)
            records.extend(recs)
            failures.extend(fails)

    records.sort(key=lambda r: r.key())
    failures.sort(key=lambda f: (f["category"], f["semantic_model"],
                                 f["predictive_model"], f["variant"], f["repeat"]))
    aggregates = _aggregate(records)
    best = _best_combinations(aggregates)
    comparisons = _comparisons(config, records, best)
    return BenchmarkReport(records=records, failures=failures,
                           aggregates=aggregates, best_combinations=best,
                           comparisons=comparisons,
                           config_echo=config.config_echo)


def _build_problem(design: DesignMatrix, split: CvSplit, y_by_id) -> tuple:
    index = {sid: i for i, sid in enumerate(design.ids)}
    y_marked = np.full(len(design.ids), UNLABELED, dtype=np.int64)
    for sid in split.train_ids:
        y_marked[index[sid]] = y_by_id[sid]
    test_rows = np.array([index[sid] for sid in split.test_ids])
    y_test = np.array([y_by_id[sid] for sid in split.test_ids])
    return SslProblem.from_labels(design.X, y_marked), test_rows, y_test


def _run_grid_cells(config, design, split, y_by_id, cat, semantic, variant,
                    repeat, test_counts, records, failures):
    for predictive in config.predictive_models:
        seed = derive_seed(config.master_seed, cat, semantic, predictive,
                           variant, repeat)
        try:
            problem, test_rows, y_test = _build_problem(design, split, y_by_id)
            model = make_pipeline(predictive, config.params, seed)
            model.fit(problem.X, problem.y)
            probs, preds = _predict_scores(model, problem.X[test_rows])
            f1, kappa, auc = _score_cell(y_test, probs, preds, model.classes_)
        except SoneticaError as exc:
            failures.append({"category": cat, "semantic_model": semantic,
                             "predictive_model": predictive, "variant": variant,
                             "repeat": repeat, "error": str(exc)})
            continue
        records.append(MetricsRecord(cat, semantic, predictive, variant, repeat,
                                     f1, kappa, auc, test_counts))


def _run_baseline_cells(config, design, split, y_by_id, cat, semantic, repeat,
                        test_counts, records, failures):
    index = {sid: i for i, sid in enumerate(design.ids)}
    train_rows = np.array([index[sid] for sid in split.train_ids])
    test_rows = np.array([index[sid] for sid in split.test_ids])
    y_train = np.array([y_by_id[sid] for sid in split.train_ids])
    y_test = np.array([y_by_id[sid] for sid in split.test_ids])
    for variant, name, use_smote in (("baseline", "GBDT", False),
                                     ("baseline_smote", "GBDT-SMOTE", True)):
        seed = derive_seed(config.master_seed, cat, semantic, name, variant, repeat)
        try:
            X_train, y_fit = design.X[train_rows], y_train
            if use_smote:
                rng = np.random.default_rng(seed)
                X_train, y_fit = oversample_to_majority(
                    X_train, y_train, config.params.smote_k, rng)
            model = GradientBoostingClassifier(
                n_trees=config.params.gbdt_trees,
                learning_rate=config.params.gbdt_learning_rate,
                max_leaves=config.params.gbdt_max_leaves,
                min_samples_leaf=config.params.gbdt_min_samples_leaf,
                n_bins=config.params.gbdt_bins, random_state=seed)
            model.fit(X_train, y_fit)
            probs, preds = _predict_scores(model, design.X[test_rows])
            f1, kappa, auc = _score_cell(y_test, probs, preds, model.classes_)
        except SoneticaError as exc:
            failures.append({"category": cat, "semantic_model": semantic,
                             "predictive_model": name, "variant": variant,
                             "repeat": repeat, "error": str(exc)})
            continue
        records.append(MetricsRecord(cat, semantic, name, variant, repeat,
                                     f1, kappa, auc, test_counts))


def _aggregate(records: list[MetricsRecord]) -> list[dict]:
    groups: dict[tuple, list[MetricsRecord]] = {}
    for rec in records:
        groups.setdefault(rec.key()[:4], []).append(rec)
    out = []
    for (cat, semantic, predictive, variant), recs in sorted(groups.items()):
        counts: dict[int, float] = {}
        for rec in recs:
            for value, count in rec.test_class_counts.items():
                counts[value] = counts.get(value, 0.0) + count
        out.append({
            "category": cat, "semantic_model": semantic,
            "predictive_model": predictive, "variant": variant,
            "n_repeats": len(recs),
            "mean_f1_weighted": float(np.mean([r.f1_weighted for r in recs])),
            "mean_kappa": float(np.mean([r.kappa for r in recs])),
            "mean_auc": float(np.mean([r.auc for r in recs])),
            "mean_test_class_counts": {
                str(v): c / len(recs) for v, c in sorted(counts.items())},
        })
    return out


def _best_combinations(aggregates: list[dict]) -> dict[str, dict]:
    best: dict[str, dict] = {}
    for agg in aggregates:
        if agg["variant"] != "full":
            continue
        cat = agg["category"]
        incumbent = best.get(cat)
        if (incumbent is None or agg["mean_auc"] > incumbent["mean_auc"]
                or (agg["mean_auc"] == incumbent["mean_auc"]
                    and (agg["semantic_model"], agg["predictive_model"])
                    < (incumbent["semantic_model"], incumbent["predictive_model"]))):
            best[cat] = {"semantic_model": agg["semantic_model"],
                         "predictive_model": agg["predictive_model"],
                         "mean_auc": agg["mean_auc"],
                         "mean_f1_weighted": agg["mean_f1_weighted"],
                         "mean_kappa": agg["mean_kappa"]}
    return dict(sorted(best.items()))


def _paired_aucs(records, cat, semantic, predictive, variant):
    cells = {r.repeat: r.auc for r in records
             if r.key()[:4] == (cat, semantic, predictive, variant)}
    return cells


def _wilcoxon_or_degenerate(a: list[float], b: list[float]):
    try:
        statistic, p_value = wilcoxon_signed_rank(a, b)
        return statistic, p_value
    except TooFewPairsError:
        return None, 1.0


def _comparisons(config: BenchmarkConfig, records, best) -> list[dict]:
    out = []
    for cat, combo in best.items():
        semantic, predictive = combo["semantic_model"], combo["predictive_model"]
        full = _paired_aucs(records, cat, semantic, predictive, "full")

        def paired(other: dict[int, float]):
            repeats = sorted(set(full) & set(other))
            return ([full[r] for r in repeats], [other[r] for r in repeats], repeats)

        candidates = []
        if config.run_baselines:
            candidates.append(("best_vs_baseline",
                               _paired_aucs(records, cat, semantic, "GBDT", "baseline")))
            candidates.append(("best_vs_baseline_smote",
                               _paired_aucs(records, cat, semantic, "GBDT-SMOTE",
                                            "baseline_smote")))
        if config.run_q2:
            candidates.append(("full_vs_no_gam",
                               _paired_aucs(records, cat, semantic, predictive,
                                            "no_gam")))
        if config.run_q3:
            candidates.append(("full_vs_disco_only",
                               _paired_aucs(records, cat, semantic, predictive,
                                            "disco_only")))
        for kind, other in candidates:
            a, b, repeats = paired(other)
            if not repeats:
                continue
            statistic, p_value = _wilcoxon_or_degenerate(a, b)
            out.append({
                "category": cat, "comparison": kind,
                "semantic_model": semantic, "predictive_model": predictive,
                "n_pairs": len(repeats),
                "mean_auc_best": float(np.mean(a)),
                "mean_auc_other": float(np.mean(b)),
                "statistic": statistic, "p_value": float(p_value),
            })
    return out


# ---------------------------------------------------------------------------
# Report emission: JSON, CSV, and simple SVG box plots.
# ---------------------------------------------------------------------------


def report_to_json(report: BenchmarkReport) -> str:
    doc = {
        "config": report.config_echo,
        "records": [
            {"category": r.category, "semantic_model": r.semantic_model,
             "predictive_model": r.predictive_model, "variant": r.variant,
             "repeat": r.repeat, "f1_weighted": r.f1_weighted,
             "kappa": r.kappa, "auc": r.auc,
             "test_class_counts": {str(k): v for k, v in r.test_class_counts.items()}}
            for r in report.records
        ],
        "failures": report.failures,
        "aggregates": report.aggregates,
        "best_combinations": report.best_combinations,
        "comparisons": report.comparisons,
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def report_to_csv(report: BenchmarkReport) -> str:
    lines = ["category,semantic_model,predictive_model,variant,repeat,"
             "f1_weighted,kappa,auc,test_class_counts"]
    for r in report.records:
        counts = "|".join(f"{k}:{v}" for k, v in sorted(r.test_class_counts.items()))
        lines.append(f"{r.category},{r.semantic_model},{r.predictive_model},"
                     f"{r.variant},{r.repeat},{r.f1_weighted!r},{r.kappa!r},"
                     f"{r.auc!r},{counts}")
    return "\n".join(lines) + "\n"


def _box_stats(values: list[float]):
    v = np.sort(np.asarray(values, dtype=np.float64))
    return (float(v[0]), float(np.quantile(v, 0.25)), float(np.median(v)),
            float(np.quantile(v, 0.75)), float(v[-1]))


def boxplot_svg(groups: list[tuple[str, list[float]]], title: str) -> str:
    """A small static box plot of AUC distributions, one box per group."""
    width_per = 110
    width = max(320, 90 + width_per * len(groups))
    height = 320
    top, bottom, left = 46, 60, 60
    lo = min(min(v) for _, v in groups)
    hi = max(max(v) for _, v in groups)
    if hi - lo < 1e-9:
        lo, hi = lo - 0.05, hi + 0.05
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad

    def y(value: float) -> float:
        return top + (hi - value) / (hi - lo) * (height - top - bottom)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{title}</text>',
    ]
    for tick in np.linspace(lo, hi, 5):
        ty = y(float(tick))
        parts.append(f'<line x1="{left}" y1="{ty:.2f}" x2="{width - 20}" '
                     f'y2="{ty:.2f}" stroke="#ddd"/>')
        parts.append(f'<text x="{left - 6}" y="{ty + 4:.2f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="10">{tick:.3f}</text>')
    for g, (label, values) in enumerate(groups):
        cx = left + 40 + g * width_per
        mn, q1, med, q3, mx = _box_stats(values)
        parts.extend([
            f'<line x1="{cx}" y1="{y(mn):.2f}" x2="{cx}" y2="{y(mx):.2f}" stroke="#555"/>',
            f'<rect x="{cx - 22}" y="{y(q3):.2f}" width="44" '
            f'height="{max(y(q1) - y(q3), 0.5):.2f}" fill="#9ecae1" stroke="#3182bd"/>',
            f'<line x1="{cx - 22}" y1="{y(med):.2f}" x2="{cx + 22}" '
            f'y2="{y(med):.2f}" stroke="#08519c" stroke-width="2"/>',
            f'<text x="{cx}" y="{height - 38}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="9">{label[:18]}</text>',
        ])
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_report(report: BenchmarkReport, out_dir: str | Path,
                 svg: bool = True) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report_to_json(report), encoding="utf-8")
    (out / "records.csv").write_text(report_to_csv(report), encoding="utf-8")
    if not svg:
        return
    by_cat: dict[str, dict[str, list[float]]] = {}
    for r in report.records:
        label = f"{r.predictive_model} {r.variant}" if r.variant != "full" \
            else r.predictive_model
        by_cat.setdefault(r.category, {}).setdefault(label, []).append(r.auc)
    for cat, groups in sorted(by_cat.items()):
        ordered = sorted(groups.items())
        name = cat.replace(":", "_")
        (out / f"auc_{name}.svg").write_text(
            boxplot_svg(ordered, f"AUC per repeat — {cat}"), encoding="utf-8")
