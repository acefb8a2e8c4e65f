"""Command-line entry point.

Subcommands: preprocess, features, pool, coverage, train, predict,
benchmark, report. Exit codes: 0 success, 1 usage error, 2 data error.
Run configurations are TOML files; selected flags override file values
(see README for the schema).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

import numpy as np

from . import benchmark as bench
from .corpus import ALL_CATEGORIES, Corpus, load_corpus
from .embeddings import (
    SentenceEmbeddingStore,
    apply_scaling,
    assemble_design_matrix,
    normalize_lexicon,
    pool_token_store,
    read_embeddings,
    write_embeddings,
)
from .errors import ConfigError, SoneticaError
from .learners import GradientBoostingClassifier
from .lexicon import (
    GAM_FEATURE_NAMES,
    extract_features,
    load_lexicon_csv,
    merge_lexicons,
)
from .ssl import UNLABELED, SslProblem
from .textproc import SpanishStemmer, default_stopwords, load_stopwords, preprocess


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_category(text: str) -> tuple[str, str]:
    kind, sep, name = text.partition(":")
    if not sep or (kind, name) not in ALL_CATEGORIES:
        raise ConfigError(f"unknown category {text!r} (use kind:name)")
    return kind, name


def _load_toml(path: Path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


class RunContext:
    """Everything a config file names, loaded and validated."""

    def __init__(self, doc: dict, base: Path, seed_override: int | None = None):
        self.doc = doc
        data = doc.get("data", {})
        if "corpus" not in data:
            raise ConfigError("config needs data.corpus")
        self.corpus = load_corpus(base / data["corpus"])
        if "stopwords" in data:
            self.stopwords = load_stopwords(base / data["stopwords"])
        else:
            self.stopwords = default_stopwords()
        self.lexicon = None
        if data.get("lexicons"):
            sources = [load_lexicon_csv(base / p) for p in data["lexicons"]]
            self.lexicon = merge_lexicons(sources)
        self.stores: dict[str, SentenceEmbeddingStore] = {}
        for name, path in doc.get("embeddings", {}).items():
            store = read_embeddings(base / path)
            if not isinstance(store, SentenceEmbeddingStore):
                raise ConfigError(
                    f"embedding {name!r} is token-level; pool it first")
            self.stores[name] = store
        section = doc.get("benchmark", {})
        self.seed = seed_override if seed_override is not None \
            else int(section.get("seed", 0))

    def gam_features(self):
        if self.lexicon is None:
            return None
        stemmer = SpanishStemmer()
        return {
            s.id: extract_features(preprocess(s, self.stopwords, stemmer),
                                   self.lexicon)
            for s in self.corpus.sonnets
        }

    def benchmark_config(self) -> bench.BenchmarkConfig:
        section = self.doc.get("benchmark", {})
        categories = tuple(
            _parse_category(c) for c in section.get("categories", [])
        ) or ALL_CATEGORIES
        params = bench.ModelParams(**self.doc.get("params", {}))
        echo = {"config_file": self.doc, "resolved_seed": self.seed}
        return bench.BenchmarkConfig(
            corpus=self.corpus,
            stores=self.stores,
            gam=self.gam_features(),
            categories=categories,
            semantic_models=tuple(section.get("semantic_models", [])),
            predictive_models=tuple(
                section.get("predictive_models", bench.PIPELINE_NAMES)),
            n_repeats=int(section.get("n_repeats", 20)),
            n_per_value=int(section.get("n_per_value", 2)),
            master_seed=self.seed,
            run_q2=bool(section.get("run_q2", False)),
            run_q3=bool(section.get("run_q3", False)),
            run_baselines=bool(section.get("run_baselines", True)),
            independent_splits=bool(section.get("independent_splits", False)),
            params=params,
            config_echo=echo,
        )


def _cmd_preprocess(args) -> int:
    corpus = load_corpus(args.corpus)
    stoplist = load_stopwords(args.stopwords) if args.stopwords else default_stopwords()
    stemmer = SpanishStemmer()
    with open(args.out, "w", encoding="utf-8") as fh:
        for sonnet in corpus.sonnets:
            processed = preprocess(sonnet, stoplist, stemmer)
            fh.write(json.dumps({
                "id": processed.id,
                "tokens": [
                    {"surface": t.surface, "stem": t.stem, "position": t.position}
                    for t in processed.tokens
                ],
            }, ensure_ascii=False) + "\n")
    return 0


def _merged_lexicon(paths):
    if not paths:
        raise ConfigError("at least one --lexicon is required")
    return merge_lexicons([load_lexicon_csv(p) for p in paths])


def _cmd_features(args) -> int:
    corpus = load_corpus(args.corpus)
    stoplist = load_stopwords(args.stopwords) if args.stopwords else default_stopwords()
    lexicon = _merged_lexicon(args.lexicon)
    stemmer = SpanishStemmer()
    rows = []
    for sonnet in corpus.sonnets:
        features = extract_features(preprocess(sonnet, stoplist, stemmer), lexicon)
        rows.append((sonnet.id, features))
    if args.format == "json":
        doc = {
            sid: {"features": {k: f.values[k] for k in GAM_FEATURE_NAMES},
                  "matched_count": f.matched_count, "token_count": f.token_count,
                  "degenerate_correlation": f.degenerate_correlation}
            for sid, f in rows
        }
        Path(args.out).write_text(
            json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    else:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", *GAM_FEATURE_NAMES, "matched_count",
                             "token_count", "degenerate_correlation"])
            for sid, f in rows:
                writer.writerow([sid, *[repr(f.values[k]) for k in GAM_FEATURE_NAMES],
                                 f.matched_count, f.token_count,
                                 int(f.degenerate_correlation)])
    return 0


def _cmd_pool(args) -> int:
    store = read_embeddings(args.tokens)
    if isinstance(store, SentenceEmbeddingStore):
        raise ConfigError(f"{args.tokens} is sentence-level; pool needs token vectors")
    lexicon = _merged_lexicon(args.lexicon)
    weights = normalize_lexicon(lexicon)
    pooled = pool_token_store(store, weights)
    write_embeddings(pooled, args.out)
    return 0


def _cmd_coverage(args) -> int:
    corpus = load_corpus(args.corpus)
    stoplist = load_stopwords(args.stopwords) if args.stopwords else default_stopwords()
    lexicon = _merged_lexicon(args.lexicon)
    from .lexicon import coverage

    print(coverage(corpus, lexicon, stoplist, weighting=args.mode))
    return 0


def _sanitize(name: str) -> str:
    return name.replace(":", "_").replace("/", "_")


def _cmd_train(args) -> int:
    doc = _load_toml(Path(args.config))
    ctx = RunContext(doc, Path(args.config).resolve().parent, args.seed)
    config = ctx.benchmark_config()
    config.validate()
    gam = config.gam
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    annotated = list(ctx.corpus.annotated_ids())
    pool_ids = [s.id for s in ctx.corpus.sonnets if s.id not in ctx.corpus.annotations]
    manifest = {"combos": [], "config": config.config_echo}
    from .corpus import category_label

    for kind, name in config.categories:
        cat = f"{kind}:{name}"
        for semantic in config.semantic_models:
            design = assemble_design_matrix(
                tuple(annotated) + tuple(pool_ids), config.stores[semantic],
                gam, annotated)
            index = {sid: i for i, sid in enumerate(design.ids)}
            y = np.full(len(design.ids), UNLABELED, dtype=np.int64)
            for sid in annotated:
                y[index[sid]] = category_label(ctx.corpus.annotations[sid], kind, name)
            for predictive in config.predictive_models:
                seed = bench.derive_seed(config.master_seed, "train", cat,
                                         semantic, predictive)
                model = bench.make_pipeline(predictive, config.params, seed)
                model.fit(design.X, y)
                fitted: GradientBoostingClassifier = model.model_
                combo_dir = out / _sanitize(cat) / f"{_sanitize(semantic)}__{predictive}"
                combo_dir.mkdir(parents=True, exist_ok=True)
                (combo_dir / "model.json").write_text(fitted.to_json(),
                                                      encoding="utf-8")
                (combo_dir / "scaling.json").write_text(
                    json.dumps(design.scaling_stats), encoding="utf-8")
                (combo_dir / "meta.json").write_text(json.dumps({
                    "category": cat, "semantic_model": semantic,
                    "predictive_model": predictive,
                    "classes": [int(c) for c in fitted.classes_],
                    "uses_gam": gam is not None,
                    "seed": seed,
                }), encoding="utf-8")
                manifest["combos"].append({
                    "category": cat, "semantic_model": semantic,
                    "predictive_model": predictive,
                    "dir": str(combo_dir.relative_to(out)),
                })
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return 0


def _cmd_predict(args) -> int:
    doc = _load_toml(Path(args.config))
    ctx = RunContext(doc, Path(args.config).resolve().parent)
    models_dir = Path(args.models)
    manifest = json.loads((models_dir / "manifest.json").read_text(encoding="utf-8"))
    gam = ctx.gam_features()
    ids = list(ctx.corpus.ids())
    output: dict[str, dict] = {sid: {} for sid in ids}
    for combo in manifest["combos"]:
        combo_dir = models_dir / combo["dir"]
        meta = json.loads((combo_dir / "meta.json").read_text(encoding="utf-8"))
        model = GradientBoostingClassifier.from_json(
            (combo_dir / "model.json").read_text(encoding="utf-8"))
        store = ctx.stores.get(combo["semantic_model"])
        if store is None:
            raise ConfigError(
                f"config lacks embeddings for {combo['semantic_model']!r}")
        emb = np.vstack([store.vectors[sid] for sid in ids])
        if meta["uses_gam"]:
            if gam is None:
                raise ConfigError("saved model expects lexicon features; "
                                  "config lacks data.lexicons")
            scaling = {k: tuple(v) for k, v in json.loads(
                (combo_dir / "scaling.json").read_text(encoding="utf-8")).items()}
            X = np.hstack([emb, apply_scaling(gam, ids, scaling)])
        else:
            X = emb
        probs = model.predict_proba(X)
        key = combo["category"]
        for i, sid in enumerate(ids):
            output[sid].setdefault(key, {})[
                f"{combo['semantic_model']}__{combo['predictive_model']}"] = {
                    "classes": meta["classes"],
                    "probabilities": [float(p) for p in probs[i]],
            }
    Path(args.out).write_text(
        json.dumps(output, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return 0


def _cmd_benchmark(args) -> int:
    doc = _load_toml(Path(args.config))
    ctx = RunContext(doc, Path(args.config).resolve().parent, args.seed)
    config = ctx.benchmark_config()
    config.validate()
    n_cells = config.n_repeats
    jobs = args.jobs if args.jobs else max(1, min(os.cpu_count() or 1, n_cells))
    report = bench.run_benchmark(config, jobs=jobs)
    svg = bool(doc.get("benchmark", {}).get("svg", True)) and not args.no_svg
    bench.write_report(report, args.out, svg=svg)
    return 0


def _cmd_report(args) -> int:
    doc = json.loads(Path(args.report).read_text(encoding="utf-8"))
    if args.format == "csv":
        writer = csv.writer(sys.stdout)
        writer.writerow(["category", "semantic_model", "predictive_model",
                         "variant", "n_repeats", "mean_f1_weighted",
                         "mean_kappa", "mean_auc"])
        for agg in doc["aggregates"]:
            writer.writerow([agg["category"], agg["semantic_model"],
                             agg["predictive_model"], agg["variant"],
                             agg["n_repeats"], agg["mean_f1_weighted"],
                             agg["mean_kappa"], agg["mean_auc"]])
        return 0
    print("Best combination per category (by mean AUC):")
    for cat, best in doc["best_combinations"].items():
        print(f"  {cat}: {best['semantic_model']} + {best['predictive_model']}"
              f"  AUC={best['mean_auc']:.3f} F1={best['mean_f1_weighted']:.3f}"
              f" kappa={best['mean_kappa']:.3f}")
    if doc["comparisons"]:
        print("Comparisons (Wilcoxon signed-rank on per-repeat AUC):")
        for cmp in doc["comparisons"]:
            print(f"  {cmp['category']} {cmp['comparison']}: "
                  f"{cmp['mean_auc_best']:.3f} vs {cmp['mean_auc_other']:.3f}"
                  f"  p={cmp['p_value']:.4f}")
    if doc["failures"]:
        print(f"{len(doc['failures'])} cell failure(s); see report JSON.")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="sonetica",
                     description="Affective modelling and semi-supervised "
                                 "category inference for Spanish sonnets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="tokenize, filter and stem a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--stopwords")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("features", help="extract the 32 lexicon features")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon", action="append", default=[])
    p.add_argument("--stopwords")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("pool", help="affective-weighted pooling of token vectors")
    p.add_argument("--tokens", required=True, help="token-level embedding file")
    p.add_argument("--lexicon", action="append", default=[])
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_pool)

    p = sub.add_parser("coverage", help="lexicon coverage of a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon", action="append", default=[])
    p.add_argument("--stopwords")
    p.add_argument("--mode", choices=["types", "tokens"], default="types")
    p.set_defaults(func=_cmd_coverage)

    p = sub.add_parser("train", help="fit and save models for each category")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="apply saved models to a corpus")
    p.add_argument("--config", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("benchmark", help="run the cross-validation benchmark")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--no-svg", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_benchmark)

    p = sub.add_parser("report", help="summarize a benchmark report")
    p.add_argument("--report", required=True)
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (SoneticaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
