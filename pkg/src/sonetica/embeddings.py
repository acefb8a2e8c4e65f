"""Portable embedding stores, affective-weighted pooling, design matrices.

Embedding files are JSON Lines: a header record with model name, level
("sentence" or "token") and dimensionality, followed by one record per
sonnet. Vectors round-trip bit-exactly through write/read.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    EmptyLexiconError,
    EmptyTokenListError,
    MissingEmbeddingError,
    SchemaError,
)
from .lexicon import DIMENSIONS, GAM_FEATURE_NAMES, GamFeatureVector, MergedLexicon
from .textproc import SpanishStemmer


@dataclass(frozen=True)
class SentenceEmbeddingStore:
    model_name: str
    dim: int
    vectors: dict[str, np.ndarray]


@dataclass(frozen=True)
class TokenEmbeddingStore:
    model_name: str
    dim: int
    vectors: dict[str, list[tuple[str, np.ndarray]]]


@dataclass(frozen=True)
class DesignMatrix:
    ids: tuple[str, ...]
    X: np.ndarray
    feature_names: tuple[str, ...]
    # per-GAM-feature (mean, sd) fitted on the training subset only
    scaling_stats: dict[str, tuple[float, float]]


def read_embeddings(path: str | Path) -> SentenceEmbeddingStore | TokenEmbeddingStore:
    """Read and validate an embedding file; the header decides the level."""
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: bad header line: {exc}") from exc
        for key in ("model", "level", "dim"):
            if key not in header:
                raise SchemaError(f"{path}: header missing {key!r}")
        level, dim = header["level"], header["dim"]
        if level not in ("sentence", "token"):
            raise SchemaError(f"{path}: unknown level {level!r}")
        if not isinstance(dim, int) or dim <= 0:
            raise SchemaError(f"{path}: dim must be a positive integer")

        vectors: dict = {}
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: bad record: {exc}") from exc
            sid = rec.get("id")
            if not isinstance(sid, str):
                raise SchemaError(f"{path}:{lineno}: record missing string id")
            if sid in vectors:
                raise SchemaError(f"{path}:{lineno}: duplicate id {sid!r}")
            if level == "sentence":
                vec = rec.get("vector")
                if not isinstance(vec, list) or len(vec) != dim:
                    raise SchemaError(f"{path}:{lineno}: vector length != {dim}")
                vectors[sid] = np.asarray(vec, dtype=np.float64)
            else:
                toks = rec.get("tokens")
                if not isinstance(toks, list):
                    raise SchemaError(f"{path}:{lineno}: token record needs 'tokens'")
                entry = []
                for tok in toks:
                    if not isinstance(tok.get("t"), str) or len(tok.get("v", [])) != dim:
                        raise SchemaError(
                            f"{path}:{lineno}: token vectors must have length {dim}")
                    entry.append((tok["t"], np.asarray(tok["v"], dtype=np.float64)))
                vectors[sid] = entry
    if level == "sentence":
        return SentenceEmbeddingStore(header["model"], dim, vectors)
    return TokenEmbeddingStore(header["model"], dim, vectors)


def write_embeddings(store: SentenceEmbeddingStore | TokenEmbeddingStore,
                     path: str | Path) -> None:
    """Write a store as JSONL; floats keep full precision (repr round-trip)."""
    level = "sentence" if isinstance(store, SentenceEmbeddingStore) else "token"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(
            {"model": store.model_name, "level": level, "dim": store.dim}) + "\n")
        for sid, value in store.vectors.items():
            if level == "sentence":
                rec = {"id": sid, "vector": [float(x) for x in value]}
            else:
                rec = {"id": sid, "tokens": [
                    {"t": t, "v": [float(x) for x in v]} for t, v in value]}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def normalize_lexicon(lexicon: MergedLexicon) -> dict[str, float]:
    """Min-max scale each dimension over the lexicon, keep the per-stem max.

    The weight of a stem is the maximum of its normalized mean values over
    the dimensions it carries. Dimensions constant across the lexicon
    normalize to 0.
    """
    if len(lexicon) == 0:
        raise EmptyLexiconError("cannot normalize an empty lexicon")
    bounds: dict[str, tuple[float, float]] = {}
    for dim in DIMENSIONS:
        values = [e.means[dim] for e in lexicon.entries.values() if dim in e.means]
        if values:
            bounds[dim] = (min(values), max(values))
    weights = {}
    for stem, entry in lexicon.entries.items():
        best = 0.0
        for dim, mean in entry.means.items():
            low, high = bounds[dim]
            if high > low:
                best = max(best, (mean - low) / (high - low))
        weights[stem] = best
    return weights


def affective_weighted_pool(tokens: list[tuple[str, np.ndarray]],
                            weights: dict[str, float],
                            stemmer: SpanishStemmer | None = None) -> np.ndarray:
    """Mean pooling of token vectors scaled by their affective weights.

    Each token contributes its vector times the weight of its stem (0 when
    the stem has no weight); the sum is divided by the token count, not by
    the weight total.
    """
    if not tokens:
        raise EmptyTokenListError("cannot pool an empty token list")
    stemmer = stemmer or SpanishStemmer()
    total = np.zeros_like(tokens[0][1], dtype=np.float64)
    for token, vector in tokens:
        total += vector * weights.get(stemmer.stem(token), 0.0)
    return total / len(tokens)


def pool_token_store(store: TokenEmbeddingStore, weights: dict[str, float],
                     stemmer: SpanishStemmer | None = None) -> SentenceEmbeddingStore:
    """Apply affective-weighted pooling to every sonnet of a token store."""
    stemmer = stemmer or SpanishStemmer()
    pooled = {
        sid: affective_weighted_pool(tokens, weights, stemmer)
        for sid, tokens in store.vectors.items()
    }
    return SentenceEmbeddingStore(
        model_name=f"{store.model_name}-affpool", dim=store.dim, vectors=pooled)


def assemble_design_matrix(ids, store: SentenceEmbeddingStore,
                           gam: dict[str, GamFeatureVector] | None,
                           fit_ids) -> DesignMatrix:
    """Stack embeddings (and optionally standardized features) row per id.

    The embedding block is taken as-is. When `gam` is given, its 32
    columns are z-scored with statistics computed on `fit_ids` only;
    zero-variance columns become all zeros.
    """
    ids = tuple(ids)
    missing = [i for i in ids if i not in store.vectors]
    if missing:
        raise MissingEmbeddingError(missing)
    emb = np.vstack([store.vectors[i] for i in ids])
    names = [f"emb_{j}" for j in range(store.dim)]
    scaling_stats: dict[str, tuple[float, float]] = {}
    if gam is None:
        return DesignMatrix(ids, emb, tuple(names), scaling_stats)

    fit_ids = set(fit_ids)
    raw = np.array([[gam[i].values[name] for name in GAM_FEATURE_NAMES] for i in ids])
    fit_mask = np.array([i in fit_ids for i in ids])
    if not fit_mask.any():
        raise SchemaError("fit_ids must overlap the assembled ids")
    mu = raw[fit_mask].mean(axis=0)
    sd = raw[fit_mask].std(axis=0)
    scaled = np.zeros_like(raw)
    nonzero = sd > 0
    scaled[:, nonzero] = (raw[:, nonzero] - mu[nonzero]) / sd[nonzero]
    for j, name in enumerate(GAM_FEATURE_NAMES):
        scaling_stats[name] = (float(mu[j]), float(sd[j]))
    X = np.hstack([emb, scaled])
    return DesignMatrix(ids, X, tuple(names + list(GAM_FEATURE_NAMES)), scaling_stats)


def apply_scaling(gam: dict[str, GamFeatureVector], ids,
                  scaling_stats: dict[str, tuple[float, float]]) -> np.ndarray:
    """Standardize features for new sonnets with previously fitted stats."""
    raw = np.array([[gam[i].values[name] for name in GAM_FEATURE_NAMES] for i in ids])
    out = np.zeros_like(raw)
    for j, name in enumerate(GAM_FEATURE_NAMES):
        mu, sd = scaling_stats[name]
        if sd > 0:
            out[:, j] = (raw[:, j] - mu) / sd
    return out
