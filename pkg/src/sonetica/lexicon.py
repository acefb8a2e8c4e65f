"""Affective/lexico-semantic lexicons and per-sonnet feature extraction.

Lexicons map words to mean and standard-deviation norms on ten dimensions.
Sources are merged under stemmed keys (duplicates averaged), then sonnets
are profiled with 32 aggregate features over their matched words.
"""

from __future__ import annotations

import csv
import math
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from .errors import LengthMismatchError, RangeError
from .textproc import ProcessedSonnet, SpanishStemmer, preprocess

# dimension -> (allowed range, short feature prefix)
DIMENSIONS = {
    "valence": ((1.0, 9.0), "valence"),
    "arousal": ((1.0, 9.0), "arousal"),
    "happiness": ((1.0, 5.0), "happiness"),
    "anger": ((1.0, 5.0), "anger"),
    "sadness": ((1.0, 5.0), "sadness"),
    "fear": ((1.0, 5.0), "fear"),
    "disgust": ((1.0, 5.0), "disgust"),
    "concreteness": ((1.0, 9.0), "concreteness"),
    "imageability": ((1.0, 9.0), "imageability"),
    "context_availability": ((1.0, 9.0), "cont_ava"),
}

GAM_FEATURE_NAMES = tuple(
    [f"{prefix}_{stat}" for _, prefix in DIMENSIONS.values() for stat in ("mean", "sd")]
    + [
        "max_arousal", "min_arousal", "max_valence", "min_valence",
        "arousal_span", "valence_span",
        "cor_aro", "cor_val", "abs_cor_aro", "abs_cor_val",
        "sigma_aro", "sigma_val",
    ]
)


@dataclass
class LexiconEntry:
    """Norms for one stem: per-dimension means, and sds where provided."""

    means: dict[str, float] = field(default_factory=dict)
    sds: dict[str, float] = field(default_factory=dict)

    def has(self, dimension: str) -> bool:
        return dimension in self.means


@dataclass(frozen=True)
class MergedLexicon:
    entries: dict[str, LexiconEntry]

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, stem: str) -> bool:
        return stem in self.entries


@dataclass(frozen=True)
class GamFeatureVector:
    """The 32 aggregate affective/lexico-semantic features of one sonnet."""

    values: dict[str, float]
    matched_count: int
    token_count: int
    degenerate_correlation: bool

    def as_list(self) -> list[float]:
        return [self.values[name] for name in GAM_FEATURE_NAMES]


def load_lexicon_csv(path: str | Path) -> list[dict]:
    """Read one lexicon source: header `word,<dim>_mean,<dim>_sd,...`."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "word" not in reader.fieldnames:
            raise RangeError(f"{path}: lexicon CSV needs a 'word' column")
        for col in reader.fieldnames:
            if col == "word":
                continue
            dim, _, stat = col.rpartition("_")
            if dim not in DIMENSIONS or stat not in ("mean", "sd"):
                raise RangeError(f"{path}: unknown lexicon column {col!r}")
        for row in reader:
            entry = {"word": unicodedata.normalize("NFC", row["word"].strip().lower())}
            for col, text in row.items():
                if col == "word" or text is None or text.strip() == "":
                    continue
                entry[col] = float(text)
            rows.append(entry)
    return rows


def merge_lexicons(sources: list[list[dict]],
                   stemmer: SpanishStemmer | None = None) -> MergedLexicon:
    """Merge sources under stemmed keys, averaging duplicate contributions.

    Every row whose word stems to the same key contributes to that key;
    per dimension the stored value is the arithmetic mean of all
    contributing values, separately for means and sds.
    """
    stemmer = stemmer or SpanishStemmer()
    sums: dict[str, dict[str, list[float]]] = {}
    for source in sources:
        for row in source:
            key = stemmer.stem(row["word"])
            slot = sums.setdefault(key, {})
            for col, value in row.items():
                if col == "word":
                    continue
                dim, _, stat = col.rpartition("_")
                low, high = DIMENSIONS[dim][0]
                if stat == "mean" and not (low <= value <= high):
                    raise RangeError(
                        f"{row['word']!r}: {dim} mean {value} outside [{low}, {high}]")
                if stat == "sd" and value < 0:
                    raise RangeError(f"{row['word']!r}: negative {dim} sd {value}")
                slot.setdefault(col, []).append(value)
    entries = {}
    for key, cols in sums.items():
        entry = LexiconEntry()
        for col, values in cols.items():
            dim, _, stat = col.rpartition("_")
            avg = sum(values) / len(values)
            if stat == "mean":
                entry.means[dim] = avg
            else:
                entry.sds[dim] = avg
        entries[key] = entry
    return MergedLexicon(entries=entries)


def lookup(lexicon: MergedLexicon, stem: str) -> LexiconEntry | None:
    return lexicon.entries.get(stem)


def coverage(corpus, lexicon: MergedLexicon, stoplist: frozenset | set,
             weighting: str = "types",
             stemmer: SpanishStemmer | None = None) -> float:
    """Fraction of corpus stems (types) or occurrences (tokens) in the lexicon."""
    if weighting not in ("types", "tokens"):
        raise ValueError(f"weighting must be 'types' or 'tokens', got {weighting!r}")
    stemmer = stemmer or SpanishStemmer()
    stems: list[str] = []
    for sonnet in corpus.sonnets:
        processed = preprocess(sonnet, stoplist, stemmer)
        stems.extend(processed.stems)
    if weighting == "types":
        distinct = set(stems)
        if not distinct:
            return 0.0
        return sum(1 for s in distinct if s in lexicon) / len(distinct)
    if not stems:
        return 0.0
    return sum(1 for s in stems if s in lexicon) / len(stems)


def _rank(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman(xs: list[float], ys: list[float]) -> float:
    """Rank correlation with average ranks for ties.

    Returns 0 when fewer than two pairs or when either side has no rank
    variance.
    """
    if len(xs) != len(ys):
        raise LengthMismatchError(f"{len(xs)} vs {len(ys)} values")
    n = len(xs)
    if n < 2:
        return 0.0
    rx, ry = _rank(list(xs)), _rank(list(ys))
    mx, my = sum(rx) / n, sum(ry) / n
    sxx = sum((r - mx) ** 2 for r in rx)
    syy = sum((r - my) ** 2 for r in ry)
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    sxy = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    return sxy / math.sqrt(sxx * syy)


def extract_features(processed: ProcessedSonnet,
                     lexicon: MergedLexicon) -> GamFeatureVector:
    """Aggregate the lexicon norms of matched tokens into the 32 features.

    A token is matched when its stem has a lexicon entry; each dimension's
    statistics use only matched tokens that carry that dimension. The
    sigma features scale the mean by sqrt(N) with N the count of all
    retained tokens. Degenerate correlations (fewer than two points or no
    variance) are reported as 0 with the flag set.
    """
    matched: list[tuple[int, LexiconEntry]] = []
    for token in processed.tokens:
        entry = lexicon.entries.get(token.stem)
        if entry is not None:
            matched.append((token.position, entry))

    n_tokens = len(processed.tokens)
    values = {name: 0.0 for name in GAM_FEATURE_NAMES}

    per_dim_means: dict[str, list[float]] = {d: [] for d in DIMENSIONS}
    per_dim_sds: dict[str, list[float]] = {d: [] for d in DIMENSIONS}
    arousal_points: list[tuple[int, float]] = []
    valence_points: list[tuple[int, float]] = []
    for position, entry in matched:
        for dim in DIMENSIONS:
            if dim in entry.means:
                per_dim_means[dim].append(entry.means[dim])
            if dim in entry.sds:
                per_dim_sds[dim].append(entry.sds[dim])
        if "arousal" in entry.means:
            arousal_points.append((position, entry.means["arousal"]))
        if "valence" in entry.means:
            valence_points.append((position, entry.means["valence"]))

    for dim, (_, prefix) in DIMENSIONS.items():
        if per_dim_means[dim]:
            values[f"{prefix}_mean"] = sum(per_dim_means[dim]) / len(per_dim_means[dim])
        if per_dim_sds[dim]:
            values[f"{prefix}_sd"] = sum(per_dim_sds[dim]) / len(per_dim_sds[dim])

    aro = [v for _, v in arousal_points]
    val = [v for _, v in valence_points]
    if aro:
        values["max_arousal"], values["min_arousal"] = max(aro), min(aro)
        values["arousal_span"] = max(aro) - min(aro)
    if val:
        values["max_valence"], values["min_valence"] = max(val), min(val)
        values["valence_span"] = max(val) - min(val)

    degenerate = False

    def _corr(points):
        nonlocal degenerate
        if len(points) < 2:
            degenerate = True
            return 0.0
        positions = [float(p) for p, _ in points]
        means = [v for _, v in points]
        if len(set(means)) < 2:
            degenerate = True
        return spearman(means, positions)

    values["cor_aro"] = _corr(arousal_points)
    values["cor_val"] = _corr(valence_points)
    values["abs_cor_aro"] = abs(values["cor_aro"])
    values["abs_cor_val"] = abs(values["cor_val"])

    scale = math.sqrt(n_tokens)
    values["sigma_aro"] = values["arousal_mean"] * scale
    values["sigma_val"] = values["valence_mean"] * scale

    return GamFeatureVector(
        values=values,
        matched_count=len(matched),
        token_count=n_tokens,
        degenerate_correlation=degenerate,
    )
