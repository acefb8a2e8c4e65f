"""Sonnet corpus: loading, validation, filtering, descriptive statistics.

A corpus is a JSON document with a ``sonnets`` list and an ``annotations``
map (see README for the schema). Text is NFC-normalized on load. Corpora
are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import json
import math
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DuplicateIdError, ParseError, SchemaError
from .textproc import remove_stopwords, tokenize

SOURCES = ("DISCO", "DISCO_PAL", "XX_EXTENSION")

PSYCHOLOGICAL_CATEGORIES = (
    "solitude", "anxiety", "illusion", "anger", "daydream", "instability",
    "grandeur", "idealization", "pride", "depression", "irritability",
    "disappointment", "dramatisation", "prejudice", "aversion", "insecurity",
    "helplessness", "vulnerability", "fear", "obsession", "compulsion",
)

# The affective names "anger" and "fear" also exist as binary psychological
# categories; the two groups live in separate maps, so names may repeat.
SCALED_CATEGORIES = (
    "valence", "arousal", "happiness", "disgust", "anger",
    "sadness", "fear", "concreteness", "imageability",
    "context_availability",
)

# (kind, name) pairs identify a category unambiguously.
ALL_CATEGORIES = tuple(
    [("psychological", n) for n in PSYCHOLOGICAL_CATEGORIES]
    + [("scaled", n) for n in SCALED_CATEGORIES]
)


def category_values(kind: str) -> tuple[int, ...]:
    """The label alphabet of a category kind."""
    if kind == "psychological":
        return (0, 1)
    if kind == "scaled":
        return (1, 2, 3, 4)
    raise KeyError(f"unknown category kind {kind!r}")


def category_label(annotation: "AnnotationSet", kind: str, name: str) -> int:
    return getattr(annotation, kind)[name]

SINGLE_PART_SHAPE = (4, 4, 3, 3)


@dataclass(frozen=True)
class Sonnet:
    id: str
    author: str
    period: str
    title: str
    stanzas: tuple[tuple[str, ...], ...]
    source: str

    def lines(self) -> tuple[str, ...]:
        return tuple(line for stanza in self.stanzas for line in stanza)

    def text(self) -> str:
        return "\n".join(self.lines())


@dataclass(frozen=True)
class AnnotationSet:
    psychological: dict[str, int]
    scaled: dict[str, int]


@dataclass(frozen=True)
class Corpus:
    sonnets: tuple[Sonnet, ...]
    annotations: dict[str, AnnotationSet] = field(default_factory=dict)

    def __post_init__(self):
        ids = [s.id for s in self.sonnets]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise DuplicateIdError(f"duplicate sonnet ids: {', '.join(dupes)}")
        known = set(ids)
        for sid in self.annotations:
            if sid not in known:
                raise SchemaError(f"annotation references unknown sonnet id {sid!r}")

    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.sonnets)

    def annotated_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.sonnets if s.id in self.annotations)

    def get(self, sonnet_id: str) -> Sonnet:
        for s in self.sonnets:
            if s.id == sonnet_id:
                return s
        raise KeyError(sonnet_id)


@dataclass(frozen=True)
class CorpusStats:
    words_with_stopwords: dict[str, int]
    words_without_stopwords: dict[str, int]
    mean_with: float
    std_with: float
    mean_without: float
    std_without: float
    per_period: dict[str, int]


def _norm(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def _require(mapping: dict, key: str, kind: type, where: str):
    if key not in mapping:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = mapping[key]
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaError(f"{where}: field {key!r} must be an integer")
    elif not isinstance(value, kind):
        raise SchemaError(f"{where}: field {key!r} must be {kind.__name__}")
    return value


def _parse_sonnet(obj: dict) -> Sonnet:
    sid = _require(obj, "id", str, "sonnet")
    if not sid:
        raise SchemaError("sonnet: empty id")
    where = f"sonnet {sid!r}"
    author = _require(obj, "author", str, where)
    period = _require(obj, "period", str, where)
    title = _require(obj, "title", str, where)
    source = _require(obj, "source", str, where)
    if source not in SOURCES:
        raise SchemaError(f"{where}: unknown source {source!r}")
    raw_stanzas = _require(obj, "stanzas", list, where)
    stanzas = []
    for stanza in raw_stanzas:
        if not isinstance(stanza, list):
            raise SchemaError(f"{where}: stanza must be a list of lines")
        lines = []
        for line in stanza:
            if not isinstance(line, str) or not line.strip():
                raise SchemaError(f"{where}: empty or non-string line")
            lines.append(_norm(line))
        stanzas.append(tuple(lines))
    return Sonnet(id=sid, author=_norm(author), period=_norm(period),
                  title=_norm(title), stanzas=tuple(stanzas), source=source)


def _parse_annotation(sid: str, obj: dict) -> AnnotationSet:
    where = f"annotation {sid!r}"
    psych = _require(obj, "psychological", dict, where)
    scaled = _require(obj, "scaled", dict, where)
    out_psych, out_scaled = {}, {}
    for name in PSYCHOLOGICAL_CATEGORIES:
        value = _require(psych, name, int, where)
        if value not in (0, 1):
            raise SchemaError(f"{where}: {name} must be 0 or 1, got {value}")
        out_psych[name] = value
    for name in SCALED_CATEGORIES:
        value = _require(scaled, name, int, where)
        if value not in (1, 2, 3, 4):
            raise SchemaError(f"{where}: {name} must be in 1..4, got {value}")
        out_scaled[name] = value
    extra = (set(psych) - set(PSYCHOLOGICAL_CATEGORIES)) | (set(scaled) - set(SCALED_CATEGORIES))
    if extra:
        raise SchemaError(f"{where}: unknown categories {sorted(extra)}")
    return AnnotationSet(psychological=out_psych, scaled=out_scaled)


def load_corpus(path: str | Path, format: str = "json") -> Corpus:
    """Load and validate a corpus file; rejects duplicate ids."""
    if format != "json":
        raise ParseError(f"unsupported corpus format {format!r}")
    try:
        raw = Path(path).read_text(encoding="utf-8")
        doc = json.loads(raw)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read corpus {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("corpus document must be a JSON object")
    sonnets = [_parse_sonnet(s) for s in _require(doc, "sonnets", list, "corpus")]
    seen = set()
    for s in sonnets:
        if s.id in seen:
            raise DuplicateIdError(f"duplicate sonnet id {s.id!r}")
        seen.add(s.id)
    annotations = {}
    for sid, ann in doc.get("annotations", {}).items():
        if not isinstance(ann, dict):
            raise SchemaError(f"annotation {sid!r} must be an object")
        annotations[sid] = _parse_annotation(sid, ann)
    return Corpus(sonnets=tuple(sonnets), annotations=annotations)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus back to its JSON form (round-trips with load_corpus)."""
    doc = {
        "sonnets": [
            {
                "id": s.id, "author": s.author, "period": s.period,
                "title": s.title, "source": s.source,
                "stanzas": [list(st) for st in s.stanzas],
            }
            for s in corpus.sonnets
        ],
        "annotations": {
            sid: {"psychological": dict(a.psychological), "scaled": dict(a.scaled)}
            for sid, a in corpus.annotations.items()
        },
    }
    Path(path).write_text(
        json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


def filter_single_part(corpus: Corpus) -> Corpus:
    """Keep only sonnets with the 2-quartet + 2-tercet stanza shape."""
    kept = tuple(
        s for s in corpus.sonnets
        if tuple(len(st) for st in s.stanzas) == SINGLE_PART_SHAPE
    )
    kept_ids = {s.id for s in kept}
    annotations = {sid: a for sid, a in corpus.annotations.items() if sid in kept_ids}
    return Corpus(sonnets=kept, annotations=annotations)


def corpus_stats(corpus: Corpus, stopwords: frozenset | set) -> CorpusStats:
    """Per-sonnet word counts with/without stopwords, plus period histogram.

    Standard deviations are population (divide by N).
    """
    with_counts, without_counts = {}, {}
    per_period: dict[str, int] = {}
    for s in corpus.sonnets:
        tokens = []
        for line in s.lines():
            tokens.extend(tokenize(line))
        with_counts[s.id] = len(tokens)
        without_counts[s.id] = len(remove_stopwords(tokens, stopwords))
        per_period[s.period] = per_period.get(s.period, 0) + 1
    per_period = dict(sorted(per_period.items()))

    def _mean_std(values):
        if not values:
            return 0.0, 0.0
        mean = sum(values) / len(values)
        var = sum((v - mean) ** 2 for v in values) / len(values)
        return mean, math.sqrt(var)

    mean_with, std_with = _mean_std(list(with_counts.values()))
    mean_without, std_without = _mean_std(list(without_counts.values()))
    return CorpusStats(
        words_with_stopwords=with_counts,
        words_without_stopwords=without_counts,
        mean_with=mean_with, std_with=std_with,
        mean_without=mean_without, std_without=std_without,
        per_period=per_period,
    )
