"""Synthetic fixtures: a corpus with a planted binary signal in its
embeddings, used by the end-to-end regression benchmark and the examples
in the README.
"""

from __future__ import annotations

import numpy as np

from .corpus import (
    PSYCHOLOGICAL_CATEGORIES,
    SCALED_CATEGORIES,
    AnnotationSet,
    Corpus,
    Sonnet,
)
from .embeddings import SentenceEmbeddingStore

_VOCABULARY = (
    "mar cielo luna noche amor sombra fuego viento alma luz rosa sangre "
    "olvido sueño dolor piedra tiempo verso canto aurora silencio espejo "
    "cristal jardín pena gloria destino camino herida estrella lluvia "
    "nieve llama ceniza fuente espada corona abismo eterno fugaz"
).split()

_STANZA_SHAPE = (4, 4, 3, 3)

PLANTED_CATEGORY = ("psychological", "solitude")


def make_planted_corpus(
    n_sonnets: int = 300,
    dim: int = 8,
    n_informative: int = 2,
    annotated_fraction: float = 0.1,
    separation: float = 1.5,
    scale: float = 0.6,
    flip_prob: float = 0.05,
    seed: int = 7,
) -> tuple[Corpus, SentenceEmbeddingStore]:
    """Corpus + embedding store whose planted category labels follow a
    noisy linear function of the informative embedding dimensions.

    The two groups sit at +/-`separation` along each informative axis with
    Gaussian spread `scale`; `flip_prob` of the labels are inverted. About
    `annotated_fraction` of the sonnets carry annotations (the planted
    category plus uninformative noise for every other category).
    """
    rng = np.random.default_rng(seed)
    group = rng.integers(0, 2, size=n_sonnets)
    signs = 2.0 * group - 1.0
    X = rng.normal(0.0, scale, size=(n_sonnets, dim))
    X[:, :n_informative] += separation * signs[:, None]
    labels = np.where(rng.random(n_sonnets) < flip_prob, 1 - group, group)

    n_annotated = max(2, int(round(annotated_fraction * n_sonnets)))
    annotated_rows = set(rng.choice(n_sonnets, size=n_annotated, replace=False).tolist())

    sonnets = []
    annotations = {}
    vectors = {}
    for i in range(n_sonnets):
        sid = f"syn-{i:04d}"
        stanzas = tuple(
            tuple(
                " ".join(rng.choice(_VOCABULARY, size=rng.integers(5, 8)))
                for _ in range(n_lines)
            )
            for n_lines in _STANZA_SHAPE
        )
        if i in annotated_rows:
            source, period = "DISCO_PAL", "XIX"
        elif rng.random() < 0.8:
            source, period = "DISCO", "XVII"
        else:
            source, period = "XX_EXTENSION", "XX"
        sonnets.append(Sonnet(id=sid, author="synthetic", period=period,
                              title=f"Synthetic {i}", stanzas=stanzas,
                              source=source))
        vectors[sid] = X[i].copy()
        if i in annotated_rows:
            psychological = {
                name: int(rng.integers(0, 2)) for name in PSYCHOLOGICAL_CATEGORIES}
            psychological[PLANTED_CATEGORY[1]] = int(labels[i])
            scaled = {name: int(rng.integers(1, 5)) for name in SCALED_CATEGORIES}
            annotations[sid] = AnnotationSet(psychological=psychological,
                                             scaled=scaled)

    corpus = Corpus(sonnets=tuple(sonnets), annotations=annotations)
    store = SentenceEmbeddingStore(model_name="synthetic-planted", dim=dim,
                                   vectors=vectors)
    return corpus, store
