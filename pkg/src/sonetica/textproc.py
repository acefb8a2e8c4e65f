"""Spanish text preprocessing: tokenization, stopword removal, stemming.

All functions are pure and deterministic; a sonnet preprocessed twice with
the same stoplist yields the same token sequence.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

__all__ = [
    "Token",
    "ProcessedSonnet",
    "SpanishStemmer",
    "tokenize",
    "remove_stopwords",
    "stem",
    "preprocess",
    "load_stopwords",
    "default_stopwords",
]


@dataclass(frozen=True)
class Token:
    surface: str
    stem: str
    position: int


@dataclass(frozen=True)
class ProcessedSonnet:
    id: str
    tokens: tuple[Token, ...]

    @property
    def stems(self) -> tuple[str, ...]:
        return tuple(t.stem for t in self.tokens)


def tokenize(text: str) -> list[str]:
    """Split on whitespace, strip surrounding punctuation, lowercase.

    Tokens that contain no letter after stripping (numbers, bare
    punctuation) are dropped. Internal accents and ñ/ü are preserved.
    """
    out = []
    for raw in text.split():
        token = _strip_punctuation(raw)
        if token and any(c.isalpha() for c in token):
            out.append(unicodedata.normalize("NFC", token.lower()))
    return out


def _strip_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


def remove_stopwords(tokens: Iterable[str], stoplist: frozenset | set) -> list[str]:
    """Order-preserving filter on surface tokens."""
    return [t for t in tokens if t not in stoplist]


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a stopword file: one word per line, '#' lines are comments."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(unicodedata.normalize("NFC", line.lower()))
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    """The bundled Spanish stopword list."""
    ref = resources.files("sonetica").joinpath("data/stopwords_es.txt")
    with resources.as_file(ref) as path:
        return load_stopwords(path)


# ---------------------------------------------------------------------------
# Spanish suffix-stripping stemmer (Snowball family).
#
# The algorithm works on three regions of the word:
#   R1: after the first non-vowel that follows a vowel.
#   R2: same rule applied again inside R1.
#   RV: after the next vowel if letter 2 is a consonant; after the next
#       consonant if letters 1-2 are vowels; otherwise after letter 3.
# Suffix removal is conditioned on the suffix lying inside one of these
# regions. Regions are carried along as suffix strings of the word and
# truncated in lockstep with it.
# ---------------------------------------------------------------------------

_VOWELS = "aeiouáéíóúü"

_PRONOUN_SUFFIXES = (
    "selas", "selos", "sela", "selo",
    "las", "les", "los", "nos",
    "me", "se", "la", "le", "lo",
)

_PRONOUN_BASES = ("ando", "ándo", "ar", "ár", "er", "ér", "iendo", "iéndo", "ir", "ír")

# step-1 suffix -> action group
_DELETE_IF_R2 = (
    "amientos", "imientos", "amiento", "imiento",
    "anzas", "anza", "icos", "icas", "ico", "ica",
    "ismos", "ismo", "ables", "able", "ibles", "ible",
    "istas", "ista", "osos", "osas", "oso", "osa",
    "ivas", "ivos", "iva", "ivo",
)
_DELETE_IF_R2_THEN_IC = (
    "adoras", "adores", "adora", "ador",
    "aciones", "ación", "acion",
    "antes", "ante", "ancias", "ancia",
)
_REPLACEMENTS = {
    "logías": "log", "logía": "log",
    "uciones": "u", "ución": "u",
    "encias": "ente", "encia": "ente",
}
_IDAD_SUFFIXES = ("idades", "idad")
_IVE_SUFFIXES = ("ivas", "ivos", "iva", "ivo")

_STEP1_SUFFIXES = tuple(
    sorted(
        set(_DELETE_IF_R2) | set(_DELETE_IF_R2_THEN_IC) | set(_REPLACEMENTS)
        | set(_IDAD_SUFFIXES) | {"amente", "mente"},
        key=lambda s: (-len(s), s),
    )
)

_STEP2A_SUFFIXES = tuple(
    sorted(
        ("ya", "ye", "yan", "yen", "yeron", "yendo", "yo", "yó",
         "yas", "yes", "yais", "yamos"),
        key=lambda s: (-len(s), s),
    )
)

_STEP2B_SUFFIXES = tuple(
    sorted(
        ("arían", "arías", "arán", "arás", "aríais", "aría", "aréis",
         "aríamos", "aremos", "ará", "aré",
         "erían", "erías", "erán", "erás", "eríais", "ería", "eréis",
         "eríamos", "eremos", "erá", "eré",
         "irían", "irías", "irán", "irás", "iríais", "iría", "iréis",
         "iríamos", "iremos", "irá", "iré",
         "aba", "ada", "ida", "ía", "ara", "iera", "ad", "ed", "id",
         "ase", "iese", "aste", "iste", "an", "aban", "ían", "aran",
         "ieran", "asen", "iesen", "aron", "ieron", "ado", "ido",
         "ando", "iendo", "ió", "ar", "er", "ir", "as", "abas", "adas",
         "idas", "ías", "aras", "ieras", "ases", "ieses", "ís", "áis",
         "abais", "íais", "arais", "ierais", "aseis", "ieseis",
         "asteis", "isteis", "ados", "idos", "amos", "ábamos",
         "íamos", "imos", "áramos", "iéramos", "iésemos", "ásemos",
         "en", "es", "éis", "emos"),
        key=lambda s: (-len(s), s),
    )
)
_STEP2B_GU_SUFFIXES = ("en", "es", "éis", "emos")

_STEP3_SUFFIXES = ("os", "a", "e", "o", "á", "é", "í", "ó")

_ACCENT_MAP = str.maketrans("áéíóú", "aeiou")


def _regions_r1_r2(word: str) -> tuple[str, str]:
    r1 = ""
    for i in range(1, len(word)):
        if word[i] not in _VOWELS and word[i - 1] in _VOWELS:
            r1 = word[i + 1:]
            break
    r2 = ""
    for i in range(1, len(r1)):
        if r1[i] not in _VOWELS and r1[i - 1] in _VOWELS:
            r2 = r1[i + 1:]
            break
    return r1, r2


def _region_rv(word: str) -> str:
    if len(word) < 2:
        return ""
    if word[1] not in _VOWELS:
        for i in range(2, len(word)):
            if word[i] in _VOWELS:
                return word[i + 1:]
        return ""
    if word[0] in _VOWELS:
        for i in range(2, len(word)):
            if word[i] not in _VOWELS:
                return word[i + 1:]
        return ""
    return word[3:]


def _deaccent(word: str) -> str:
    return word.translate(_ACCENT_MAP)


class SpanishStemmer:
    """Rule-based suffix stripper for Spanish; stateless and reusable."""

    def stem(self, word: str) -> str:
        word = unicodedata.normalize("NFC", word.lower())
        r1, r2 = _regions_r1_r2(word)
        rv = _region_rv(word)
        step1_removed = False

        # attached pronouns: strip only after a gerund or infinitive base
        for suffix in _PRONOUN_SUFFIXES:
            if not (word.endswith(suffix) and rv.endswith(suffix)):
                continue
            base = rv[: -len(suffix)]
            if base.endswith(_PRONOUN_BASES) or (
                base.endswith("yendo") and word[: -len(suffix)].endswith("uyendo")
            ):
                cut = len(suffix)
                word = _deaccent(word[:-cut])
                r1 = _deaccent(r1[:-cut])
                r2 = _deaccent(r2[:-cut])
                rv = _deaccent(rv[:-cut])
            break

        # standard (derivational) suffixes, longest candidate only
        for suffix in _STEP1_SUFFIXES:
            if not word.endswith(suffix):
                continue
            cut = len(suffix)
            if suffix == "amente":
                if r1.endswith(suffix):
                    step1_removed = True
                    word, r2, rv = word[:-6], r2[:-6], rv[:-6]
                    if r2.endswith("iv"):
                        word, r2, rv = word[:-2], r2[:-2], rv[:-2]
                        if r2.endswith("at"):
                            word, rv = word[:-2], rv[:-2]
                    elif r2.endswith(("os", "ic", "ad")):
                        word, rv = word[:-2], rv[:-2]
            elif r2.endswith(suffix):
                step1_removed = True
                if suffix in _REPLACEMENTS:
                    repl = _REPLACEMENTS[suffix]
                    word = word[:-cut] + repl
                    rv = rv[:-cut] + repl
                elif suffix == "mente":
                    word, r2, rv = word[:-cut], r2[:-cut], rv[:-cut]
                    if r2.endswith(("ante", "able", "ible")):
                        word, rv = word[:-4], rv[:-4]
                elif suffix in _IDAD_SUFFIXES:
                    word, r2, rv = word[:-cut], r2[:-cut], rv[:-cut]
                    for pre in ("abil", "ic", "iv"):
                        if r2.endswith(pre):
                            word, rv = word[: -len(pre)], rv[: -len(pre)]
                elif suffix in _IVE_SUFFIXES:
                    word, r2, rv = word[:-cut], r2[:-cut], rv[:-cut]
                    if r2.endswith("at"):
                        word, rv = word[:-2], rv[:-2]
                elif suffix in _DELETE_IF_R2_THEN_IC:
                    word, r2, rv = word[:-cut], r2[:-cut], rv[:-cut]
                    if r2.endswith("ic"):
                        word, rv = word[:-2], rv[:-2]
                else:
                    word, r2, rv = word[:-cut], r2[:-cut], rv[:-cut]
            break

        if not step1_removed:
            # verb suffixes starting with 'y' after 'u' (construyeron, ...)
            for suffix in _STEP2A_SUFFIXES:
                if rv.endswith(suffix) and word[-len(suffix) - 1: -len(suffix)] == "u":
                    word, rv = word[: -len(suffix)], rv[: -len(suffix)]
                    break
            # remaining verb inflections
            for suffix in _STEP2B_SUFFIXES:
                if rv.endswith(suffix):
                    word, rv = word[: -len(suffix)], rv[: -len(suffix)]
                    if suffix in _STEP2B_GU_SUFFIXES:
                        if word.endswith("gu"):
                            word = word[:-1]
                        if rv.endswith("gu"):
                            rv = rv[:-1]
                    break

        # residual vowel endings
        for suffix in _STEP3_SUFFIXES:
            if rv.endswith(suffix):
                word = word[: -len(suffix)]
                if suffix in ("e", "é"):
                    rv = rv[: -len(suffix)]
                    if word[-2:] == "gu" and rv.endswith("u"):
                        word = word[:-1]
                break

        return _deaccent(word)


_DEFAULT_STEMMER = SpanishStemmer()


def stem(token: str) -> str:
    """Stem a single lowercase token."""
    return _DEFAULT_STEMMER.stem(token)


def preprocess(sonnet, stoplist: frozenset | set,
               stemmer: SpanishStemmer | None = None) -> ProcessedSonnet:
    """Tokenize all lines in order, drop stopwords, stem what remains.

    Positions are assigned after stopword removal, so retained tokens get
    consecutive indices starting at 0.
    """
    stemmer = stemmer or _DEFAULT_STEMMER
    retained = []
    for stanza in sonnet.stanzas:
        for line in stanza:
            retained.extend(remove_stopwords(tokenize(line), stoplist))
    tokens = tuple(
        Token(surface=tok, stem=stemmer.stem(tok), position=i)
        for i, tok in enumerate(retained)
    )
    return ProcessedSonnet(id=sonnet.id, tokens=tokens)
