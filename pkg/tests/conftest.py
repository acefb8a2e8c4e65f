import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sonetica.corpus import PSYCHOLOGICAL_CATEGORIES, SCALED_CATEGORIES

DATA_DIR = Path(__file__).parent / "data"


def make_annotation(psych_overrides=None, scaled_overrides=None):
    """A full annotation dict with every category present."""
    psych = {name: 0 for name in PSYCHOLOGICAL_CATEGORIES}
    scaled = {name: 1 for name in SCALED_CATEGORIES}
    psych.update(psych_overrides or {})
    scaled.update(scaled_overrides or {})
    return {"psychological": psych, "scaled": scaled}


def make_sonnet(sid, lines=None, shape=(4, 4, 3, 3), source="DISCO_PAL",
                period="XVI", line_text="el mar canta de noche"):
    if lines is None:
        lines = []
        for n in shape:
            lines.append([line_text for _ in range(n)])
    return {
        "id": sid, "author": "anon", "period": period,
        "title": f"Soneto {sid}", "source": source, "stanzas": lines,
    }


@pytest.fixture
def toy_corpus_doc():
    return {
        "sonnets": [
            make_sonnet("s1"),
            make_sonnet("s2", source="DISCO", period="XVII"),
            make_sonnet("s3", source="XX_EXTENSION", period="XX"),
        ],
        "annotations": {
            "s1": make_annotation({"solitude": 1}, {"valence": 3}),
        },
    }


@pytest.fixture
def toy_corpus_file(tmp_path, toy_corpus_doc):
    path = tmp_path / "corpus.json"
    path.write_text(json.dumps(toy_corpus_doc, ensure_ascii=False),
                    encoding="utf-8")
    return path


TOY_LEXICON_CSV = """\
word,valence_mean,valence_sd,arousal_mean,arousal_sd,happiness_mean,happiness_sd,sadness_mean,sadness_sd
mar,7.0,1.0,3.0,0.5,4.0,0.8,,
canto,8.0,0.5,5.0,1.5,,,,
noche,4.0,2.0,4.0,1.0,,,2.5,0.7
luz,6.0,1.5,,,,,,
"""


@pytest.fixture
def toy_lexicon_file(tmp_path):
    path = tmp_path / "lexicon.csv"
    path.write_text(TOY_LEXICON_CSV, encoding="utf-8")
    return path
