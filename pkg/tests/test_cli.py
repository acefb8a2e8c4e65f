import json
from pathlib import Path

import numpy as np
import pytest

from sonetica.cli import main
from sonetica.corpus import save_corpus
from sonetica.datasets import make_planted_corpus
from sonetica.embeddings import (
    TokenEmbeddingStore,
    read_embeddings,
    write_embeddings,
)

from conftest import TOY_LEXICON_CSV


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Corpus + embeddings + lexicon + config files for CLI runs."""
    root = tmp_path_factory.mktemp("cli")
    corpus, store = make_planted_corpus(n_sonnets=60, annotated_fraction=0.3,
                                        seed=5)
    save_corpus(corpus, root / "corpus.json")
    write_embeddings(store, root / "emb.jsonl")
    (root / "lexicon.csv").write_text(TOY_LEXICON_CSV, encoding="utf-8")
    (root / "config.toml").write_text(
        '[data]\n'
        'corpus = "corpus.json"\n'
        'lexicons = ["lexicon.csv"]\n'
        '\n'
        '[embeddings]\n'
        'planted = "emb.jsonl"\n'
        '\n'
        '[benchmark]\n'
        'categories = ["psychological:solitude"]\n'
        'predictive_models = ["LS-GBDT-RBF"]\n'
        'n_repeats = 2\n'
        'n_per_value = 2\n'
        'seed = 3\n'
        '\n'
        '[params]\n'
        'gamma = 0.3\n'
        'gbdt_trees = 10\n'
        'gbdt_min_samples_leaf = 2\n',
        encoding="utf-8")
    return root


class TestExitCodes:
    def test_help_exits_zero(self):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0

    def test_missing_required_arg_is_usage_error(self, capsys):
        assert main(["preprocess"]) == 1
        assert "usage error" in capsys.readouterr().err

    def test_unknown_subcommand_is_usage_error(self):
        assert main(["dance"]) == 1

    def test_missing_file_is_data_error(self, tmp_path, capsys):
        code = main(["preprocess", "--corpus", str(tmp_path / "none.json"),
                     "--out", str(tmp_path / "out.jsonl")])
        assert code == 2
        assert "error" in capsys.readouterr().err


class TestPreprocess:
    def test_emits_tokens(self, workdir, tmp_path):
        out = tmp_path / "tokens.jsonl"
        assert main(["preprocess", "--corpus", str(workdir / "corpus.json"),
                     "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 60
        rec = json.loads(lines[0])
        assert rec["id"] == "syn-0000"
        positions = [t["position"] for t in rec["tokens"]]
        assert positions == list(range(len(positions)))


class TestFeatures:
    def test_csv_output(self, workdir, tmp_path):
        out = tmp_path / "features.csv"
        assert main(["features", "--corpus", str(workdir / "corpus.json"),
                     "--lexicon", str(workdir / "lexicon.csv"),
                     "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 61
        header = lines[0].split(",")
        assert header[0] == "id" and "sigma_val" in header

    def test_json_output(self, workdir, tmp_path):
        out = tmp_path / "features.json"
        assert main(["features", "--corpus", str(workdir / "corpus.json"),
                     "--lexicon", str(workdir / "lexicon.csv"),
                     "--format", "json", "--out", str(out)]) == 0
        doc = json.loads(out.read_text(encoding="utf-8"))
        assert len(doc) == 60
        first = doc["syn-0000"]
        assert set(first) == {"features", "matched_count", "token_count",
                              "degenerate_correlation"}


class TestCoverage:
    def test_prints_half(self, tmp_path, capsys):
        corpus = {
            "sonnets": [{"id": "c1", "author": "a", "period": "XVI",
                         "title": "t", "source": "DISCO",
                         "stanzas": [["mar luz bruma abismo"]]}],
            "annotations": {},
        }
        (tmp_path / "c.json").write_text(json.dumps(corpus), encoding="utf-8")
        (tmp_path / "lex.csv").write_text(
            "word,valence_mean\nmar,5.0\nluz,6.0\n", encoding="utf-8")
        code = main(["coverage", "--corpus", str(tmp_path / "c.json"),
                     "--lexicon", str(tmp_path / "lex.csv"),
                     "--stopwords", "/dev/null", "--mode", "types"])
        assert code == 0
        assert capsys.readouterr().out.strip() == "0.5"


class TestPool:
    def test_pools_token_file(self, workdir, tmp_path):
        store = TokenEmbeddingStore(model_name="toy-tokens", dim=2, vectors={
            "a": [("mar", np.array([1.0, 0.0])), ("luz", np.array([0.0, 1.0]))],
            "b": [("bruma", np.array([2.0, 2.0]))],
        })
        tok_path = tmp_path / "tokens.jsonl"
        write_embeddings(store, tok_path)
        out = tmp_path / "pooled.jsonl"
        assert main(["pool", "--tokens", str(tok_path),
                     "--lexicon", str(workdir / "lexicon.csv"),
                     "--out", str(out)]) == 0
        pooled = read_embeddings(out)
        assert pooled.dim == 2
        assert pooled.model_name == "toy-tokens-affpool"
        assert set(pooled.vectors) == {"a", "b"}
        # unknown stem -> weight 0 -> zero vector
        assert pooled.vectors["b"].tolist() == [0.0, 0.0]

    def test_sentence_file_rejected(self, workdir, tmp_path):
        code = main(["pool", "--tokens", str(workdir / "emb.jsonl"),
                     "--lexicon", str(workdir / "lexicon.csv"),
                     "--out", str(tmp_path / "x.jsonl")])
        assert code == 2


class TestBenchmarkCommand:
    def test_runs_and_is_byte_deterministic(self, workdir, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        for out in (out1, out2):
            code = main(["benchmark", "--config", str(workdir / "config.toml"),
                         "--seed", "7", "--out", str(out)])
            assert code == 0
        for name in ("report.json", "records.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        svg1 = sorted(p.name for p in out1.glob("*.svg"))
        assert svg1
        for name in svg1:
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_seed_flag_overrides_config(self, workdir, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["benchmark", "--config", str(workdir / "config.toml"),
              "--out", str(out1), "--no-svg"])
        main(["benchmark", "--config", str(workdir / "config.toml"),
              "--seed", "11", "--out", str(out2), "--no-svg"])
        doc1 = json.loads((out1 / "report.json").read_text())
        doc2 = json.loads((out2 / "report.json").read_text())
        assert doc1["config"]["resolved_seed"] == 3
        assert doc2["config"]["resolved_seed"] == 11

    def test_report_summary(self, workdir, tmp_path, capsys):
        out = tmp_path / "rep"
        main(["benchmark", "--config", str(workdir / "config.toml"),
              "--out", str(out), "--no-svg"])
        assert main(["report", "--report", str(out / "report.json")]) == 0
        text = capsys.readouterr().out
        assert "Best combination" in text
        assert "psychological:solitude" in text
        assert main(["report", "--report", str(out / "report.json"),
                     "--format", "csv"]) == 0


class TestTrainPredict:
    def test_train_then_predict(self, workdir, tmp_path):
        models = tmp_path / "models"
        assert main(["train", "--config", str(workdir / "config.toml"),
                     "--out", str(models)]) == 0
        manifest = json.loads((models / "manifest.json").read_text())
        assert len(manifest["combos"]) == 1
        combo_dir = models / manifest["combos"][0]["dir"]
        assert (combo_dir / "model.json").exists()
        assert (combo_dir / "scaling.json").exists()

        preds = tmp_path / "preds.json"
        assert main(["predict", "--config", str(workdir / "config.toml"),
                     "--models", str(models), "--out", str(preds)]) == 0
        doc = json.loads(preds.read_text(encoding="utf-8"))
        assert len(doc) == 60
        cell = doc["syn-0000"]["psychological:solitude"]["planted__LS-GBDT-RBF"]
        assert cell["classes"] == [0, 1]
        assert sum(cell["probabilities"]) == pytest.approx(1.0, abs=1e-9)
