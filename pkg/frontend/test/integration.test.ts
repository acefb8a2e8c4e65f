// Integration against the installed core CLI: token alignment with its
// preprocessing, and acceptance of extractor output by its consumers.

import { spawnSync } from "node:child_process";
import { writeFileSync } from "node:fs";
import { join } from "node:path";

import { beforeAll, describe, expect, it } from "vitest";

import { runExtract, readTokenLists } from "../src/extract.js";
import { readEmbeddingFile, type TokenRecord } from "../src/format.js";
import { TOY_LEXICON_CSV, writeFixtureCorpus } from "./fixtures.js";

const CORE = process.env.SONETICA_CMD?.split(" ") ?? ["sonetica"];

function core(args: string[]) {
  return spawnSync(CORE[0], [...CORE.slice(1), ...args], { encoding: "utf-8" });
}

beforeAll(() => {
  const probe = core(["--help"]);
  if (probe.error || probe.status !== 0) {
    throw new Error(
      "the core CLI is not reachable; install the sonetica package or set SONETICA_CMD",
    );
  }
});

describe("token-level extraction against core preprocessing", () => {
  it("emits one vector per retained token for every sonnet", async () => {
    const { dir, corpusPath } = writeFixtureCorpus(4);
    const tokensPath = join(dir, "tokens.jsonl");
    const result = core(["preprocess", "--corpus", corpusPath,
                         "--out", tokensPath]);
    expect(result.status).toBe(0);

    const out = join(dir, "tok-emb.jsonl");
    await runExtract({
      corpusPath,
      model: "bert-base-multilingual-cased",
      level: "token",
      outPath: out,
      backend: "hash",
      tokensPath,
    });
    const parsed = readEmbeddingFile(out);
    expect(parsed.header.dim).toBe(768);
    const expected = readTokenLists(tokensPath);
    expect(parsed.records).toHaveLength(4);
    for (const record of parsed.records as TokenRecord[]) {
      const surfaces = expected.get(record.id)!;
      expect(record.tokens.map((t) => t.t)).toEqual(surfaces);
      expect(record.tokens.length).toBeGreaterThan(0);
    }
  });

  it("sentence jobs can encode stopword-filtered text instead", async () => {
    const { dir, corpusPath } = writeFixtureCorpus(2);
    const full = join(dir, "full.jsonl");
    const filtered = join(dir, "filtered.jsonl");
    for (const [out, mode] of [[full, "full"], [filtered, "filtered"]] as const) {
      await runExtract({
        corpusPath,
        model: "stsb-xlm-r-multilingual",
        level: "sentence",
        outPath: out,
        backend: "hash",
        sentenceText: mode,
        coreCommand: CORE,
      });
    }
    const a = readEmbeddingFile(full).records[0] as { vector: number[] };
    const b = readEmbeddingFile(filtered).records[0] as { vector: number[] };
    expect(a.vector).not.toEqual(b.vector);
  });

  it("invokes the core CLI itself when no tokens file is given", async () => {
    const { dir, corpusPath } = writeFixtureCorpus(2);
    const out = join(dir, "auto-tok.jsonl");
    await runExtract({
      corpusPath,
      model: "dccuchile/bert-base-spanish-wwm-cased",
      level: "token",
      outPath: out,
      backend: "hash",
      coreCommand: CORE,
    });
    const parsed = readEmbeddingFile(out);
    expect(parsed.records).toHaveLength(2);
    expect((parsed.records[0] as TokenRecord).tokens.length).toBeGreaterThan(0);
  });
});

describe("core toolkit consumes extractor output", () => {
  it("pool accepts a token-level file", async () => {
    const { dir, corpusPath } = writeFixtureCorpus(3);
    const out = join(dir, "tok-emb.jsonl");
    await runExtract({
      corpusPath,
      model: "bert-base-multilingual-cased",
      level: "token",
      outPath: out,
      backend: "hash",
      coreCommand: CORE,
    });
    const lexiconPath = join(dir, "lexicon.csv");
    writeFileSync(lexiconPath, TOY_LEXICON_CSV, "utf-8");
    const pooled = join(dir, "pooled.jsonl");
    const result = core(["pool", "--tokens", out, "--lexicon", lexiconPath,
                         "--out", pooled]);
    expect(result.stderr).toBe("");
    expect(result.status).toBe(0);
    const parsed = readEmbeddingFile(pooled);
    expect(parsed.header.level).toBe("sentence");
    expect(parsed.records).toHaveLength(3);
  });

  it("train accepts a sentence-level file", async () => {
    const { dir, corpusPath } = writeFixtureCorpus(8);
    const out = join(dir, "sent-emb.jsonl");
    await runExtract({
      corpusPath,
      model: "distiluse-base-multilingual-cased-v1",
      level: "sentence",
      outPath: out,
      backend: "hash",
    });
    const config = join(dir, "run.toml");
    writeFileSync(
      config,
      '[data]\ncorpus = "corpus.json"\n\n' +
        '[embeddings]\ndistiluse = "sent-emb.jsonl"\n\n' +
        "[benchmark]\n" +
        'categories = ["psychological:solitude"]\n' +
        'predictive_models = ["LS-GBDT-RBF"]\n\n' +
        "[params]\ngamma = 0.5\ngbdt_trees = 4\ngbdt_min_samples_leaf = 1\n",
      "utf-8",
    );
    const result = core(["train", "--config", config,
                         "--out", join(dir, "models")]);
    expect(result.stderr).toBe("");
    expect(result.status).toBe(0);
  });
});
