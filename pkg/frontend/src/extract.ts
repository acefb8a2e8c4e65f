// Extraction jobs: encode a corpus with a named model and write the
// portable embedding file the core toolkit consumes.
//
// Token-level jobs align with the core's preprocessing by reading the
// token lists the core CLI emits (`sonetica preprocess`); when no tokens
// file is given, the core CLI is invoked to produce one.

import { spawnSync } from "node:child_process";
import { readFileSync, mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { readCorpus, type SonnetText } from "./corpus.js";
import { makeEncoder, type BackendName } from "./encoders.js";
import { writeEmbeddingFile, type EmbeddingRecord } from "./format.js";
import { modelSpec, type Level } from "./models.js";

export interface ExtractJob {
  corpusPath: string;
  model: string;
  level: Level;
  outPath: string;
  backend?: BackendName;
  /** Token lists from `sonetica preprocess`; produced on the fly if absent. */
  tokensPath?: string;
  stopwordsPath?: string;
  /** Sentence jobs encode the full text by default; "filtered" encodes
   * the retained tokens only. */
  sentenceText?: "full" | "filtered";
  /** Command used to reach the core CLI, e.g. ["python3", "-m", "sonetica.cli"]. */
  coreCommand?: string[];
}

interface TokenList {
  id: string;
  surfaces: string[];
}

export function readTokenLists(path: string): Map<string, string[]> {
  const out = new Map<string, string[]>();
  const lines = readFileSync(path, "utf-8").split("\n").filter((l) => l.trim());
  for (const line of lines) {
    const record = JSON.parse(line) as {
      id?: string;
      tokens?: { surface?: string }[];
    };
    if (typeof record.id !== "string" || !Array.isArray(record.tokens)) {
      throw new Error(`${path}: malformed token record`);
    }
    out.set(record.id, record.tokens.map((t) => String(t.surface)));
  }
  return out;
}

function corePreprocess(job: ExtractJob): Map<string, string[]> {
  const command = job.coreCommand ?? ["sonetica"];
  const dir = mkdtempSync(join(tmpdir(), "sonetica-extract-"));
  const tokensOut = join(dir, "tokens.jsonl");
  const args = [
    ...command.slice(1),
    "preprocess",
    "--corpus",
    job.corpusPath,
    "--out",
    tokensOut,
  ];
  if (job.stopwordsPath) {
    args.push("--stopwords", job.stopwordsPath);
  }
  try {
    const result = spawnSync(command[0], args, { encoding: "utf-8" });
    if (result.error || result.status !== 0) {
      const detail = result.error?.message ?? result.stderr;
      throw new Error(`core preprocess failed: ${detail}`);
    }
    return readTokenLists(tokensOut);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function tokenLists(job: ExtractJob, corpus: SonnetText[]): TokenList[] {
  const byId = job.tokensPath
    ? readTokenLists(job.tokensPath)
    : corePreprocess(job);
  const missing = corpus.filter((s) => !byId.has(s.id)).map((s) => s.id);
  if (missing.length > 0) {
    throw new Error(
      `token lists lack ${missing.length} corpus id(s): ${missing.slice(0, 5).join(", ")}`,
    );
  }
  return corpus.map((s) => ({ id: s.id, surfaces: byId.get(s.id)! }));
}

export async function runExtract(job: ExtractJob): Promise<void> {
  const spec = modelSpec(job.model);
  if (job.level !== spec.level) {
    throw new Error(
      `model '${job.model}' is ${spec.level}-level; cannot run a ${job.level} job`,
    );
  }
  const corpus = readCorpus(job.corpusPath);
  const encoder = makeEncoder(
    job.backend ?? "transformers",
    job.model,
    spec.hubId,
    spec.dim,
  );

  const records: EmbeddingRecord[] = [];
  if (job.level === "sentence") {
    let texts: Map<string, string>;
    if (job.sentenceText === "filtered") {
      texts = new Map(
        tokenLists(job, corpus).map(({ id, surfaces }) => [id, surfaces.join(" ")]),
      );
    } else {
      texts = new Map(corpus.map((s) => [s.id, s.text]));
    }
    for (const sonnet of corpus) {
      records.push({
        id: sonnet.id,
        vector: await encoder.encodeSentence(texts.get(sonnet.id)!),
      });
    }
  } else {
    for (const { id, surfaces } of tokenLists(job, corpus)) {
      const vectors = await encoder.encodeTokens(surfaces);
      records.push({
        id,
        tokens: surfaces.map((t, i) => ({ t, v: vectors[i] })),
      });
    }
  }
  writeEmbeddingFile(
    job.outPath,
    { model: job.model, level: job.level, dim: spec.dim },
    records,
  );
}
