// The portable embedding file format the core toolkit consumes: JSON
// Lines with a header record, then one record per sonnet. Writes are
// atomic (temp file + rename) and floats keep full precision.

import { readFileSync, renameSync, rmSync, writeFileSync } from "node:fs";

import type { Level } from "./models.js";

export interface Header {
  model: string;
  level: Level;
  dim: number;
}

export interface SentenceRecord {
  id: string;
  vector: number[];
}

export interface TokenRecord {
  id: string;
  tokens: { t: string; v: number[] }[];
}

export type EmbeddingRecord = SentenceRecord | TokenRecord;

export function writeEmbeddingFile(
  path: string,
  header: Header,
  records: EmbeddingRecord[],
): void {
  const lines = [JSON.stringify(header)];
  for (const record of records) {
    lines.push(JSON.stringify(record));
  }
  const tmp = `${path}.tmp-${process.pid}`;
  try {
    writeFileSync(tmp, lines.join("\n") + "\n", "utf-8");
    renameSync(tmp, path);
  } catch (err) {
    rmSync(tmp, { force: true });
    throw err;
  }
}

export interface ParsedFile {
  header: Header;
  records: EmbeddingRecord[];
}

/** Parse and validate an embedding file against the documented schema. */
export function readEmbeddingFile(path: string): ParsedFile {
  const lines = readFileSync(path, "utf-8").split("\n").filter((l) => l.trim());
  if (lines.length === 0) {
    throw new Error(`${path}: empty embedding file`);
  }
  const header = JSON.parse(lines[0]) as Header;
  if (typeof header.model !== "string") {
    throw new Error(`${path}: header missing 'model'`);
  }
  if (header.level !== "sentence" && header.level !== "token") {
    throw new Error(`${path}: header level must be 'sentence' or 'token'`);
  }
  if (!Number.isInteger(header.dim) || header.dim <= 0) {
    throw new Error(`${path}: header dim must be a positive integer`);
  }
  const seen = new Set<string>();
  const records: EmbeddingRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    const record = JSON.parse(lines[i]) as EmbeddingRecord;
    if (typeof record.id !== "string" || !record.id) {
      throw new Error(`${path}:${i + 1}: record without a string id`);
    }
    if (seen.has(record.id)) {
      throw new Error(`${path}:${i + 1}: duplicate id '${record.id}'`);
    }
    seen.add(record.id);
    if (header.level === "sentence") {
      const vector = (record as SentenceRecord).vector;
      if (!Array.isArray(vector) || vector.length !== header.dim ||
          !vector.every((x) => typeof x === "number" && Number.isFinite(x))) {
        throw new Error(`${path}:${i + 1}: vector must hold ${header.dim} numbers`);
      }
    } else {
      const tokens = (record as TokenRecord).tokens;
      if (!Array.isArray(tokens)) {
        throw new Error(`${path}:${i + 1}: token record needs 'tokens'`);
      }
      for (const token of tokens) {
        if (typeof token.t !== "string" || !Array.isArray(token.v) ||
            token.v.length !== header.dim) {
          throw new Error(
            `${path}:${i + 1}: token vectors must hold ${header.dim} numbers`);
        }
      }
    }
    records.push(record);
  }
  return { header, records };
}
