import { mkdtempSync, readdirSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";

import { describe, expect, it } from "vitest";

import { readEmbeddingFile, writeEmbeddingFile } from "../src/format.js";

function tmp(name: string): string {
  return join(mkdtempSync(join(tmpdir(), "format-")), name);
}

describe("embedding file format", () => {
  it("round-trips sentence records with exact floats", () => {
    const path = tmp("s.jsonl");
    const vector = [0.1, -2.5e-9, 3.125, 1 / 3];
    writeEmbeddingFile(path, { model: "m", level: "sentence", dim: 4 }, [
      { id: "a", vector },
    ]);
    const parsed = readEmbeddingFile(path);
    expect(parsed.header).toEqual({ model: "m", level: "sentence", dim: 4 });
    expect((parsed.records[0] as { vector: number[] }).vector).toEqual(vector);
  });

  it("round-trips token records", () => {
    const path = tmp("t.jsonl");
    writeEmbeddingFile(path, { model: "m", level: "token", dim: 2 }, [
      { id: "a", tokens: [{ t: "mar", v: [1, 2] }, { t: "luz", v: [3, 4] }] },
    ]);
    const parsed = readEmbeddingFile(path);
    expect(parsed.header.level).toBe("token");
    const record = parsed.records[0] as { tokens: { t: string }[] };
    expect(record.tokens.map((t) => t.t)).toEqual(["mar", "luz"]);
  });

  it("rejects wrong vector widths", () => {
    const path = tmp("bad.jsonl");
    writeFileSync(
      path,
      '{"model":"m","level":"sentence","dim":3}\n{"id":"a","vector":[1,2]}\n',
      "utf-8",
    );
    expect(() => readEmbeddingFile(path)).toThrow(/3 numbers/);
  });

  it("rejects duplicate ids", () => {
    const path = tmp("dup.jsonl");
    writeFileSync(
      path,
      '{"model":"m","level":"sentence","dim":1}\n' +
        '{"id":"a","vector":[1]}\n{"id":"a","vector":[2]}\n',
      "utf-8",
    );
    expect(() => readEmbeddingFile(path)).toThrow(/duplicate id/);
  });

  it("rejects bad headers", () => {
    const path = tmp("hdr.jsonl");
    writeFileSync(path, '{"model":"m","level":"word","dim":1}\n', "utf-8");
    expect(() => readEmbeddingFile(path)).toThrow(/level/);
  });

  it("writes are atomic (no temp file left behind)", () => {
    const path = tmp("atomic.jsonl");
    writeEmbeddingFile(path, { model: "m", level: "sentence", dim: 1 }, [
      { id: "a", vector: [1] },
    ]);
    expect(readFileSync(path, "utf-8")).toContain('"model"');
    expect(readdirSync(dirname(path))).toEqual(["atomic.jsonl"]);
  });
});
