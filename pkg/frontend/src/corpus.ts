// Minimal reader for the toolkit's corpus JSON: the extractor only needs
// ids and text, in corpus order.

import { readFileSync } from "node:fs";

export interface SonnetText {
  id: string;
  text: string;
}

export function readCorpus(path: string): SonnetText[] {
  let doc: unknown;
  try {
    doc = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    throw new Error(`cannot read corpus ${path}: ${(err as Error).message}`);
  }
  const sonnets = (doc as { sonnets?: unknown }).sonnets;
  if (!Array.isArray(sonnets)) {
    throw new Error(`${path}: corpus document needs a 'sonnets' array`);
  }
  const seen = new Set<string>();
  const out: SonnetText[] = [];
  for (const entry of sonnets) {
    const { id, stanzas } = entry as { id?: unknown; stanzas?: unknown };
    if (typeof id !== "string" || !id) {
      throw new Error(`${path}: sonnet without a string id`);
    }
    if (seen.has(id)) {
      throw new Error(`${path}: duplicate sonnet id '${id}'`);
    }
    seen.add(id);
    if (!Array.isArray(stanzas)) {
      throw new Error(`${path}: sonnet '${id}' has no stanzas`);
    }
    const lines: string[] = [];
    for (const stanza of stanzas) {
      if (!Array.isArray(stanza)) {
        throw new Error(`${path}: sonnet '${id}' has a non-list stanza`);
      }
      for (const line of stanza) {
        if (typeof line !== "string") {
          throw new Error(`${path}: sonnet '${id}' has a non-string line`);
        }
        lines.push(line);
      }
    }
    out.push({ id, text: lines.join("\n") });
  }
  return out;
}
