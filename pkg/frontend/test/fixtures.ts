// Corpus fixtures matching the core toolkit's schema.

import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

const PSYCHOLOGICAL = [
  "solitude", "anxiety", "illusion", "anger", "daydream", "instability",
  "grandeur", "idealization", "pride", "depression", "irritability",
  "disappointment", "dramatisation", "prejudice", "aversion", "insecurity",
  "helplessness", "vulnerability", "fear", "obsession", "compulsion",
];

const SCALED = [
  "valence", "arousal", "happiness", "disgust", "anger",
  "sadness", "fear", "concreteness", "imageability", "context_availability",
];

const LINES = [
  "El mar canta bajo la luna clara",
  "y la noche guarda su silencio",
  "una luz dorada en la ventana",
  "despierta el amor y su misterio",
];

function annotation(flip: number) {
  const psychological: Record<string, number> = {};
  PSYCHOLOGICAL.forEach((name, i) => {
    psychological[name] = (i + flip) % 2;
  });
  const scaled: Record<string, number> = {};
  SCALED.forEach((name, i) => {
    scaled[name] = ((i + flip) % 4) + 1;
  });
  return { psychological, scaled };
}

export function writeFixtureCorpus(nSonnets = 6, nAnnotated = 6): {
  dir: string;
  corpusPath: string;
} {
  const dir = mkdtempSync(join(tmpdir(), "extract-fixture-"));
  const sonnets = [];
  const annotations: Record<string, unknown> = {};
  for (let i = 0; i < nSonnets; i++) {
    const id = `fx-${i}`;
    sonnets.push({
      id,
      author: "anon",
      period: "XVI",
      title: `Soneto ${i}`,
      source: "DISCO_PAL",
      stanzas: [
        LINES.slice(0, 4),
        LINES.slice(0, 4),
        LINES.slice(0, 3),
        LINES.slice(0, 3),
      ],
    });
    if (i < nAnnotated) {
      annotations[id] = annotation(i);
    }
  }
  const corpusPath = join(dir, "corpus.json");
  writeFileSync(corpusPath, JSON.stringify({ sonnets, annotations }), "utf-8");
  return { dir, corpusPath };
}

export const TOY_LEXICON_CSV =
  "word,valence_mean,valence_sd,arousal_mean,arousal_sd\n" +
  "mar,7.0,1.0,3.0,0.5\n" +
  "canto,8.0,0.5,5.0,1.5\n" +
  "noche,4.0,2.0,4.0,1.0\n" +
  "luz,6.0,1.5,,\n";
