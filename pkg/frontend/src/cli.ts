#!/usr/bin/env node
// sonetica-extract: encode a corpus file into a portable embedding file.
// Exit codes: 0 success, 1 usage error, 2 data/model error.

import { MODEL_REGISTRY, type Level } from "./models.js";
import { runExtract } from "./extract.js";
import type { BackendName } from "./encoders.js";

const USAGE = `usage: sonetica-extract --corpus FILE --model NAME --level sentence|token --out FILE
                        [--backend transformers|hash] [--tokens FILE]
                        [--stopwords FILE] [--sentence-text full|filtered]
                        [--core-cli COMMAND]

Models:
${Object.entries(MODEL_REGISTRY)
  .map(([name, spec]) => `  ${name}  (${spec.level}, ${spec.dim}d)`)
  .join("\n")}

Token-level jobs read the core CLI's preprocess output (--tokens) or
invoke it via --core-cli (default: sonetica).`;

class UsageError extends Error {}

interface Args {
  corpus: string;
  model: string;
  level: Level;
  out: string;
  backend: BackendName;
  tokens?: string;
  stopwords?: string;
  sentenceText: "full" | "filtered";
  coreCli?: string[];
}

function parseArgs(argv: string[]): Args {
  const named = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (flag === "--help" || flag === "-h") {
      console.log(USAGE);
      process.exit(0);
    }
    if (!flag.startsWith("--") || i + 1 >= argv.length) {
      throw new UsageError(`unexpected argument '${flag}'`);
    }
    named.set(flag.slice(2), argv[i + 1]);
  }
  for (const required of ["corpus", "model", "level", "out"]) {
    if (!named.has(required)) {
      throw new UsageError(`missing --${required}`);
    }
  }
  const level = named.get("level")!;
  if (level !== "sentence" && level !== "token") {
    throw new UsageError(`--level must be 'sentence' or 'token', got '${level}'`);
  }
  const backend = named.get("backend") ?? "transformers";
  if (backend !== "transformers" && backend !== "hash") {
    throw new UsageError(`--backend must be 'transformers' or 'hash'`);
  }
  const sentenceText = named.get("sentence-text") ?? "full";
  if (sentenceText !== "full" && sentenceText !== "filtered") {
    throw new UsageError(`--sentence-text must be 'full' or 'filtered'`);
  }
  return {
    corpus: named.get("corpus")!,
    model: named.get("model")!,
    level,
    out: named.get("out")!,
    backend,
    tokens: named.get("tokens"),
    stopwords: named.get("stopwords"),
    sentenceText,
    coreCli: named.get("core-cli")?.split(" "),
  };
}

export async function main(argv: string[]): Promise<number> {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`usage error: ${err.message}`);
      console.error(USAGE);
      return 1;
    }
    throw err;
  }
  try {
    await runExtract({
      corpusPath: args.corpus,
      model: args.model,
      level: args.level,
      outPath: args.out,
      backend: args.backend,
      tokensPath: args.tokens,
      stopwordsPath: args.stopwords,
      sentenceText: args.sentenceText,
      coreCommand: args.coreCli,
    });
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("sonetica-extract")) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
