// Pretrained encoders the extractor knows how to run, with the embedding
// width each one emits. Sentence models encode whole sonnets; token
// models emit one vector per retained word.

export type Level = "sentence" | "token";

export interface ModelSpec {
  dim: number;
  level: Level;
  /** Hub id used by the transformers backend. */
  hubId: string;
}

export const MODEL_REGISTRY: Record<string, ModelSpec> = {
  "quora-distilbert-multilingual": {
    dim: 768,
    level: "sentence",
    hubId: "sentence-transformers/quora-distilbert-multilingual",
  },
  "stsb-xlm-r-multilingual": {
    dim: 768,
    level: "sentence",
    hubId: "sentence-transformers/stsb-xlm-r-multilingual",
  },
  "paraphrase-multilingual-mpnet-base-v2": {
    dim: 768,
    level: "sentence",
    hubId: "sentence-transformers/paraphrase-multilingual-mpnet-base-v2",
  },
  "paraphrase-xlm-r-multilingual-v1": {
    dim: 768,
    level: "sentence",
    hubId: "sentence-transformers/paraphrase-xlm-r-multilingual-v1",
  },
  "distiluse-base-multilingual-cased-v1": {
    dim: 512,
    level: "sentence",
    hubId: "sentence-transformers/distiluse-base-multilingual-cased-v1",
  },
  "bert-base-multilingual-cased": {
    dim: 768,
    level: "token",
    hubId: "bert-base-multilingual-cased",
  },
  "dccuchile/bert-base-spanish-wwm-cased": {
    dim: 768,
    level: "token",
    hubId: "dccuchile/bert-base-spanish-wwm-cased",
  },
};

export function modelSpec(name: string): ModelSpec {
  const spec = MODEL_REGISTRY[name];
  if (!spec) {
    const known = Object.keys(MODEL_REGISTRY).join(", ");
    throw new Error(`unknown model '${name}' (known: ${known})`);
  }
  return spec;
}
