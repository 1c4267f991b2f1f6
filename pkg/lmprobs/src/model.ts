/**
 * Word-trigram causal language model with Lidstone (add-k) smoothing.
 *
 * The model predicts a full probability distribution over its vocabulary at
 * every position, conditioned on the two previous tokens. Smoothing keeps
 * every vocabulary item strictly positive, so entropies and realized-token
 * log probabilities are always defined. Weights are plain JSON produced by
 * the bundled trainer and loaded read-only at scoring time.
 */

import fs from "node:fs";

import { tokenize } from "./tokenizer.js";

export const BOS = "<s>";
export const EOS = "</s>";
export const UNK = "<unk>";

export interface ModelFile {
  name: string;
  order: 3;
  smoothing_k: number;
  /** Prediction vocabulary; includes UNK and EOS, never BOS. */
  vocabulary: string[];
  /** context key "w1 w2" -> successor counts. */
  contexts: Record<string, Record<string, number>>;
}

export interface PositionScore {
  /** Entropy in nats of the full vocabulary distribution. */
  entropy: number;
  /** Natural log probability of the token actually observed. */
  logprob: number;
}

export class TrigramModel {
  readonly name: string;
  readonly smoothingK: number;
  readonly vocabulary: string[];
  private readonly vocabSet: Set<string>;
  private readonly contexts: Map<string, Map<string, number>>;
  private readonly contextTotals: Map<string, number>;

  constructor(file: ModelFile) {
    if (file.order !== 3) {
      throw new Error(`unsupported model order ${file.order}; expected 3`);
    }
    if (!(file.smoothing_k > 0)) {
      throw new Error(`smoothing_k must be positive, got ${file.smoothing_k}`);
    }
    if (file.vocabulary.length === 0) {
      throw new Error("model vocabulary is empty");
    }
    this.name = file.name;
    this.smoothingK = file.smoothing_k;
    this.vocabulary = [...file.vocabulary];
    this.vocabSet = new Set(this.vocabulary);
    if (!this.vocabSet.has(UNK)) {
      throw new Error(`model vocabulary must contain ${UNK}`);
    }
    this.contexts = new Map();
    this.contextTotals = new Map();
    for (const [key, successors] of Object.entries(file.contexts)) {
      const counts = new Map<string, number>();
      let total = 0;
      for (const [word, count] of Object.entries(successors)) {
        if (!this.vocabSet.has(word)) {
          throw new Error(`context ${key} references unknown word ${word}`);
        }
        counts.set(word, count);
        total += count;
      }
      this.contexts.set(key, counts);
      this.contextTotals.set(key, total);
    }
  }

  static load(path: string): TrigramModel {
    const raw = JSON.parse(fs.readFileSync(path, "utf-8")) as ModelFile;
    return new TrigramModel(raw);
  }

  get vocabularySize(): number {
    return this.vocabulary.length;
  }

  /** Map raw tokens into the model vocabulary. */
  intern(tokens: string[]): string[] {
    return tokens.map((t) => (this.vocabSet.has(t) ? t : UNK));
  }

  tokenizeText(text: string): string[] {
    return tokenize(text);
  }

  private contextKey(history: string[]): string {
    const a = history.length >= 2 ? history[history.length - 2] : BOS;
    const b = history.length >= 1 ? history[history.length - 1] : BOS;
    return `${a} ${b}`;
  }

  /**
   * Entropy of the next-token distribution and the log probability of
   * `observed`, given the history. Both use the smoothed distribution
   *   p(w) = (count(ctx, w) + k) / (total(ctx) + k * |V|),
   * evaluated sparsely: unobserved words share one floor probability.
   */
  scorePosition(history: string[], observed: string): PositionScore {
    const key = this.contextKey(this.intern(history));
    const counts = this.contexts.get(key);
    const total = this.contextTotals.get(key) ?? 0;
    const v = this.vocabularySize;
    const k = this.smoothingK;
    const denom = total + k * v;
    const floor = k / denom;

    let entropy = 0;
    let observedCount = 0;
    let distinct = 0;
    if (counts !== undefined) {
      for (const [word, count] of counts) {
        const p = (count + k) / denom;
        entropy -= p * Math.log(p);
        distinct += 1;
        if (word === observed) {
          observedCount = count;
        }
      }
    }
    const unseen = v - distinct;
    if (unseen > 0) {
      entropy -= unseen * floor * Math.log(floor);
    }

    const internedObserved = this.vocabSet.has(observed) ? observed : UNK;
    if (internedObserved !== observed) {
      observedCount = counts?.get(internedObserved) ?? 0;
    }
    const logprob = Math.log((observedCount + k) / denom);
    return { entropy: Math.max(entropy, 0), logprob: Math.min(logprob, 0) };
  }

  /** Full distribution for one context; used by tests to check normalization. */
  distribution(history: string[]): Map<string, number> {
    const key = this.contextKey(this.intern(history));
    const counts = this.contexts.get(key);
    const total = this.contextTotals.get(key) ?? 0;
    const denom = total + this.smoothingK * this.vocabularySize;
    const dist = new Map<string, number>();
    for (const word of this.vocabulary) {
      dist.set(word, ((counts?.get(word) ?? 0) + this.smoothingK) / denom);
    }
    return dist;
  }
}

export interface TrainOptions {
  name: string;
  smoothingK?: number;
  minCount?: number;
}

/**
 * Count trigrams over one sentence per line. Words below `minCount`
 * collapse into UNK so the unknown token carries real probability mass.
 */
export function trainTrigramModel(corpusText: string, options: TrainOptions): ModelFile {
  const smoothingK = options.smoothingK ?? 0.05;
  const minCount = options.minCount ?? 2;
  const lines = corpusText
    .split(/\r?\n/)
    .map((line) => tokenize(line))
    .filter((tokens) => tokens.length > 0);
  if (lines.length === 0) {
    throw new Error("training corpus contains no usable lines");
  }

  const frequency = new Map<string, number>();
  for (const tokens of lines) {
    for (const token of tokens) {
      frequency.set(token, (frequency.get(token) ?? 0) + 1);
    }
  }
  const vocabulary = [...frequency.entries()]
    .filter(([, count]) => count >= minCount)
    .map(([word]) => word)
    .sort();
  vocabulary.push(UNK, EOS);

  const keep = new Set(vocabulary);
  const contexts: Record<string, Record<string, number>> = {};
  for (const tokens of lines) {
    const mapped = tokens.map((t) => (keep.has(t) ? t : UNK));
    const stream = [BOS, BOS, ...mapped, EOS];
    for (let i = 2; i < stream.length; i++) {
      const key = `${stream[i - 2]} ${stream[i - 1]}`;
      const successors = (contexts[key] ??= {});
      successors[stream[i]] = (successors[stream[i]] ?? 0) + 1;
    }
  }

  return {
    name: options.name,
    order: 3,
    smoothing_k: smoothingK,
    vocabulary,
    contexts,
  };
}
