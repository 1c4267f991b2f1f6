/**
 * Record production: condition the model on the setup, score every punchline
 * token position, and write one JSON line per sample.
 *
 * Output field names (sample_id, token_entropies, token_logprobs) are the
 * contract with the consumer and must not change. The first line echoes the
 * run configuration. Samples whose punchline yields zero tokens under the
 * model tokenizer are skipped and listed in a sidecar `.errors` file.
 */

import fs from "node:fs";

import { DatasetSample } from "./dataset.js";
import { EOS, TrigramModel } from "./model.js";

export type SeparatorPolicy = "none" | "eos";

export interface DumpOptions {
  separator?: SeparatorPolicy;
  modelPath?: string;
}

export interface RecordLine {
  sample_id: string;
  token_entropies: number[];
  token_logprobs: number[];
}

export interface DumpResult {
  records: RecordLine[];
  skipped: { id: string; reason: string }[];
  header: Record<string, unknown>;
}

export function scoreSample(
  model: TrigramModel,
  sample: DatasetSample,
  separator: SeparatorPolicy,
): RecordLine | null {
  const setupTokens = model.tokenizeText(sample.setup);
  const punchlineTokens = model.tokenizeText(sample.punchline);
  if (punchlineTokens.length === 0) {
    return null;
  }
  const history = [...setupTokens];
  if (separator === "eos") {
    history.push(EOS);
  }
  const entropies: number[] = [];
  const logprobs: number[] = [];
  for (const token of punchlineTokens) {
    const { entropy, logprob } = model.scorePosition(history, token);
    entropies.push(entropy);
    logprobs.push(logprob);
    history.push(token);
  }
  return {
    sample_id: sample.id,
    token_entropies: entropies,
    token_logprobs: logprobs,
  };
}

export function dumpRecords(
  model: TrigramModel,
  samples: DatasetSample[],
  options: DumpOptions = {},
): DumpResult {
  const separator = options.separator ?? "none";
  const records: RecordLine[] = [];
  const skipped: { id: string; reason: string }[] = [];
  for (const sample of samples) {
    const record = scoreSample(model, sample, separator);
    if (record === null) {
      skipped.push({ id: sample.id, reason: "punchline has no tokens" });
    } else {
      records.push(record);
    }
  }
  const header = {
    model: model.name,
    model_path: options.modelPath ?? null,
    separator,
    vocabulary_size: model.vocabularySize,
  };
  return { records, skipped, header };
}

export function formatRecordFile(result: DumpResult): string {
  const lines = [JSON.stringify({ header: result.header })];
  for (const record of result.records) {
    lines.push(JSON.stringify(record));
  }
  return lines.join("\n") + "\n";
}

export function writeRecordFile(result: DumpResult, outputPath: string): void {
  fs.writeFileSync(outputPath, formatRecordFile(result), "utf-8");
  const sidecar = outputPath + ".errors";
  if (result.skipped.length > 0) {
    const lines = result.skipped.map((s) => `${s.id}\t${s.reason}`);
    fs.writeFileSync(sidecar, lines.join("\n") + "\n", "utf-8");
  } else if (fs.existsSync(sidecar)) {
    fs.rmSync(sidecar);
  }
}
