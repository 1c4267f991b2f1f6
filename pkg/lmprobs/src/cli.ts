#!/usr/bin/env node
/**
 * lmprobs dump  --dataset FILE --model NAME_OR_PATH --output FILE [--separator none|eos] [--models-dir DIR]
 * lmprobs train --corpus FILE --output FILE [--name NAME] [--min-count N] [--smoothing K]
 */

import fs from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { parseArgs } from "node:util";

import { readDataset } from "./dataset.js";
import { dumpRecords, SeparatorPolicy, writeRecordFile } from "./dump.js";
import { trainTrigramModel, TrigramModel } from "./model.js";

const PACKAGE_ROOT = path.resolve(path.dirname(fileURLToPath(import.meta.url)), "..");
const DEFAULT_MODELS_DIR = path.join(PACKAGE_ROOT, "models");

export function resolveModelPath(nameOrPath: string, modelsDir: string): string {
  if (fs.existsSync(nameOrPath) && fs.statSync(nameOrPath).isFile()) {
    return nameOrPath;
  }
  const candidate = path.join(modelsDir, `${nameOrPath}.json`);
  if (fs.existsSync(candidate)) {
    return candidate;
  }
  throw new Error(
    `model '${nameOrPath}' is not available locally ` +
      `(no such file, and ${candidate} does not exist)`,
  );
}

function runDump(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      dataset: { type: "string" },
      model: { type: "string" },
      output: { type: "string" },
      separator: { type: "string", default: "none" },
      "models-dir": { type: "string", default: DEFAULT_MODELS_DIR },
    },
  });
  if (!values.dataset || !values.model || !values.output) {
    throw new Error("dump requires --dataset, --model, and --output");
  }
  if (values.separator !== "none" && values.separator !== "eos") {
    throw new Error(`--separator must be 'none' or 'eos', got '${values.separator}'`);
  }
  const modelPath = resolveModelPath(values.model, values["models-dir"] as string);
  const model = TrigramModel.load(modelPath);
  const samples = readDataset(values.dataset);
  const result = dumpRecords(model, samples, {
    separator: values.separator as SeparatorPolicy,
    modelPath,
  });
  writeRecordFile(result, values.output);
  console.log(
    `wrote ${result.records.length} record(s) to ${values.output}` +
      (result.skipped.length > 0
        ? `; skipped ${result.skipped.length}, see ${values.output}.errors`
        : ""),
  );
  return 0;
}

function runTrain(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      corpus: { type: "string" },
      output: { type: "string" },
      name: { type: "string", default: "trigram" },
      "min-count": { type: "string", default: "2" },
      smoothing: { type: "string", default: "0.05" },
    },
  });
  if (!values.corpus || !values.output) {
    throw new Error("train requires --corpus and --output");
  }
  const corpus = fs.readFileSync(values.corpus, "utf-8");
  const model = trainTrigramModel(corpus, {
    name: values.name as string,
    minCount: Number(values["min-count"]),
    smoothingK: Number(values.smoothing),
  });
  fs.writeFileSync(values.output, JSON.stringify(model) + "\n", "utf-8");
  console.log(
    `trained '${model.name}': vocabulary ${model.vocabulary.length}, ` +
      `${Object.keys(model.contexts).length} contexts -> ${values.output}`,
  );
  return 0;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "dump") {
      return runDump(rest);
    }
    if (command === "train") {
      return runTrain(rest);
    }
    console.error("usage: lmprobs <dump|train> [options]");
    return 2;
  } catch (error) {
    console.error(`error: ${error instanceof Error ? error.message : error}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  path.resolve(process.argv[1]) === fileURLToPath(import.meta.url);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
