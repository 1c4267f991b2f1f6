/**
 * Reader for the shared setup/punchline dataset format: delimited text with
 * a header row naming id, setup, punchline, label.
 */

import fs from "node:fs";

import Papa from "papaparse";

export interface DatasetSample {
  id: string;
  setup: string;
  punchline: string;
  label: 0 | 1;
}

const REQUIRED = ["id", "setup", "punchline", "label"] as const;

export function readDataset(path: string): DatasetSample[] {
  const text = fs.readFileSync(path, "utf-8");
  const delimiter = path.toLowerCase().endsWith(".csv") ? "," : "\t";
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    delimiter,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`${path}: parse error at row ${first.row}: ${first.message}`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const column of REQUIRED) {
    if (!fields.includes(column)) {
      throw new Error(`${path}: missing column '${column}'`);
    }
  }
  return parsed.data.map((row, index) => {
    const label = (row.label ?? "").trim();
    if (label !== "0" && label !== "1") {
      throw new Error(`${path}: row ${index + 2}: label must be 0 or 1, got '${label}'`);
    }
    return {
      id: (row.id ?? "").trim(),
      setup: (row.setup ?? "").trim(),
      punchline: (row.punchline ?? "").trim(),
      label: label === "1" ? 1 : 0,
    };
  });
}
