import fs from "node:fs";

export interface SweepRecord {
  variant: string;
  ineqCount: number;
  trial: number;
  seed: string;
  success: boolean;
  coeffAccuracy: number;
  iterations: number;
  wallMs: number;
}

export const EXPECTED_COLUMNS = [
  "variant",
  "ineq_count",
  "trial",
  "seed",
  "success",
  "coeff_accuracy",
  "iterations",
  "wall_ms",
] as const;

export class SchemaError extends Error {
  constructor(public readonly missing: string[]) {
    super(`CSV is missing required columns: ${missing.join(", ")}`);
    this.name = "SchemaError";
  }
}

export function parseSweepCsv(text: string): SweepRecord[] {
  const lines = text.split(/\r?\n/).filter((line) => line.trim() !== "");
  if (lines.length === 0) {
    throw new SchemaError([...EXPECTED_COLUMNS]);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const index = new Map(header.map((name, i) => [name, i]));
  const missing = EXPECTED_COLUMNS.filter((name) => !index.has(name));
  if (missing.length > 0) {
    throw new SchemaError(missing);
  }
  const records: SweepRecord[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    const cell = (name: string) => cells[index.get(name)!];
    records.push({
      variant: cell("variant"),
      ineqCount: Number(cell("ineq_count")),
      trial: Number(cell("trial")),
      seed: cell("seed"),
      success: cell("success") === "1",
      coeffAccuracy: Number(cell("coeff_accuracy")),
      iterations: Number(cell("iterations")),
      wallMs: Number(cell("wall_ms")),
    });
  }
  return records;
}

export function readSweepCsvFiles(paths: string[]): SweepRecord[] {
  return paths.flatMap((p) => parseSweepCsv(fs.readFileSync(p, "utf-8")));
}
