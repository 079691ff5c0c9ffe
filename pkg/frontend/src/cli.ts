#!/usr/bin/env node
import fs from "node:fs";

import { readSweepCsvFiles, SchemaError } from "./csv.js";
import { FigureKind, render } from "./plots.js";

const KINDS: FigureKind[] = ["success-scatter", "time-curve", "mean-time-bars"];

function usage(): never {
  console.error("usage: analysis <success-scatter|time-curve|mean-time-bars> --in <csv> [--in <csv> ...] --out <svg>");
  process.exit(2);
}

export function main(argv: string[]): number {
  const [kind, ...rest] = argv;
  if (!kind || !KINDS.includes(kind as FigureKind)) {
    usage();
  }
  const inputs: string[] = [];
  let out: string | undefined;
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) {
      usage();
    }
    if (flag === "--in") {
      inputs.push(value);
    } else if (flag === "--out") {
      out = value;
    } else {
      usage();
    }
  }
  if (inputs.length === 0 || !out) {
    usage();
  }
  try {
    const records = readSweepCsvFiles(inputs);
    fs.writeFileSync(out, render(kind as FigureKind, records));
  } catch (error) {
    if (error instanceof SchemaError) {
      console.error(error.message);
      return 1;
    }
    throw error;
  }
  console.error(`wrote ${out}`);
  return 0;
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!)) {
  process.exit(main(process.argv.slice(2)));
}
