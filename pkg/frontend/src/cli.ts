#!/usr/bin/env node
/**
 * hierbayes-plot: render a figure from an experiment-harness CSV.
 *
 *   plot --kind kl_rate --in klrate-b1.csv --out fig.svg
 *
 * Rendering is read-only and idempotent; on any validation error nothing
 * is written and the exit code is nonzero.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseCsv, SchemaError } from "./schema.js";
import { BUILDERS, renderFigure } from "./plots.js";

interface Args {
  kind: string;
  input: string;
  output: string;
}

function parseArgs(argv: string[]): Args {
  const args: Partial<Args> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new Error(`missing value for ${flag}`);
    switch (flag) {
      case "--kind":
        args.kind = value;
        break;
      case "--in":
        args.input = value;
        break;
      case "--out":
        args.output = value;
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (!args.kind || !args.input || !args.output) {
    throw new Error(
      `usage: plot --kind {${Object.keys(BUILDERS).join("|")}} --in file.csv --out fig.svg`,
    );
  }
  return args as Args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    const rows = parseCsv(readFileSync(args.input, "utf8"));
    const svg = renderFigure(args.kind, rows);
    writeFileSync(args.output, svg);
    console.log(`wrote ${args.output} (${rows.length} records)`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

// run when invoked directly (not imported by tests)
if (process.argv[1] && /cli\.(js|ts)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
