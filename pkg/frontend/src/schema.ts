/**
 * Schema for the experiment-harness CSV contract.
 *
 * Fixed column order: experiment_id, kind, instance, n, m, seed, value,
 * std_error, method, extra (a JSON blob carrying instance parameters and
 * the theoretical targets, so reference lines never need re-deriving).
 */

import Papa from "papaparse";

export const CSV_COLUMNS = [
  "experiment_id",
  "kind",
  "instance",
  "n",
  "m",
  "seed",
  "value",
  "std_error",
  "method",
  "extra",
] as const;

export type ExperimentKind =
  | "kl_rate"
  | "dimension"
  | "risk_curve"
  | "bounds"
  | "compare";

export interface Row {
  experiment_id: string;
  kind: ExperimentKind;
  instance: string;
  n: number;
  m: number;
  seed: number;
  value: number;
  std_error: number;
  method: string;
  extra: Record<string, unknown>;
}

export class SchemaError extends Error {}

const KINDS = new Set(["kl_rate", "dimension", "risk_curve", "bounds", "compare"]);

function parseNumber(field: string, raw: string, line: number): number {
  const v = Number(raw);
  if (raw === "" || Number.isNaN(v)) {
    throw new SchemaError(`row ${line}: ${field} is not a number: ${raw}`);
  }
  return v;
}

/** Parse and validate CSV text; throws SchemaError on any violation. */
export function parseCsv(text: string): Row[] {
  if (text.trim() === "") {
    throw new SchemaError("empty CSV: no header row");
  }
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV parse error: ${parsed.errors[0].message}`);
  }
  const data = parsed.data;
  if (data.length === 0) {
    throw new SchemaError("empty CSV: no header row");
  }
  const header = data[0];
  if (header.join(",") !== CSV_COLUMNS.join(",")) {
    throw new SchemaError(
      `unexpected columns: ${header.join(",")} (want ${CSV_COLUMNS.join(",")})`,
    );
  }
  if (data.length === 1) {
    throw new SchemaError("empty CSV: header but no records");
  }
  return data.slice(1).map((cells, i) => {
    const line = i + 2;
    if (cells.length !== CSV_COLUMNS.length) {
      throw new SchemaError(`row ${line}: expected ${CSV_COLUMNS.length} cells`);
    }
    const kind = cells[1];
    if (!KINDS.has(kind)) {
      throw new SchemaError(`row ${line}: unknown kind ${kind}`);
    }
    let extra: Record<string, unknown>;
    try {
      extra = JSON.parse(cells[9]);
    } catch {
      throw new SchemaError(`row ${line}: extra is not valid JSON`);
    }
    return {
      experiment_id: cells[0],
      kind: kind as ExperimentKind,
      instance: cells[2],
      n: parseNumber("n", cells[3], line),
      m: parseNumber("m", cells[4], line),
      seed: parseNumber("seed", cells[5], line),
      value: parseNumber("value", cells[6], line),
      std_error: parseNumber("std_error", cells[7], line),
      method: cells[8],
      extra,
    };
  });
}

/** Serialize rows back to the canonical CSV layout (for round-trip checks). */
export function serializeCsv(rows: Row[]): string {
  const body = rows.map((r) =>
    Papa.unparse(
      [[
        r.experiment_id,
        r.kind,
        r.instance,
        String(r.n),
        String(r.m),
        String(r.seed),
        formatNumber(r.value),
        formatNumber(r.std_error),
        r.method,
        JSON.stringify(sortKeys(r.extra)),
      ]],
      { newline: "\n" },
    ),
  );
  return [CSV_COLUMNS.join(","), ...body].join("\n") + "\n";
}

/** Mirror the harness float format: shortest representation, 12 significant digits. */
export function formatNumber(x: number): string {
  if (Number.isInteger(x) && Math.abs(x) < 1e15) return x.toString();
  const fixed = x.toPrecision(12);
  // trim trailing zeros the way Python's %.12g does
  return String(Number(fixed));
}

function sortKeys(obj: Record<string, unknown>): Record<string, unknown> {
  return Object.fromEntries(Object.entries(obj).sort(([a], [b]) => (a < b ? -1 : 1)));
}

/** Numeric field from the extra blob, with a schema-level error if missing. */
export function extraNumber(row: Row, key: string): number {
  const v = row.extra[key];
  if (typeof v !== "number") {
    throw new SchemaError(`extra.${key} missing or not a number on a ${row.kind} row`);
  }
  return v;
}
