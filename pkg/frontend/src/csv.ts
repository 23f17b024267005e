/**
 * Strict numeric CSV loading with per-cell diagnostics.
 *
 * Both emitted CSV schemas are fixed-width numeric tables; any deviation
 * (missing or extra columns, empty or non-numeric cells) is reported with
 * the offending column name and one-based data row number.
 */

import { readFileSync } from "fs";
import Papa from "papaparse";
import { FigureInputError } from "./errors.js";
import {
  PROFILE_COLUMNS,
  SWEEP_COLUMNS,
  type ProfileRow,
  type SweepRow,
} from "./schemas.js";

interface TableOptions {
  // columns where the emitter writes "nan"/"inf" placeholders on failed rows
  allowNonFinite?: readonly string[];
}

const NON_FINITE: Record<string, number> = {
  nan: Number.NaN,
  inf: Number.POSITIVE_INFINITY,
  "-inf": Number.NEGATIVE_INFINITY,
};

export function parseNumericTable(
  text: string,
  source: string,
  columns: readonly string[],
  opts: TableOptions = {}
): Record<string, number>[] {
  if (text.trim() === "") {
    throw new FigureInputError(`${source}: file is empty`);
  }
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  const missing = columns.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new FigureInputError(
      `${source}: missing column(s) ${missing.map((c) => `"${c}"`).join(", ")} ` +
        `(header has: ${fields.join(", ")})`
    );
  }
  const extra = fields.filter((c) => !columns.includes(c));
  if (extra.length > 0) {
    throw new FigureInputError(
      `${source}: unexpected column(s) ${extra.map((c) => `"${c}"`).join(", ")}`
    );
  }
  if (parsed.data.length === 0) {
    throw new FigureInputError(`${source}: no data rows`);
  }
  const allowNonFinite = opts.allowNonFinite ?? [];
  return parsed.data.map((raw, i) => {
    const row: Record<string, number> = {};
    for (const col of columns) {
      const cell = (raw[col] ?? "").trim();
      if (cell === "") {
        throw new FigureInputError(
          `${source}: column "${col}", row ${i + 1}: empty cell`
        );
      }
      const sentinel = NON_FINITE[cell.toLowerCase()];
      if (sentinel !== undefined) {
        if (!allowNonFinite.includes(col)) {
          throw new FigureInputError(
            `${source}: column "${col}", row ${i + 1}: non-finite value "${cell}"`
          );
        }
        row[col] = sentinel;
        continue;
      }
      const value = Number(cell);
      if (!Number.isFinite(value)) {
        throw new FigureInputError(
          `${source}: column "${col}", row ${i + 1}: non-numeric value "${cell}"`
        );
      }
      row[col] = value;
    }
    return row;
  });
}

function readText(path: string): string {
  try {
    return readFileSync(path, "utf-8");
  } catch (err) {
    const detail = err instanceof Error ? err.message : String(err);
    throw new FigureInputError(`cannot read ${path}: ${detail}`);
  }
}

export function parseProfilesCsv(text: string, source: string): ProfileRow[] {
  return parseNumericTable(text, source, PROFILE_COLUMNS) as ProfileRow[];
}

export function parseSweepCsv(text: string, source: string): SweepRow[] {
  const rows = parseNumericTable(text, source, SWEEP_COLUMNS, {
    allowNonFinite: [
      "max_alpha",
      "terminal_alpha",
      "transverse_momentum_max",
      "flux_drift",
    ],
  }) as SweepRow[];
  for (const [i, row] of rows.entries()) {
    if (row.converged !== 0 && row.converged !== 1) {
      throw new FigureInputError(
        `${source}: column "converged", row ${i + 1}: expected 0 or 1, got ${row.converged}`
      );
    }
  }
  return rows;
}

export function loadProfilesCsv(path: string): ProfileRow[] {
  return parseProfilesCsv(readText(path), path);
}

export function loadSweepCsv(path: string): SweepRow[] {
  return parseSweepCsv(readText(path), path);
}
