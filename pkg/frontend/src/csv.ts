/**
 * CSV access for the benchmark output files.
 *
 * The harness writes plain comma-separated files and only ever quotes a
 * field that contains a comma, quote or newline, so a small RFC-4180
 * reader covers everything it can produce.
 */

import { readFileSync } from "fs";
import { basename } from "path";

export interface Table {
  /** path the table was read from, used in error messages */
  path: string;
  header: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): string[][] {
  const records: string[][] = [];
  let field = "";
  let record: string[] = [];
  let inQuotes = false;
  let i = 0;
  while (i < text.length) {
    const c = text[i];
    if (inQuotes) {
      if (c === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
      } else {
        field += c;
      }
      i++;
      continue;
    }
    if (c === '"') {
      inQuotes = true;
    } else if (c === ",") {
      record.push(field);
      field = "";
    } else if (c === "\n" || c === "\r") {
      if (c === "\r" && text[i + 1] === "\n") i++;
      record.push(field);
      records.push(record);
      field = "";
      record = [];
    } else {
      field += c;
    }
    i++;
  }
  if (field.length > 0 || record.length > 0) {
    record.push(field);
    records.push(record);
  }
  return records;
}

export function readTable(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const records = parseCsv(text);
  if (records.length === 0) {
    throw new SchemaError(`${basename(path)}: file is empty, expected a header row`);
  }
  return { path, header: records[0], rows: records.slice(1) };
}

/**
 * Resolve required column names to indices, naming every missing column.
 */
export function requireColumns(table: Table, names: string[]): Record<string, number> {
  const index: Record<string, number> = {};
  const missing: string[] = [];
  for (const name of names) {
    const i = table.header.indexOf(name);
    if (i < 0) {
      missing.push(name);
    } else {
      index[name] = i;
    }
  }
  if (missing.length > 0) {
    throw new SchemaError(
      `${basename(table.path)}: missing column${missing.length > 1 ? "s" : ""} ` +
        `${missing.map((n) => `"${n}"`).join(", ")} ` +
        `(file has: ${table.header.join(", ")})`
    );
  }
  return index;
}

/** Numeric cell access; the harness writes blank fields for missing metrics. */
export function num(row: string[], i: number): number {
  const cell = row[i];
  if (cell === undefined || cell === "") return NaN;
  return Number(cell);
}
