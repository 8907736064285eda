/**
 * Minimal CSV handling for bench result tables.
 *
 * The server emits plain comma-separated values with a header row and no
 * quoting (column names and numbers only), so a split-based parser is
 * exact here — not a general CSV implementation.
 */

import { ProtocolViolationError } from './errors.js';

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split('\n').filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new ProtocolViolationError('empty CSV payload');
  }
  const header = (lines[0] as string).split(',');
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(',');
    if (cells.length !== header.length) {
      throw new ProtocolViolationError(
        `CSV row ${i + 1} has ${cells.length} cells, header has ${header.length}`,
      );
    }
    return cells;
  });
  return { header, rows };
}

/** One column as numbers; throws if the column is missing or non-numeric. */
export function numericColumn(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx === -1) {
    throw new ProtocolViolationError(
      `no column ${JSON.stringify(name)} in [${table.header.join(', ')}]`,
    );
  }
  return table.rows.map((row, i) => {
    const value = Number(row[idx]);
    if (!Number.isFinite(value)) {
      throw new ProtocolViolationError(
        `row ${i + 1}, column ${name}: not a finite number: ${row[idx]}`,
      );
    }
    return value;
  });
}
