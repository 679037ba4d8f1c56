/**
 * Reader for rislink CSV artifacts: '#'-prefixed header comments, one
 * column-name row, then comma-separated data rows (no quoting or escapes
 * in this format).
 */

export interface Table {
  comments: string[];
  columns: string[];
  rows: Record<string, string>[];
}

export function parseTable(text: string): Table {
  const comments: string[] = [];
  let columns: string[] | null = null;
  const rows: Record<string, string>[] = [];

  for (const line of text.split("\n")) {
    if (line === "") continue;
    if (line.startsWith("#")) {
      comments.push(line);
      continue;
    }
    const cells = line.split(",");
    if (columns === null) {
      columns = cells;
      continue;
    }
    if (cells.length !== columns.length) {
      throw new Error(
        `malformed row (expected ${columns.length} cells, got ${cells.length}): ${line}`
      );
    }
    const row: Record<string, string> = {};
    columns.forEach((c, i) => (row[c] = cells[i]));
    rows.push(row);
  }
  if (columns === null) throw new Error("no column row found");
  return { comments, columns, rows };
}

/** Throw if any required column is absent, naming the first offender. */
export function requireColumns(table: Table, needed: string[], context: string): void {
  for (const col of needed) {
    if (!table.columns.includes(col)) {
      throw new Error(`missing column '${col}' in ${context}`);
    }
  }
}

/** Numeric column; empty cells are rejected unless allowEmpty skips them. */
export function floatColumn(table: Table, name: string): number[] {
  return table.rows.map((r) => {
    const v = Number(r[name]);
    if (r[name] === "" || Number.isNaN(v)) {
      throw new Error(`non-numeric cell in column '${name}': '${r[name]}'`);
    }
    return v;
  });
}
