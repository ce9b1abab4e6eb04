/** Minimal CSV reader for the numeric tables the lowsnr CLI writes. */

export interface Table {
  header: string[];
  rows: number[][];
}

export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV: no header row");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new Error(`row ${i} has ${cells.length} cells, expected ${header.length}`);
    }
    rows.push(
      cells.map((c) => {
        if (c === "true") return 1;
        if (c === "false") return 0;
        const v = Number(c);
        if (Number.isNaN(v)) {
          throw new Error(`row ${i}: cell ${JSON.stringify(c)} is not numeric`);
        }
        return v;
      }),
    );
  }
  return { header, rows };
}

export function column(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`missing column ${JSON.stringify(name)} (have: ${table.header.join(", ")})`);
  }
  return table.rows.map((r) => r[idx]);
}
