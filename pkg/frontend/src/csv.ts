/** Parsing and validation of the harness CSV schema. */

export const REQUIRED_COLUMNS = ["algorithm", "run", "step", "mspbe", "mstde", "diverged"] as const;

export type Metric = "mspbe" | "mstde";

export interface MetricRow {
  algorithm: string;
  run: number;
  step: number;
  mspbe: number;
  mstde: number;
  diverged: boolean;
}

/** Raised when an input file does not carry the expected schema. */
export class SchemaError extends Error {
  constructor(
    readonly source: string,
    readonly column: string,
    detail: string,
  ) {
    super(`${source}: column "${column}" ${detail}`);
    this.name = "SchemaError";
  }
}

export function parseCsv(text: string, source: string): MetricRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaError(source, REQUIRED_COLUMNS[0], "is missing (empty file)");
  }

  const header = lines[0].split(",").map((name) => name.trim());
  for (const column of REQUIRED_COLUMNS) {
    if (!header.includes(column)) {
      throw new SchemaError(source, column, "is missing from the header");
    }
  }
  const index = new Map(header.map((name, i) => [name, i]));

  const rows: MetricRow[] = [];
  for (let lineNo = 1; lineNo < lines.length; lineNo++) {
    const cells = lines[lineNo].split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(source, header[cells.length] ?? "?", `has no value on line ${lineNo + 1}`);
    }
    const numeric = (column: string): number => {
      const raw = cells[index.get(column)!];
      const value = Number(raw);
      if (!Number.isFinite(value)) {
        throw new SchemaError(source, column, `holds non-numeric value "${raw}" on line ${lineNo + 1}`);
      }
      return value;
    };
    rows.push({
      algorithm: cells[index.get("algorithm")!],
      run: numeric("run"),
      step: numeric("step"),
      mspbe: numeric("mspbe"),
      mstde: numeric("mstde"),
      diverged: cells[index.get("diverged")!].trim() === "1",
    });
  }
  return rows;
}
