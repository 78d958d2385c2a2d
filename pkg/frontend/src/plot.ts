/** End-to-end rendering: CSV files in, SVG file out. */

import { readFileSync, writeFileSync } from "node:fs";

import { parseCsv, type Metric, type MetricRow } from "./csv.js";
import { aggregate, extractRuns, type AggregatedSeries } from "./series.js";
import { renderChart } from "./svg.js";

export interface PlotSpec {
  inputPaths: string[];
  metric: Metric;
  outputPath: string;
  logScale: boolean;
}

export interface RenderResult {
  svg: string;
  series: AggregatedSeries[];
}

export function validateSpec(spec: PlotSpec): void {
  if (spec.inputPaths.length === 0) {
    throw new Error("at least one input CSV is required");
  }
  if (spec.metric !== "mspbe" && spec.metric !== "mstde") {
    throw new Error(`metric must be "mspbe" or "mstde", got "${spec.metric}"`);
  }
}

/** Pure core: aggregate already-parsed rows and build the SVG. */
export function renderRows(rows: MetricRow[], metric: Metric, logScale: boolean): RenderResult {
  const series = aggregate(extractRuns(rows, metric));
  return { svg: renderChart(series, metric, logScale), series };
}

/** Read every input, render, and write the image file named by the spec. */
export function render(spec: PlotSpec): RenderResult {
  validateSpec(spec);
  const rows: MetricRow[] = [];
  for (const path of spec.inputPaths) {
    rows.push(...parseCsv(readFileSync(path, "utf8"), path));
  }
  const result = renderRows(rows, spec.metric, spec.logScale);
  writeFileSync(spec.outputPath, result.svg + "\n", "utf8");
  return result;
}
