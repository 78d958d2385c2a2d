export { parseCsv, SchemaError, REQUIRED_COLUMNS } from "./csv.js";
export type { Metric, MetricRow } from "./csv.js";
export { aggregate, extractRuns } from "./series.js";
export type { AggregatedSeries, RunSeries } from "./series.js";
export { renderChart, DEFAULT_OPTIONS, colorFor } from "./svg.js";
export type { ChartOptions } from "./svg.js";
export { render, renderRows, validateSpec } from "./plot.js";
export type { PlotSpec, RenderResult } from "./plot.js";
export { parseArgs, runCli } from "./cli.js";
