/** `plot` command: learning curves from harness CSV logs.
 *
 * Usage: plot --metric mspbe|mstde --out FILE [--log-scale] file1.csv [file2.csv ...]
 * Exit codes: 0 success, 1 usage/configuration error, 2 bad input data.
 */

import { fileURLToPath } from "node:url";

import type { Metric } from "./csv.js";
import { render, type PlotSpec } from "./plot.js";

const USAGE =
  "usage: plot --metric {mspbe|mstde} --out FILE [--log-scale] file1.csv [file2.csv ...]";

export function parseArgs(argv: string[]): PlotSpec {
  let metric: string | null = null;
  let out: string | null = null;
  let logScale = false;
  const inputs: string[] = [];

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--metric") {
      metric = argv[++i];
    } else if (arg === "--out") {
      out = argv[++i];
    } else if (arg === "--log-scale") {
      logScale = true;
    } else if (arg.startsWith("--")) {
      throw new Error(`unknown flag: ${arg}`);
    } else {
      inputs.push(arg);
    }
  }
  if (metric !== "mspbe" && metric !== "mstde") {
    throw new Error("--metric must be mspbe or mstde");
  }
  if (!out) {
    throw new Error("--out is required");
  }
  if (inputs.length === 0) {
    throw new Error("at least one input CSV is required");
  }
  return { inputPaths: inputs, metric: metric as Metric, outputPath: out, logScale };
}

export function runCli(argv: string[]): number {
  let spec: PlotSpec;
  try {
    spec = parseArgs(argv);
  } catch (error) {
    console.error(`plot: ${(error as Error).message}`);
    console.error(USAGE);
    return 1;
  }
  try {
    const { series } = render(spec);
    const curves = series.map((s) => `${s.algorithm} (${s.runs} run${s.runs === 1 ? "" : "s"})`);
    console.log(`wrote ${spec.outputPath}: ${curves.join(", ")}`);
    return 0;
  } catch (error) {
    console.error(`plot: ${(error as Error).message}`);
    return 2;
  }
}

if (process.argv[1] && fileURLToPath(import.meta.url) === process.argv[1]) {
  process.exit(runCli(process.argv.slice(2)));
}
