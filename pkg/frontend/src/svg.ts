/** Deterministic SVG rendering of aggregated learning curves. */

import type { Metric } from "./csv.js";
import type { AggregatedSeries } from "./series.js";

export interface ChartOptions {
  width: number;
  height: number;
  marginLeft: number;
  marginRight: number;
  marginTop: number;
  marginBottom: number;
  bandOpacity: number;
}

export const DEFAULT_OPTIONS: ChartOptions = {
  width: 880,
  height: 560,
  marginLeft: 86,
  marginRight: 24,
  marginTop: 40,
  marginBottom: 64,
  bandOpacity: 0.18,
};

const PALETTE = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const LOG_FLOOR = 1e-300;

interface Scale {
  toPixel(value: number): number;
  ticks: number[];
}

function linearScale(low: number, high: number, pixelLow: number, pixelHigh: number): Scale {
  const span = high - low || 1;
  const tickCount = 5;
  const ticks = Array.from({ length: tickCount + 1 }, (_, i) => low + (span * i) / tickCount);
  return {
    toPixel: (value) => pixelLow + ((value - low) / span) * (pixelHigh - pixelLow),
    ticks,
  };
}

function logScale(low: number, high: number, pixelLow: number, pixelHigh: number): Scale {
  const logLow = Math.log10(Math.max(low, LOG_FLOOR));
  const logHigh = Math.log10(Math.max(high, low * 10));
  const span = logHigh - logLow || 1;
  const ticks: number[] = [];
  for (let exponent = Math.ceil(logLow); exponent <= Math.floor(logHigh); exponent++) {
    ticks.push(10 ** exponent);
  }
  return {
    toPixel: (value) =>
      pixelLow + ((Math.log10(Math.max(value, LOG_FLOOR)) - logLow) / span) * (pixelHigh - pixelLow),
    ticks: ticks.length > 0 ? ticks : [low, high],
  };
}

function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) return value.toExponential(0);
  return String(Number(value.toPrecision(4)));
}

function polylinePoints(xs: number[], ys: number[]): string {
  return xs.map((x, i) => `${x.toFixed(2)},${ys[i].toFixed(2)}`).join(" ");
}

export function colorFor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

/** Build the full SVG document for the aggregated series. */
export function renderChart(
  series: AggregatedSeries[],
  metric: Metric,
  useLogScale: boolean,
  options: ChartOptions = DEFAULT_OPTIONS,
): string {
  if (series.length === 0) {
    throw new Error("nothing to plot: no series survived parsing");
  }
  const plotLeft = options.marginLeft;
  const plotRight = options.width - options.marginRight;
  const plotTop = options.marginTop;
  const plotBottom = options.height - options.marginBottom;

  const allValues = series.flatMap((s) => [...s.min, ...s.max]);
  const allSteps = series.flatMap((s) => s.steps);
  const positive = allValues.filter((v) => v > 0);
  const yLow = useLogScale ? Math.min(...(positive.length ? positive : [LOG_FLOOR])) : Math.min(0, ...allValues);
  const yHigh = Math.max(...allValues) || 1;
  const y = useLogScale
    ? logScale(yLow, yHigh, plotBottom, plotTop)
    : linearScale(yLow, yHigh * 1.05, plotBottom, plotTop);
  const x = linearScale(0, Math.max(...allSteps) || 1, plotLeft, plotRight);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${options.width}" height="${options.height}" viewBox="0 0 ${options.width} ${options.height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${options.width}" height="${options.height}" fill="#ffffff"/>`);

  // grid and axes
  for (const tick of y.ticks) {
    const py = y.toPixel(tick).toFixed(2);
    parts.push(
      `<line x1="${plotLeft}" y1="${py}" x2="${plotRight}" y2="${py}" stroke="#e4e4e4" stroke-width="1"/>`,
      `<text x="${plotLeft - 8}" y="${py}" dy="4" text-anchor="end" font-size="12" fill="#444">${formatTick(tick)}</text>`,
    );
  }
  for (const tick of x.ticks) {
    const px = x.toPixel(tick).toFixed(2);
    parts.push(
      `<line x1="${px}" y1="${plotBottom}" x2="${px}" y2="${plotBottom + 5}" stroke="#888" stroke-width="1"/>`,
      `<text x="${px}" y="${plotBottom + 22}" text-anchor="middle" font-size="12" fill="#444">${formatTick(tick)}</text>`,
    );
  }
  parts.push(
    `<line x1="${plotLeft}" y1="${plotTop}" x2="${plotLeft}" y2="${plotBottom}" stroke="#333" stroke-width="1.4"/>`,
    `<line x1="${plotLeft}" y1="${plotBottom}" x2="${plotRight}" y2="${plotBottom}" stroke="#333" stroke-width="1.4"/>`,
    `<text x="${(plotLeft + plotRight) / 2}" y="${options.height - 18}" text-anchor="middle" font-size="14" fill="#222">step</text>`,
    `<text x="22" y="${(plotTop + plotBottom) / 2}" text-anchor="middle" font-size="14" fill="#222" transform="rotate(-90 22 ${(plotTop + plotBottom) / 2})">${metric.toUpperCase()}</text>`,
  );

  series.forEach((entry, index) => {
    const color = colorFor(index);
    const xs = entry.steps.map((step) => x.toPixel(step));
    if (entry.runs > 1) {
      const upper = polylinePoints(xs, entry.max.map((v) => y.toPixel(v)));
      const lowerReversed = polylinePoints(
        [...xs].reverse(),
        [...entry.min].reverse().map((v) => y.toPixel(v)),
      );
      parts.push(
        `<polygon class="band" points="${upper} ${lowerReversed}" fill="${color}" fill-opacity="${options.bandOpacity}" stroke="none"/>`,
      );
    }
    const line = polylinePoints(xs, entry.mean.map((v) => y.toPixel(v)));
    parts.push(
      `<polyline class="mean-line" data-algorithm="${entry.algorithm}" points="${line}" fill="none" stroke="${color}" stroke-width="2"/>`,
    );
    if (entry.truncatedAt !== null) {
      const markerX = x.toPixel(entry.truncatedAt);
      const markerY = y.toPixel(entry.mean[entry.steps.indexOf(entry.truncatedAt)]);
      const arm = 6;
      parts.push(
        `<g class="divergence-marker" data-algorithm="${entry.algorithm}">` +
          `<line x1="${(markerX - arm).toFixed(2)}" y1="${(markerY - arm).toFixed(2)}" x2="${(markerX + arm).toFixed(2)}" y2="${(markerY + arm).toFixed(2)}" stroke="${color}" stroke-width="2.4"/>` +
          `<line x1="${(markerX - arm).toFixed(2)}" y1="${(markerY + arm).toFixed(2)}" x2="${(markerX + arm).toFixed(2)}" y2="${(markerY - arm).toFixed(2)}" stroke="${color}" stroke-width="2.4"/>` +
          `</g>`,
      );
    }
  });

  // legend
  series.forEach((entry, index) => {
    const lx = plotLeft + 14;
    const ly = plotTop + 10 + index * 20;
    const label = entry.runs > 1 ? `${entry.algorithm} (${entry.runs} runs)` : entry.algorithm;
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 26}" y2="${ly}" stroke="${colorFor(index)}" stroke-width="2.6"/>`,
      `<text x="${lx + 34}" y="${ly}" dy="4" font-size="13" fill="#222">${label}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
