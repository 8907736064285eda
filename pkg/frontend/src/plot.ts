/**
 * Minimal SVG line plots for experiment tables — no rendering dependencies.
 *
 * Produces standalone SVG documents with linear or logarithmic axes, tick
 * labels and one polyline per series.  Intended for quick visual checks of
 * progressive-reset and endurance runs, not as a general plotting library.
 */

import { writeFile } from 'node:fs/promises';
import type { Table } from './csv.js';
import { numericColumn } from './csv.js';

export type Scale = 'linear' | 'log';

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color?: string;
}

export interface PlotOptions {
  title?: string;
  xLabel?: string;
  yLabel?: string;
  xScale?: Scale;
  yScale?: Scale;
  width?: number;
  height?: number;
}

const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e'];
const MARGIN = { top: 36, right: 24, bottom: 46, left: 72 };

interface Axis {
  toPixel(value: number): number;
  ticks: number[];
}

function niceLinearTicks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / count;
  const mag = 10 ** Math.floor(Math.log10(rawStep));
  const candidates = [1, 2, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => s >= rawStep) ?? candidates[3]!;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + step * 1e-9; v += step) ticks.push(v);
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); 10 ** e <= hi * (1 + 1e-9); e += 1) {
    if (10 ** e >= lo * (1 - 1e-9)) ticks.push(10 ** e);
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

function makeAxis(values: number[], scale: Scale, pixelLo: number, pixelHi: number): Axis {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (scale === 'log') {
    const positive = values.filter((v) => v > 0);
    if (positive.length === 0) throw new Error('log axis needs positive values');
    lo = Math.min(...positive);
    hi = Math.max(...positive);
    if (lo === hi) {
      lo /= 2;
      hi *= 2;
    }
    const tLo = Math.log10(lo);
    const tHi = Math.log10(hi);
    return {
      toPixel: (v) =>
        pixelLo + ((Math.log10(Math.max(v, lo)) - tLo) / (tHi - tLo)) * (pixelHi - pixelLo),
      ticks: logTicks(lo, hi),
    };
  }
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  return {
    toPixel: (v) => pixelLo + ((v - lo) / (hi - lo)) * (pixelHi - pixelLo),
    ticks: niceLinearTicks(lo, hi, 6),
  };
}

function formatTick(value: number, scale: Scale): string {
  if (scale === 'log') {
    const e = Math.round(Math.log10(value));
    return `1e${e}`;
  }
  if (value === 0) return '0';
  const abs = Math.abs(value);
  if (abs >= 1e5 || abs < 1e-3) return value.toExponential(0);
  return `${Number(value.toPrecision(6))}`;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

/** Render one or more series as a standalone SVG document. */
export function renderLinePlot(series: Series[], options: PlotOptions = {}): string {
  if (series.length === 0) throw new Error('nothing to plot');
  const width = options.width ?? 640;
  const height = options.height ?? 420;
  const xScale = options.xScale ?? 'linear';
  const yScale = options.yScale ?? 'linear';
  const plotLeft = MARGIN.left;
  const plotRight = width - MARGIN.right;
  const plotTop = MARGIN.top;
  const plotBottom = height - MARGIN.bottom;

  const allX = series.flatMap((s) => s.x);
  const allY = series.flatMap((s) => s.y);
  for (const s of series) {
    if (s.x.length !== s.y.length) throw new Error(`series ${s.label}: x/y length mismatch`);
    if (s.x.length === 0) throw new Error(`series ${s.label}: empty`);
  }
  const xAxis = makeAxis(allX, xScale, plotLeft, plotRight);
  const yAxis = makeAxis(allY, yScale, plotBottom, plotTop);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  for (const t of xAxis.ticks) {
    const px = xAxis.toPixel(t).toFixed(1);
    parts.push(`<line x1="${px}" y1="${plotTop}" x2="${px}" y2="${plotBottom}" stroke="#e0e0e0"/>`);
    parts.push(
      `<text x="${px}" y="${plotBottom + 18}" text-anchor="middle">` +
        `${escapeXml(formatTick(t, xScale))}</text>`,
    );
  }
  for (const t of yAxis.ticks) {
    const py = yAxis.toPixel(t).toFixed(1);
    parts.push(`<line x1="${plotLeft}" y1="${py}" x2="${plotRight}" y2="${py}" stroke="#e0e0e0"/>`);
    parts.push(
      `<text x="${plotLeft - 6}" y="${py}" text-anchor="end" dominant-baseline="middle">` +
        `${escapeXml(formatTick(t, yScale))}</text>`,
    );
  }
  parts.push(
    `<rect x="${plotLeft}" y="${plotTop}" width="${plotRight - plotLeft}" ` +
      `height="${plotBottom - plotTop}" fill="none" stroke="#404040"/>`,
  );

  series.forEach((s, i) => {
    const color = s.color ?? PALETTE[i % PALETTE.length]!;
    const points = s.x
      .map((x, j) => `${xAxis.toPixel(x).toFixed(1)},${yAxis.toPixel(s.y[j]!).toFixed(1)}`)
      .join(' ');
    parts.push(`<polyline points="${points}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    parts.push(
      `<text x="${plotRight - 8}" y="${plotTop + 16 + 16 * i}" text-anchor="end" ` +
        `fill="${color}">${escapeXml(s.label)}</text>`,
    );
  });

  if (options.title) {
    parts.push(
      `<text x="${(plotLeft + plotRight) / 2}" y="${plotTop - 12}" text-anchor="middle" ` +
        `font-size="14">${escapeXml(options.title)}</text>`,
    );
  }
  if (options.xLabel) {
    parts.push(
      `<text x="${(plotLeft + plotRight) / 2}" y="${height - 8}" text-anchor="middle">` +
        `${escapeXml(options.xLabel)}</text>`,
    );
  }
  if (options.yLabel) {
    const cx = 16;
    const cy = (plotTop + plotBottom) / 2;
    parts.push(
      `<text x="${cx}" y="${cy}" text-anchor="middle" transform="rotate(-90 ${cx} ${cy})">` +
        `${escapeXml(options.yLabel)}</text>`,
    );
  }
  parts.push('</svg>');
  return `${parts.join('\n')}\n`;
}

/** Resistance trajectory of a progressive-reset run: linear pulse axis, log resistance. */
export function plotProgressiveReset(table: Table, options: PlotOptions = {}): string {
  const x = numericColumn(table, 'pulse_index');
  const y = numericColumn(table, 'resistance_ohm');
  return renderLinePlot([{ label: 'resistance', x, y }], {
    title: 'Progressive reset',
    xLabel: 'pulse index',
    yLabel: 'resistance (ohm)',
    xScale: 'linear',
    yScale: 'log',
    ...options,
  });
}

/** Resistance window over cycling: log cycle axis, log resistance. */
export function plotEndurance(table: Table, options: PlotOptions = {}): string {
  const cycles = numericColumn(table, 'cycle');
  const lrs = numericColumn(table, 'r_lrs_ohm');
  const hrs = numericColumn(table, 'r_hrs_ohm');
  return renderLinePlot(
    [
      { label: 'LRS', x: cycles, y: lrs },
      { label: 'HRS', x: cycles, y: hrs },
    ],
    {
      title: 'Endurance window',
      xLabel: 'cycle',
      yLabel: 'resistance (ohm)',
      xScale: 'log',
      yScale: 'log',
      ...options,
    },
  );
}

/** Write an SVG document to disk. */
export async function savePlot(path: string, svg: string): Promise<void> {
  await writeFile(path, svg, 'utf8');
}
