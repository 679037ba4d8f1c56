/**
 * The three figure families rendered from rislink CSV artifacts.
 *
 * Each builder returns the SVG text together with the exact data arrays it
 * plotted, so callers (and tests) can verify nothing was altered or
 * dropped. Visual convention: simulation series carry circle markers on a
 * solid line, theory series (sep_theory, capacity_ub) are dashed without
 * markers.
 */

import { Table, floatColumn, requireColumns } from "./csv.js";
import {
  DEFAULT_FRAME,
  PALETTE,
  SvgDoc,
  closeSvg,
  drawAxes,
  drawLegend,
  esc,
  fmtTick,
  linearScale,
  niceTicks,
  openSvg,
} from "./svg.js";

export interface NamedTable {
  name: string;
  table: Table;
}

export interface ConstellationSeries {
  name: string;
  labels: string[];
  re: number[];
  im: number[];
}

export interface SweepSeries {
  name: string;
  metric: string;
  snrDb: number[];
  values: number[];
  theory: boolean;
}

const THEORY_METRICS = new Set(["sep_theory", "capacity_ub"]);
const THEORY_DASH = "7,4";

export function constellationFigure(inputs: NamedTable[]): {
  svg: string;
  series: ConstellationSeries[];
} {
  if (inputs.length === 0) throw new Error("no input CSVs");
  const series: ConstellationSeries[] = inputs.map(({ name, table }) => {
    requireColumns(table, ["label", "re", "im"], `constellation CSV '${name}'`);
    if (table.rows.length === 0) throw new Error(`no data rows in '${name}'`);
    return {
      name,
      labels: table.rows.map((r) => r.label),
      re: floatColumn(table, "re"),
      im: floatColumn(table, "im"),
    };
  });

  const all = series.flatMap((s) => s.re.concat(s.im));
  const extent = Math.max(...all.map(Math.abs)) * 1.1 || 1;
  const f = { ...DEFAULT_FRAME, width: 560, height: 560, bottom: 60 };
  const x = linearScale(-extent, extent, f.left, f.width - f.right);
  const y = linearScale(-extent, extent, f.height - f.bottom, f.top);

  const doc = openSvg(f, "Received-signal constellation");
  const ticks = niceTicks(-extent, extent, 7);
  drawAxes(
    doc,
    x,
    y,
    "in-phase",
    "quadrature",
    ticks,
    ticks.map((t) => ({ value: t, label: fmtTick(t) }))
  );
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    s.re.forEach((re, k) => {
      doc.parts.push(
        `<circle cx="${x(re).toFixed(2)}" cy="${y(s.im[k]).toFixed(2)}" r="3.2" ` +
          `fill="${color}" fill-opacity="0.75"><title>${esc(s.labels[k])}</title></circle>`
      );
    });
  });
  drawLegend(
    doc,
    series.map((s, i) => ({ label: s.name, color: PALETTE[i % PALETTE.length], marker: true }))
  );
  return { svg: closeSvg(doc), series };
}

function sweepSeries(inputs: NamedTable[], kind: "capacity" | "sep"): SweepSeries[] {
  const wanted = kind === "capacity" ? ["capacity_sim", "capacity_ub"] : ["sep_sim", "sep_theory"];
  const out: SweepSeries[] = [];
  for (const { name, table } of inputs) {
    requireColumns(table, ["snr_db", "metric", "value"], `sweep CSV '${name}'`);
    if (table.rows.length === 0) throw new Error(`no data rows in '${name}'`);
    for (const metric of wanted) {
      const rows = table.rows.filter((r) => r.metric === metric);
      if (rows.length === 0) continue;
      out.push({
        name,
        metric,
        snrDb: rows.map((r) => Number(r.snr_db)),
        values: rows.map((r) => Number(r.value)),
        theory: THEORY_METRICS.has(metric),
      });
    }
  }
  if (out.length === 0) {
    throw new Error(`no rows with a ${kind} metric (${wanted.join(", ")}) found`);
  }
  return out;
}

function drawSweep(
  doc: SvgDoc,
  series: SweepSeries[],
  x: (v: number) => number,
  y: (v: number) => number
): void {
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.snrDb.map((v, k) => `${x(v).toFixed(2)},${y(s.values[k]).toFixed(2)}`);
    doc.parts.push(
      `<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="1.6"` +
        (s.theory ? ` stroke-dasharray="${THEORY_DASH}"` : "") +
        `/>`
    );
    if (!s.theory) {
      s.snrDb.forEach((v, k) => {
        doc.parts.push(
          `<circle cx="${x(v).toFixed(2)}" cy="${y(s.values[k]).toFixed(2)}" r="3.4" fill="${color}"/>`
        );
      });
    }
  });
  drawLegend(
    doc,
    series.map((s, i) => ({
      label: `${s.name}: ${s.metric}`,
      color: PALETTE[i % PALETTE.length],
      dash: s.theory ? THEORY_DASH : undefined,
      marker: !s.theory,
    }))
  );
}

export function capacityFigure(inputs: NamedTable[]): { svg: string; series: SweepSeries[] } {
  const series = sweepSeries(inputs, "capacity");
  const snrs = series.flatMap((s) => s.snrDb);
  const vals = series.flatMap((s) => s.values);
  const f = DEFAULT_FRAME;
  const x = linearScale(Math.min(...snrs), Math.max(...snrs), f.left, f.width - f.right);
  const yMax = Math.max(...vals) * 1.06 || 1;
  const y = linearScale(0, yMax, f.height - f.bottom, f.top);

  const doc = openSvg(f, "DCMC capacity vs receive SNR");
  drawAxes(
    doc,
    x,
    y,
    "receive SNR (dB)",
    "capacity (bit/s/Hz)",
    niceTicks(x.min, x.max, 8),
    niceTicks(0, yMax, 6).map((t) => ({ value: t, label: fmtTick(t) }))
  );
  drawSweep(doc, series, x, y);
  return { svg: closeSvg(doc), series };
}

export function sepFigure(inputs: NamedTable[]): { svg: string; series: SweepSeries[] } {
  const series = sweepSeries(inputs, "sep");
  const snrs = series.flatMap((s) => s.snrDb);
  const positive = series.flatMap((s) => s.values).filter((v) => v > 0);
  if (positive.length === 0) throw new Error("all SEP values are zero; nothing to plot on a log axis");
  // Zero counts sit on the floor decade so that no point is dropped.
  const floor = Math.pow(10, Math.floor(Math.log10(Math.min(...positive))) - 1);
  const top = Math.pow(10, Math.ceil(Math.log10(Math.max(...positive))));

  const f = DEFAULT_FRAME;
  const x = linearScale(Math.min(...snrs), Math.max(...snrs), f.left, f.width - f.right);
  const ylog = linearScale(Math.log10(floor), Math.log10(top), f.height - f.bottom, f.top);
  const y = (v: number) => ylog(Math.log10(Math.max(v, floor)));

  const doc = openSvg(f, "Symbol error probability vs receive SNR");
  const decades: { value: number; label: string }[] = [];
  for (let e = Math.log10(floor); e <= Math.log10(top) + 1e-9; e += 1) {
    decades.push({ value: Math.pow(10, e), label: `1e${Math.round(e)}` });
  }
  drawAxes(
    doc,
    x,
    y,
    "receive SNR (dB)",
    "symbol error probability",
    niceTicks(x.min, x.max, 8),
    decades
  );
  drawSweep(doc, series, x, y);
  return { svg: closeSvg(doc), series };
}
