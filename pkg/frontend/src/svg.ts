/** Minimal SVG chart scaffolding shared by the three figure kinds. */

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export const DEFAULT_FRAME: Frame = {
  width: 680,
  height: 500,
  left: 70,
  right: 20,
  top: 40,
  bottom: 55,
};

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface Scale {
  (v: number): number;
  min: number;
  max: number;
}

export function linearScale(min: number, max: number, outA: number, outB: number): Scale {
  const span = max - min || 1;
  const f = ((v: number) => outA + ((v - min) / span) * (outB - outA)) as Scale;
  f.min = min;
  f.max = max;
  return f;
}

/** Round tick positions covering [min, max] at a 1/2/5 step. */
export function niceTicks(min: number, max: number, count = 6): number[] {
  const span = max - min || 1;
  const step0 = span / Math.max(1, count - 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (step0 <= m * mag) {
      step = m * mag;
      break;
    }
  }
  const ticks: number[] = [];
  for (let t = Math.ceil(min / step) * step; t <= max + 1e-12 * span; t += step) {
    ticks.push(Math.abs(t) < 1e-12 * span ? 0 : t);
  }
  return ticks;
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("+", "");
  return String(Math.round(v * 1e6) / 1e6);
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export interface SvgDoc {
  parts: string[];
  frame: Frame;
}

export function openSvg(frame: Frame, title: string): SvgDoc {
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" height="${frame.height}" ` +
      `viewBox="0 0 ${frame.width} ${frame.height}" font-family="sans-serif" font-size="12">`,
    `<rect width="${frame.width}" height="${frame.height}" fill="white"/>`,
    `<text x="${frame.width / 2}" y="22" text-anchor="middle" font-size="15">${esc(title)}</text>`,
  ];
  return { parts, frame };
}

export function closeSvg(doc: SvgDoc): string {
  doc.parts.push("</svg>");
  return doc.parts.join("\n");
}

export function drawAxes(
  doc: SvgDoc,
  x: (v: number) => number,
  y: (v: number) => number,
  xLabel: string,
  yLabel: string,
  xTicks: number[],
  yTicks: { value: number; label: string }[]
): void {
  const f = doc.frame;
  const x0 = f.left;
  const x1 = f.width - f.right;
  const y0 = f.height - f.bottom;
  const y1 = f.top;
  doc.parts.push(
    `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#333"/>`
  );
  for (const t of xTicks) {
    const px = x(t);
    doc.parts.push(
      `<line x1="${px.toFixed(2)}" y1="${y0}" x2="${px.toFixed(2)}" y2="${y1}" stroke="#ddd"/>`,
      `<text x="${px.toFixed(2)}" y="${y0 + 18}" text-anchor="middle">${esc(fmtTick(t))}</text>`
    );
  }
  for (const { value, label } of yTicks) {
    const py = y(value);
    doc.parts.push(
      `<line x1="${x0}" y1="${py.toFixed(2)}" x2="${x1}" y2="${py.toFixed(2)}" stroke="#ddd"/>`,
      `<text x="${x0 - 6}" y="${(py + 4).toFixed(2)}" text-anchor="end">${esc(label)}</text>`
    );
  }
  doc.parts.push(
    `<text x="${(x0 + x1) / 2}" y="${f.height - 12}" text-anchor="middle">${esc(xLabel)}</text>`,
    `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${(y0 + y1) / 2})">${esc(yLabel)}</text>`
  );
}

export function drawLegend(doc: SvgDoc, entries: { label: string; color: string; dash?: string; marker?: boolean }[]): void {
  const f = doc.frame;
  const x = f.left + 12;
  let y = f.top + 14;
  for (const e of entries) {
    doc.parts.push(
      `<line x1="${x}" y1="${y - 4}" x2="${x + 26}" y2="${y - 4}" stroke="${e.color}" ` +
        `stroke-width="1.6"${e.dash ? ` stroke-dasharray="${e.dash}"` : ""}/>`
    );
    if (e.marker) {
      doc.parts.push(`<circle cx="${x + 13}" cy="${y - 4}" r="3" fill="${e.color}"/>`);
    }
    doc.parts.push(`<text x="${x + 32}" y="${y}">${esc(e.label)}</text>`);
    y += 16;
  }
}
