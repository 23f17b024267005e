/**
 * Hand-rolled SVG chart primitives shared by the figure builders.
 *
 * Coordinates are emitted through toFixed so a fixed input always yields
 * byte-identical markup.
 */

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface Scale {
  map: (v: number) => number;
  ticks: number[];
  fmt: (v: number) => string;
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmtPlain(v: number): string {
  const a = Math.abs(v);
  if (v === 0) return "0";
  if (a >= 0.01 && a < 10000) {
    const s = v.toPrecision(4);
    return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
  }
  const exp = Math.floor(Math.log10(a));
  const mant = v / Math.pow(10, exp);
  const m = Math.abs(mant - 1) < 1e-9 ? "1" : mant.toFixed(1);
  return `${m}e${exp}`;
}

export function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || Math.abs(max) || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((n) => n >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 0.01; v += step) {
    // snap to the step grid so floating accumulation never shifts a label
    ticks.push(Math.round(v / step) * step);
  }
  return ticks;
}

export function linearScale(
  lo: number,
  hi: number,
  rLo: number,
  rHi: number
): Scale {
  if (hi === lo) {
    const pad = Math.abs(lo) || 1;
    lo -= 0.5 * pad;
    hi += 0.5 * pad;
  }
  const span = hi - lo;
  return {
    map: (v) => rLo + ((v - lo) / span) * (rHi - rLo),
    ticks: niceTicks(lo, hi, 5).filter((t) => t >= lo - 1e-12 && t <= hi + 1e-12),
    fmt: fmtPlain,
  };
}

function decadeTicks(lo: number, hi: number): number[] {
  const kLo = Math.ceil(Math.log10(lo) - 1e-9);
  const kHi = Math.floor(Math.log10(hi) + 1e-9);
  const ticks: number[] = [];
  for (let k = kLo; k <= kHi; k++) ticks.push(Math.pow(10, k));
  if (ticks.length >= 2) return ticks;
  // fewer than two decades in range: fall back to 1-2-5 subdivision
  const out: number[] = [];
  for (let k = Math.floor(Math.log10(lo)); k <= Math.ceil(Math.log10(hi)); k++) {
    for (const m of [1, 2, 5]) {
      const v = m * Math.pow(10, k);
      if (v >= lo * 0.999 && v <= hi * 1.001) out.push(v);
    }
  }
  return out.length >= 2 ? out : [lo, hi];
}

export function logScale(
  lo: number,
  hi: number,
  rLo: number,
  rHi: number,
  ticks?: number[]
): Scale {
  if (!(lo > 0) || !(hi > 0)) {
    throw new Error(`log scale needs positive bounds, got [${lo}, ${hi}]`);
  }
  if (hi === lo) {
    lo /= 2;
    hi *= 2;
  }
  const lLo = Math.log10(lo);
  const span = Math.log10(hi) - lLo;
  return {
    map: (v) => rLo + ((Math.log10(v) - lLo) / span) * (rHi - rLo),
    ticks: ticks ?? decadeTicks(lo, hi),
    fmt: fmtPlain,
  };
}

export interface PanelLabels {
  title?: string;
  xLabel?: string;
  yLabel?: string;
}

/** Grid lines, frame, tick marks, and axis labels for one plot panel. */
export function panelFrame(
  p: Rect,
  xs: Scale,
  ys: Scale,
  labels: PanelLabels
): string {
  let s = "";
  for (const t of ys.ticks) {
    const y = ys.map(t).toFixed(1);
    s += `<line x1="${p.x}" y1="${y}" x2="${p.x + p.w}" y2="${y}" stroke="#eee" stroke-width="0.5"/>\n`;
  }
  for (const t of xs.ticks) {
    const x = xs.map(t).toFixed(1);
    s += `<line x1="${x}" y1="${p.y}" x2="${x}" y2="${p.y + p.h}" stroke="#f4f4f4" stroke-width="0.5"/>\n`;
  }
  s += `<line x1="${p.x}" y1="${p.y}" x2="${p.x}" y2="${p.y + p.h}" stroke="#333" stroke-width="0.7"/>\n`;
  s += `<line x1="${p.x}" y1="${p.y + p.h}" x2="${p.x + p.w}" y2="${p.y + p.h}" stroke="#333" stroke-width="0.7"/>\n`;
  for (const t of xs.ticks) {
    const x = xs.map(t).toFixed(1);
    s += `<line x1="${x}" y1="${p.y + p.h}" x2="${x}" y2="${p.y + p.h + 3}" stroke="#333" stroke-width="0.5"/>\n`;
    s += `<text x="${x}" y="${p.y + p.h + 12}" text-anchor="middle" font-size="7" fill="#666">${esc(xs.fmt(t))}</text>\n`;
  }
  for (const t of ys.ticks) {
    const y = ys.map(t);
    s += `<line x1="${p.x - 3}" y1="${y.toFixed(1)}" x2="${p.x}" y2="${y.toFixed(1)}" stroke="#333" stroke-width="0.5"/>\n`;
    s += `<text x="${p.x - 5}" y="${(y + 2.5).toFixed(1)}" text-anchor="end" font-size="7" fill="#666">${esc(ys.fmt(t))}</text>\n`;
  }
  if (labels.title) {
    s += `<text x="${p.x + p.w / 2}" y="${p.y - 6}" text-anchor="middle" font-size="9" font-weight="600" fill="#222">${esc(labels.title)}</text>\n`;
  }
  if (labels.xLabel) {
    s += `<text x="${p.x + p.w / 2}" y="${p.y + p.h + 26}" text-anchor="middle" font-size="8" fill="#444">${esc(labels.xLabel)}</text>\n`;
  }
  if (labels.yLabel) {
    const ly = p.y + p.h / 2;
    s += `<text x="${p.x - 38}" y="${ly}" text-anchor="middle" font-size="8" fill="#444" transform="rotate(-90,${p.x - 38},${ly})">${esc(labels.yLabel)}</text>\n`;
  }
  return s;
}

export interface LineStyle {
  color: string;
  width?: number;
  dash?: string;
  opacity?: number;
}

export function polyline(pts: [number, number][], st: LineStyle): string {
  const points = pts
    .map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`)
    .join(" ");
  const dash = st.dash ? ` stroke-dasharray="${st.dash}"` : "";
  const op = st.opacity !== undefined ? ` opacity="${st.opacity}"` : "";
  return `<polyline fill="none" stroke="${st.color}" stroke-width="${st.width ?? 1.2}"${dash}${op} points="${points}"/>\n`;
}

export function markers(pts: [number, number][], color: string, r = 3): string {
  return pts
    .map(
      ([x, y]) =>
        `<circle cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="${r}" fill="${color}" stroke="#fff" stroke-width="0.8"/>\n`
    )
    .join("");
}

export interface LegendEntry {
  label: string;
  color: string;
  dash?: string;
  marker?: boolean;
}

export function legendBox(x: number, y: number, entries: LegendEntry[]): string {
  const w = Math.max(...entries.map((e) => e.label.length)) * 4.6 + 30;
  const h = entries.length * 11 + 6;
  let s = `<rect x="${x}" y="${y}" width="${w.toFixed(1)}" height="${h}" rx="2" fill="white" fill-opacity="0.85" stroke="#ddd" stroke-width="0.5"/>\n`;
  entries.forEach((e, i) => {
    const ly = y + 9 + i * 11;
    if (e.marker) {
      s += `<circle cx="${x + 12}" cy="${ly - 2.5}" r="3" fill="${e.color}" stroke="#fff" stroke-width="0.8"/>\n`;
    } else {
      const dash = e.dash ? ` stroke-dasharray="${e.dash}"` : "";
      s += `<line x1="${x + 5}" y1="${ly - 2.5}" x2="${x + 19}" y2="${ly - 2.5}" stroke="${e.color}" stroke-width="1.2"${dash}/>\n`;
    }
    s += `<text x="${x + 23}" y="${ly}" font-size="7" fill="#444">${esc(e.label)}</text>\n`;
  });
  return s;
}

export function svgDocument(w: number, h: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${w} ${h}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${w}" height="${h}" fill="#fff"/>\n` +
    body +
    `</svg>\n`
  );
}
