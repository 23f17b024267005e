/**
 * Four-panel figure of the macroscopic fields along the slab: density,
 * streamwise bulk velocity, temperature, and the diagonal of the
 * anisotropic temperature tensor.
 */

import type { ProfileRow } from "./schemas.js";
import {
  legendBox,
  linearScale,
  panelFrame,
  polyline,
  svgDocument,
  type Rect,
  type Scale,
} from "./svg.js";

const W = 780;
const H = 580;
const PANEL_W = 300;
const PANEL_H = 210;
const COL_X = [62, 442];
const ROW_Y = [48, 330];

const SERIES_COLORS = ["#4361ee", "#e63946", "#2d6a4f"];

function padded(values: number[]): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  const pad = (hi - lo || Math.abs(hi) || 1) * 0.06;
  return [lo - pad, hi + pad];
}

function panel(
  p: Rect,
  x: number[],
  series: { values: number[]; color: string; label?: string }[],
  title: string,
  yLabel: string
): string {
  const xs = linearScale(0, 1, p.x, p.x + p.w);
  const [lo, hi] = padded(series.flatMap((s) => s.values));
  const ys: Scale = linearScale(lo, hi, p.y + p.h, p.y);
  let s = panelFrame(p, xs, ys, { title, xLabel: "x", yLabel });
  for (const sr of series) {
    const pts = x.map(
      (xv, i) => [xs.map(xv), ys.map(sr.values[i]!)] as [number, number]
    );
    s += polyline(pts, { color: sr.color });
  }
  const labeled = series.filter((sr) => sr.label);
  if (labeled.length > 0) {
    s += legendBox(
      p.x + p.w - 66,
      p.y + 4,
      labeled.map((sr) => ({ label: sr.label!, color: sr.color }))
    );
  }
  return s;
}

export function buildProfilesFigure(rows: ProfileRow[]): string {
  const x = rows.map((r) => r.x);
  const body =
    `<text x="${COL_X[0]}" y="22" font-size="11" font-weight="600" fill="#222">Macroscopic profiles</text>\n` +
    `<text x="${COL_X[0]}" y="34" font-size="8" fill="#888">${rows.length} spatial nodes</text>\n` +
    panel(
      { x: COL_X[0]!, y: ROW_Y[0]!, w: PANEL_W, h: PANEL_H },
      x,
      [{ values: rows.map((r) => r.rho), color: SERIES_COLORS[0]! }],
      "Density",
      "ρ"
    ) +
    panel(
      { x: COL_X[1]!, y: ROW_Y[0]!, w: PANEL_W, h: PANEL_H },
      x,
      [{ values: rows.map((r) => r.U1), color: SERIES_COLORS[1]! }],
      "Bulk velocity",
      "U₁"
    ) +
    panel(
      { x: COL_X[0]!, y: ROW_Y[1]!, w: PANEL_W, h: PANEL_H },
      x,
      [{ values: rows.map((r) => r.T), color: SERIES_COLORS[2]! }],
      "Temperature",
      "T"
    ) +
    panel(
      { x: COL_X[1]!, y: ROW_Y[1]!, w: PANEL_W, h: PANEL_H },
      x,
      [
        {
          values: rows.map((r) => r.Theta11),
          color: SERIES_COLORS[0]!,
          label: "Θ₁₁",
        },
        {
          values: rows.map((r) => r.Theta22),
          color: SERIES_COLORS[1]!,
          label: "Θ₂₂",
        },
        {
          values: rows.map((r) => r.Theta33),
          color: SERIES_COLORS[2]!,
          label: "Θ₃₃",
        },
      ],
      "Temperature tensor diagonal",
      "Θ"
    );
  return svgDocument(W, H, body);
}
