/**
 * Log-log figure of conserved-flux drift against spatial resolution,
 * one series per transported moment, with an order-2 reference slope.
 */

import { FigureInputError } from "./errors.js";
import { FLUX_COLUMNS, type RefinementPoint } from "./schemas.js";
import {
  legendBox,
  logScale,
  markers,
  panelFrame,
  polyline,
  svgDocument,
  type LegendEntry,
} from "./svg.js";

const W = 560;
const H = 420;
const PANEL = { x: 70, y: 48, w: 440, h: 310 };

const SERIES_COLORS: Record<string, string> = {
  mass: "#4361ee",
  mom1: "#e63946",
  mom2: "#f4a261",
  mom3: "#9d4edd",
  energy: "#2d6a4f",
};

// below this level a drift is quadrature or parity roundoff with no
// refinement signal; plotting it would stretch the axis by ten decades
const DRIFT_FLOOR = 1e-15;

export function buildRefinementFigure(points: RefinementPoint[]): string {
  const sorted = [...points].sort((a, b) => a.n_x - b.n_x);
  const sizes = sorted.map((p) => p.n_x);
  if (new Set(sizes).size !== sizes.length) {
    const dup = sizes.find((n, i) => sizes.indexOf(n) !== i);
    throw new FigureInputError(
      `two runs share n_x = ${dup}; refinement needs distinct resolutions`
    );
  }
  if (sorted.length < 2) {
    throw new FigureInputError(
      `need at least two runs at different n_x, got ${sorted.length}`
    );
  }

  const active = FLUX_COLUMNS.filter((c) =>
    sorted.some((p) => p.drifts[c] >= DRIFT_FLOOR)
  );
  if (active.length === 0) {
    throw new FigureInputError(
      "all flux drifts sit at roundoff level; nothing to plot"
    );
  }

  const allDrifts = active.flatMap((c) => sorted.map((p) => p.drifts[c]));
  const d0 = Math.max(...sorted.map((p) => p.drifts[active[0]!]));
  const n0 = sizes[0]!;
  // cell width goes as 1/(n_x - 1), so order 2 means drift ~ (n0-1)^2/(n-1)^2
  const refAt = (n: number) => d0 * Math.pow((n0 - 1) / (n - 1), 2);
  const refValues = sizes.map(refAt);

  const xs = logScale(
    sizes[0]! / 1.2,
    sizes[sizes.length - 1]! * 1.2,
    PANEL.x,
    PANEL.x + PANEL.w,
    sizes
  );
  const yLo = Math.min(...allDrifts, ...refValues) / 2;
  const yHi = Math.max(...allDrifts, ...refValues) * 2;
  const ys = logScale(yLo, yHi, PANEL.y + PANEL.h, PANEL.y);

  let body = panelFrame(PANEL, xs, ys, {
    title: "Conserved-flux drift vs spatial resolution",
    xLabel: "n_x",
    yLabel: "relative drift",
  });

  body += polyline(
    sizes.map((n) => [xs.map(n), ys.map(refAt(n))]),
    { color: "#888", width: 1, dash: "6,3" }
  );

  const entries: LegendEntry[] = [];
  for (const col of active) {
    const color = SERIES_COLORS[col]!;
    const pts = sorted.map(
      (p) => [xs.map(p.n_x), ys.map(p.drifts[col])] as [number, number]
    );
    body += polyline(pts, { color, width: 1.2 });
    body += markers(pts, color, 3);
    entries.push({ label: col, color, marker: true });
  }
  entries.push({ label: "order 2", color: "#888", dash: "6,3" });
  body += legendBox(PANEL.x + PANEL.w - 96, PANEL.y + 6, entries);

  const dropped = FLUX_COLUMNS.filter((c) => !active.includes(c));
  if (dropped.length > 0) {
    body += `<text x="${PANEL.x}" y="${H - 10}" font-size="7" fill="#888">at roundoff level, omitted: ${dropped.join(", ")}</text>\n`;
  }
  return svgDocument(W, H, body);
}
