/**
 * Log-log figure of the measured contraction factor against the
 * relaxation time, with the fitted C (ln tau + 1) / tau trend overlaid
 * when a fit is available.
 */

import { FigureInputError } from "./errors.js";
import type { ChecksFile, SweepRow } from "./schemas.js";
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

const MARKER_COLOR = "#4361ee";
const FIT_COLOR = "#2d6a4f";

export function buildSweepFigure(
  rows: SweepRow[],
  checks: ChecksFile | null
): string {
  const converged = rows.filter((r) => r.converged === 1);
  if (converged.length === 0) {
    throw new FigureInputError("no converged sweep rows to plot");
  }
  const taus = converged.map((r) => r.tau);
  const alphas = converged.map((r) => r.terminal_alpha);
  if (alphas.some((a) => !(a > 0))) {
    throw new FigureInputError(
      "converged sweep rows must carry positive contraction factors"
    );
  }

  // a least-squares trend through a single point says nothing, so the
  // overlay needs at least two converged rows and a finite coefficient
  const fitC =
    checks !== null && converged.length >= 2 && typeof checks.fit_c === "number"
      ? checks.fit_c
      : null;

  const tLo = Math.min(...taus);
  const tHi = Math.max(...taus);
  const xs = logScale(tLo / 1.5, tHi * 1.5, PANEL.x, PANEL.x + PANEL.w);

  const fitAt = (t: number) => (fitC ?? 0) * (Math.log(t) + 1) / t;
  const yValues = [...alphas, 1.0];
  if (fitC !== null) {
    yValues.push(fitAt(tLo), fitAt(tHi));
  }
  const yLo = Math.min(...yValues) / 2;
  const yHi = Math.max(...yValues) * 1.5;
  const ys = logScale(yLo, yHi, PANEL.y + PANEL.h, PANEL.y);

  let body = panelFrame(PANEL, xs, ys, {
    title: "Contraction factor vs relaxation time",
    xLabel: "τ",
    yLabel: "terminal α",
  });

  const oneY = ys.map(1.0).toFixed(1);
  body += `<line x1="${PANEL.x}" y1="${oneY}" x2="${PANEL.x + PANEL.w}" y2="${oneY}" stroke="#888" stroke-width="0.8" stroke-dasharray="4,4"/>\n`;

  if (fitC !== null) {
    const n = 100;
    const lLo = Math.log10(tLo / 1.5);
    const lHi = Math.log10(tHi * 1.5);
    const pts: [number, number][] = [];
    for (let i = 0; i <= n; i++) {
      const t = Math.pow(10, lLo + ((lHi - lLo) * i) / n);
      pts.push([xs.map(t), ys.map(fitAt(t))]);
    }
    body += polyline(pts, { color: FIT_COLOR, width: 1.2, dash: "6,3" });
  }

  body += markers(
    converged.map((r) => [xs.map(r.tau), ys.map(r.terminal_alpha)]),
    MARKER_COLOR,
    3.5
  );

  const entries: LegendEntry[] = [
    { label: "measured terminal α", color: MARKER_COLOR, marker: true },
    { label: "α = 1", color: "#888", dash: "4,4" },
  ];
  if (fitC !== null) {
    entries.splice(1, 0, {
      label: `${fitC.toPrecision(3)}·(ln τ + 1)/τ`,
      color: FIT_COLOR,
      dash: "6,3",
    });
  }
  body += legendBox(PANEL.x + PANEL.w - 150, PANEL.y + 6, entries);

  const skipped = rows.length - converged.length;
  if (skipped > 0) {
    body += `<text x="${PANEL.x}" y="${H - 10}" font-size="7" fill="#888">${skipped} non-converged row(s) omitted</text>\n`;
  }
  return svgDocument(W, H, body);
}
