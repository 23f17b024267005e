/**
 * Validators for the artifact files consumed by the figure commands.
 *
 * Only the documented emitted schemas are read here; nothing in this
 * package imports from or inspects the solver.
 */

import { readFileSync } from "fs";
import { z } from "zod";
import { FigureInputError } from "./errors.js";

export const PROFILE_COLUMNS = [
  "x", "rho", "U1", "U2", "U3", "T",
  "Theta11", "Theta12", "Theta13", "Theta22", "Theta23", "Theta33",
  "flux_mass", "flux_mom1", "flux_mom2", "flux_mom3", "flux_energy",
] as const;

export const SWEEP_COLUMNS = [
  "tau", "converged", "iterations", "max_alpha", "terminal_alpha",
  "transverse_momentum_max", "flux_drift",
] as const;

export const FLUX_COLUMNS = ["mass", "mom1", "mom2", "mom3", "energy"] as const;

export type ProfileColumn = (typeof PROFILE_COLUMNS)[number];
export type SweepColumn = (typeof SWEEP_COLUMNS)[number];
export type FluxColumn = (typeof FLUX_COLUMNS)[number];

export type ProfileRow = Record<ProfileColumn, number>;
export type SweepRow = Record<SweepColumn, number>;

const numberOrNull = z.union([z.number(), z.null()]);

const checksRowSchema = z.object({
  tau: z.number(),
  converged: z.boolean(),
  iterations: z.number().int(),
  max_alpha: numberOrNull,
  terminal_alpha: numberOrNull,
  transverse_momentum_max: numberOrNull,
  flux_drift: numberOrNull,
  reason: z.string(),
});

export const checksSchema = z.object({
  nu: z.number(),
  rows: z.array(checksRowSchema),
  fit_c: numberOrNull,
  fit_residual: numberOrNull,
  alpha_decreasing: z.boolean(),
});

export type ChecksFile = z.infer<typeof checksSchema>;

const fluxDriftsSchema = z.object({
  mass: z.number(),
  mom1: z.number(),
  mom2: z.number(),
  mom3: z.number(),
  energy: z.number(),
});

const convergedSummarySchema = z
  .object({
    converged: z.literal(true),
    iterations: z.number().int(),
    flux_drifts: fluxDriftsSchema,
    config: z.object({ n_x: z.number().int().min(2) }).passthrough(),
  })
  .passthrough();

export interface RefinementPoint {
  source: string;
  n_x: number;
  drifts: Record<FluxColumn, number>;
}

function readText(path: string): string {
  try {
    return readFileSync(path, "utf-8");
  } catch (err) {
    const detail = err instanceof Error ? err.message : String(err);
    throw new FigureInputError(`cannot read ${path}: ${detail}`);
  }
}

function parseJson(path: string): unknown {
  const text = readText(path);
  try {
    return JSON.parse(text);
  } catch (err) {
    const detail = err instanceof Error ? err.message : String(err);
    throw new FigureInputError(`${path}: not valid JSON: ${detail}`);
  }
}

function describeIssues(path: string, issues: z.ZodIssue[]): string {
  const parts = issues
    .slice(0, 3)
    .map((i) => `${i.path.join(".") || "(root)"}: ${i.message}`);
  return `${path}: schema mismatch: ${parts.join("; ")}`;
}

export function loadChecks(path: string): ChecksFile {
  const parsed = checksSchema.safeParse(parseJson(path));
  if (!parsed.success) {
    throw new FigureInputError(describeIssues(path, parsed.error.issues));
  }
  return parsed.data;
}

export function loadRefinementPoint(path: string): RefinementPoint {
  const raw = parseJson(path);
  const head = z.object({ converged: z.boolean() }).passthrough().safeParse(raw);
  if (!head.success) {
    throw new FigureInputError(describeIssues(path, head.error.issues));
  }
  if (!head.data.converged) {
    throw new FigureInputError(
      `${path}: run did not converge, no flux drifts to plot`
    );
  }
  const parsed = convergedSummarySchema.safeParse(raw);
  if (!parsed.success) {
    throw new FigureInputError(describeIssues(path, parsed.error.issues));
  }
  return {
    source: path,
    n_x: parsed.data.config.n_x,
    drifts: parsed.data.flux_drifts,
  };
}
