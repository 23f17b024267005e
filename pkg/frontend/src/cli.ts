#!/usr/bin/env node
/**
 * Batch figure generation from emitted run artifacts.
 *
 * Commands:
 *   profiles   <profiles.csv> <out.svg|out.png>
 *   sweep      <sweep.csv> <out.svg|out.png> [--checks checks.json]
 *   refinement <summary.json> <summary.json> [...] <out.svg|out.png>
 *
 * Exit codes: 0 success, 1 invalid input data, 2 usage error.
 */

import { existsSync, realpathSync, writeFileSync } from "fs";
import path from "path";
import { parseArgs } from "util";
import { pathToFileURL } from "url";
import { loadProfilesCsv, loadSweepCsv } from "./csv.js";
import { FigureInputError } from "./errors.js";
import { buildProfilesFigure } from "./profiles.js";
import { buildRefinementFigure } from "./refinement.js";
import { loadChecks, loadRefinementPoint } from "./schemas.js";
import { buildSweepFigure } from "./sweep.js";

const USAGE = `usage: esbgk-slab-figures <command> [args]

commands:
  profiles   <profiles.csv> <out.svg|out.png>
  sweep      <sweep.csv> <out.svg|out.png> [--checks checks.json]
  refinement <summary.json> <summary.json> [...] <out.svg|out.png>
`;

class UsageError extends Error {}

type Sink = (line: string) => void;

async function writeFigure(outPath: string, svg: string): Promise<void> {
  const ext = path.extname(outPath).toLowerCase();
  if (ext === ".svg") {
    try {
      writeFileSync(outPath, svg);
    } catch (err) {
      const detail = err instanceof Error ? err.message : String(err);
      throw new FigureInputError(`cannot write ${outPath}: ${detail}`);
    }
    return;
  }
  if (ext === ".png") {
    const { default: sharp } = await import("sharp");
    try {
      await sharp(Buffer.from(svg), { density: 144 }).png().toFile(outPath);
    } catch (err) {
      const detail = err instanceof Error ? err.message : String(err);
      throw new FigureInputError(`cannot write ${outPath}: ${detail}`);
    }
    return;
  }
  throw new UsageError(`output must end in .svg or .png, got "${outPath}"`);
}

async function cmdProfiles(args: string[]): Promise<void> {
  if (args.length !== 2) {
    throw new UsageError("profiles takes exactly <profiles.csv> <out.svg|png>");
  }
  const rows = loadProfilesCsv(args[0]!);
  await writeFigure(args[1]!, buildProfilesFigure(rows));
}

async function cmdSweep(args: string[]): Promise<void> {
  let parsed;
  try {
    parsed = parseArgs({
      args,
      options: { checks: { type: "string" } },
      allowPositionals: true,
    });
  } catch (err) {
    const detail = err instanceof Error ? err.message : String(err);
    throw new UsageError(detail);
  }
  if (parsed.positionals.length !== 2) {
    throw new UsageError("sweep takes exactly <sweep.csv> <out.svg|png>");
  }
  const [sweepPath, outPath] = parsed.positionals;
  const rows = loadSweepCsv(sweepPath!);
  // the trend coefficient lives in the sibling checks file; without one
  // the markers are still plotted, just with no fitted curve
  let checksPath = parsed.values.checks ?? null;
  if (checksPath === null) {
    const sibling = path.join(path.dirname(sweepPath!), "checks.json");
    if (existsSync(sibling)) checksPath = sibling;
  }
  const checks = checksPath === null ? null : loadChecks(checksPath);
  await writeFigure(outPath!, buildSweepFigure(rows, checks));
}

async function cmdRefinement(args: string[]): Promise<void> {
  if (args.length < 3) {
    throw new UsageError(
      "refinement takes <summary.json> <summary.json> [...] <out.svg|png>"
    );
  }
  const outPath = args[args.length - 1]!;
  const points = args.slice(0, -1).map(loadRefinementPoint);
  await writeFigure(outPath, buildRefinementFigure(points));
}

export async function main(
  argv: string[],
  stderr: Sink = (line) => console.error(line)
): Promise<number> {
  const [command, ...rest] = argv;
  try {
    switch (command) {
      case "profiles":
        await cmdProfiles(rest);
        return 0;
      case "sweep":
        await cmdSweep(rest);
        return 0;
      case "refinement":
        await cmdRefinement(rest);
        return 0;
      default:
        stderr(USAGE.trimEnd());
        return 2;
    }
  } catch (err) {
    if (err instanceof UsageError) {
      stderr(`usage error: ${err.message}`);
      return 2;
    }
    if (err instanceof FigureInputError) {
      stderr(`input error: ${err.message}`);
      return 1;
    }
    const detail = err instanceof Error ? err.message : String(err);
    stderr(`error: ${detail}`);
    return 1;
  }
}

function isDirectRun(): boolean {
  const entry = process.argv[1];
  if (entry === undefined) return false;
  try {
    return import.meta.url === pathToFileURL(realpathSync(entry)).href;
  } catch {
    return false;
  }
}

if (isDirectRun()) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
