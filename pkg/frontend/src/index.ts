export { FigureInputError } from "./errors.js";
export {
  loadProfilesCsv,
  loadSweepCsv,
  parseNumericTable,
  parseProfilesCsv,
  parseSweepCsv,
} from "./csv.js";
export {
  FLUX_COLUMNS,
  PROFILE_COLUMNS,
  SWEEP_COLUMNS,
  checksSchema,
  loadChecks,
  loadRefinementPoint,
  type ChecksFile,
  type FluxColumn,
  type ProfileRow,
  type RefinementPoint,
  type SweepRow,
} from "./schemas.js";
export { buildProfilesFigure } from "./profiles.js";
export { buildSweepFigure } from "./sweep.js";
export { buildRefinementFigure } from "./refinement.js";
export { main } from "./cli.js";
