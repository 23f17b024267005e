"""Post-hoc verification of converged runs.

Nothing here feeds back into the iteration: these are audits of conserved
fluxes, the fixed-point residual, the existence-theorem bounds, the entropy
sign, and the contraction trend across relaxation scales, plus the helpers
that serialize those audits to files.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryData, TheoremQuantities, theorem_quantities
from .errors import ConfigurationError, SlabModelError
from .gaussian import entropy_production, evaluate
from .moments import c2_nu, compute_moments_batch
from .solver import (
    DistributionField,
    SolverConfig,
    SpatialGrid,
    apply_phi,
    distance,
    solve,
)
from .vgrid import VelocityGrid, integrate_rows

__all__ = [
    "FluxTable",
    "BoundsReport",
    "SweepRow",
    "SweepStudy",
    "flux_invariants",
    "mild_residual",
    "theorem_bounds_check",
    "entropy_profile",
    "contraction_study",
    "lipschitz_probe",
    "write_sweep_csv",
    "study_payload",
]

FLUX_COLUMNS = ("mass", "mom1", "mom2", "mom3", "energy")


@dataclass(frozen=True)
class FluxTable:
    """Per-x transported moments; each column is constant for an exact solution."""

    x: np.ndarray
    columns: dict[str, np.ndarray]
    drifts: dict[str, float]
    scale: float

    @property
    def max_drift(self) -> float:
        return max(self.drifts.values())


def flux_invariants(f: DistributionField, q: TheoremQuantities) -> FluxTable:
    """Transported mass, momentum, and energy per x node with relative drifts.

    Drift is (max - min) / max(|mean|, a_u + c_u) per column, so columns whose
    exact value is zero are measured against the inflow scale instead of
    blowing up.
    """
    vg = f.vgrid
    v1 = vg.v1f
    weights = {
        "mass": v1,
        "mom1": v1 * v1,
        "mom2": v1 * vg.v2f,
        "mom3": v1 * vg.v3f,
        "energy": v1 * vg.vsqf,
    }
    scale = q.a_u + q.c_u
    columns = {}
    drifts = {}
    for name, w in weights.items():
        col = integrate_rows(vg, f.values, np.ascontiguousarray(w))
        columns[name] = col
        denom = max(abs(float(np.mean(col))), scale)
        drifts[name] = float((np.max(col) - np.min(col)) / denom)
    return FluxTable(x=f.sgrid.x, columns=columns, drifts=drifts, scale=scale)


def mild_residual(f: DistributionField, b: BoundaryData, cfg: SolverConfig) -> float:
    """Distance between one more application of the solution map and f itself."""
    return distance(apply_phi(f, b, cfg), f)


@dataclass(frozen=True)
class BoundsReport:
    """Worst-over-x margins of the existence-theorem display.

    The flux-gap line uses the v1 moment squared, which is the form the
    theorem states (the solution-space condition uses the full momentum
    vector and is checked separately by omega_membership).
    """

    margins: dict[str, float]
    slacks: dict[str, float]

    @property
    def failing(self) -> list[str]:
        return [k for k, v in self.margins.items() if v < -self.slacks[k]]

    @property
    def passed(self) -> bool:
        return not self.failing


def theorem_bounds_check(
    f: DistributionField, q: TheoremQuantities, rel_slack: float = 1e-8
) -> BoundsReport:
    vg = f.vgrid
    rho = integrate_rows(vg, f.values, "1")
    energy = integrate_rows(vg, f.values, "vsq")
    flux = integrate_rows(vg, f.values, "v1")
    gap = rho * energy - flux * flux
    margins = {
        "rho_low": float(np.min(rho) - q.a_l),
        "rho_high": float(q.a_u - np.max(rho)),
        "energy_low": float(np.min(energy) - q.c_l),
        "energy_high": float(q.c_u - np.max(energy)),
        "flux_gap": float(np.min(gap) - q.gamma_l),
    }
    slacks = {
        "rho_low": rel_slack * q.a_u,
        "rho_high": rel_slack * q.a_u,
        "energy_low": rel_slack * q.c_u,
        "energy_high": rel_slack * q.c_u,
        "flux_gap": rel_slack * q.a_u * q.c_u,
    }
    return BoundsReport(margins=margins, slacks=slacks)


def entropy_profile(f: DistributionField, nu: float) -> np.ndarray:
    """Relaxation entropy production at each x node (nonpositive in theory)."""
    moments = compute_moments_batch(f.values, f.vgrid, nu)
    return np.array([
        entropy_production(f.values[k], m, f.vgrid) for k, m in enumerate(moments)
    ])


@dataclass(frozen=True)
class SweepRow:
    tau: float
    converged: bool
    iterations: int
    max_alpha: float
    terminal_alpha: float
    transverse_momentum_max: float
    flux_drift: float
    reason: str = ""


@dataclass(frozen=True)
class SweepStudy:
    rows: list[SweepRow]
    fit_c: float
    fit_residual: float
    alpha_decreasing: bool


def _sweep_one(
    b: BoundaryData,
    tau: float,
    nu: float,
    sg: SpatialGrid,
    vg: VelocityGrid,
    tol: float,
    max_iter: int,
) -> SweepRow:
    cfg = SolverConfig.from_tau(tau, nu, tol=tol, max_iter=max_iter)
    q = theorem_quantities(b, tau, vg)
    try:
        f, rep = solve(cfg, b, sg, vg, quantities=q)
    except SlabModelError as exc:
        alphas = getattr(exc, "alphas", [])
        return SweepRow(
            tau=tau,
            converged=False,
            iterations=len(getattr(exc, "distances", [])) or max_iter,
            max_alpha=max(alphas) if alphas else math.nan,
            terminal_alpha=alphas[-1] if alphas else math.nan,
            transverse_momentum_max=math.nan,
            flux_drift=math.nan,
            reason=f"{type(exc).__name__}: {exc}",
        )
    trans = max(
        float(np.max(np.abs(integrate_rows(vg, f.values, w)))) for w in ("v2", "v3")
    )
    return SweepRow(
        tau=tau,
        converged=True,
        iterations=rep.iterations,
        max_alpha=max(rep.alphas) if rep.alphas else math.nan,
        terminal_alpha=rep.alphas[-1] if rep.alphas else math.nan,
        transverse_momentum_max=trans,
        flux_drift=flux_invariants(f, q).max_drift,
    )


def contraction_study(
    b: BoundaryData,
    taus: list[float],
    nu: float,
    sg: SpatialGrid,
    vg: VelocityGrid,
    *,
    tol: float = 1e-10,
    max_iter: int = 200,
    threads: int = 1,
) -> SweepStudy:
    """Solve per tau and summarize contraction behavior across the sweep.

    Rows are independent solves (parallel across threads, order preserved);
    per-row failures are recorded in the row, never raised.  The least-squares
    fit of terminal alpha against (ln tau + 1)/tau is report-only.
    """
    if not taus:
        raise ConfigurationError("tau sweep list is empty")
    if any(t2 <= t1 for t1, t2 in zip(taus, taus[1:])):
        raise ConfigurationError(f"taus must be strictly ascending, got {taus!r}")
    def worker(tau: float) -> SweepRow:
        return _sweep_one(b, tau, nu, sg, vg, tol, max_iter)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(worker, taus))
    else:
        rows = [worker(t) for t in taus]

    conv = [r for r in rows if r.converged and math.isfinite(r.terminal_alpha)]
    decreasing = all(
        r2.terminal_alpha < r1.terminal_alpha for r1, r2 in zip(conv, conv[1:])
    )
    if conv:
        g = np.array([(math.log(r.tau) + 1.0) / r.tau for r in conv])
        alpha = np.array([r.terminal_alpha for r in conv])
        fit_c = float(np.dot(alpha, g) / np.dot(g, g))
        fit_residual = float(np.sqrt(np.mean((alpha - fit_c * g) ** 2)))
    else:
        fit_c = math.nan
        fit_residual = math.nan
    return SweepStudy(
        rows=rows, fit_c=fit_c, fit_residual=fit_residual, alpha_decreasing=decreasing
    )


def lipschitz_probe(
    f: DistributionField,
    g: DistributionField,
    nu: float,
    q: TheoremQuantities,
) -> float:
    """Empirical continuity ratio of the relaxation Gaussian map.

    Returns sup over x and v of |M(f) - M(g)| * e^{+B|v|^2} divided by
    distance(f, g), with B the envelope decay rate from the theorem-range
    temperature cap.  Identical fields return 0 by convention.
    """
    d = distance(f, g)
    if d == 0.0:
        return 0.0
    t_max = q.c_u / (3.0 * q.a_l)
    decay = 1.0 / (4.0 * c2_nu(nu) * t_max)
    grow = np.exp(decay * f.vgrid.vsqf)
    mf = compute_moments_batch(f.values, f.vgrid, nu)
    mg = compute_moments_batch(g.values, g.vgrid, nu)
    worst = 0.0
    for k in range(f.sgrid.n_x):
        diff = np.abs(evaluate(mf[k], f.vgrid) - evaluate(mg[k], g.vgrid))
        worst = max(worst, float(np.max(diff * grow)))
    return worst / d


def write_sweep_csv(study: SweepStudy, path) -> None:
    """Emit the sweep table; full 17-digit floats keep the file byte-stable."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([
            "tau", "converged", "iterations", "max_alpha",
            "terminal_alpha", "transverse_momentum_max", "flux_drift",
        ])
        for r in study.rows:
            writer.writerow([
                f"{r.tau:.17g}", int(r.converged), r.iterations,
                f"{r.max_alpha:.17g}", f"{r.terminal_alpha:.17g}",
                f"{r.transverse_momentum_max:.17g}", f"{r.flux_drift:.17g}",
            ])


def _json_float(value: float) -> float | None:
    """Strict JSON has no NaN/inf token, so non-finite values map to null."""
    v = float(value)
    return v if math.isfinite(v) else None


def study_payload(study: SweepStudy) -> dict:
    """JSON-ready view of a sweep study for checks.json."""
    return {
        "rows": [
            {
                "tau": r.tau,
                "converged": r.converged,
                "iterations": r.iterations,
                "max_alpha": _json_float(r.max_alpha),
                "terminal_alpha": _json_float(r.terminal_alpha),
                "transverse_momentum_max": _json_float(r.transverse_momentum_max),
                "flux_drift": _json_float(r.flux_drift),
                "reason": r.reason,
            }
            for r in study.rows
        ],
        "fit_c": _json_float(study.fit_c),
        "fit_residual": _json_float(study.fit_residual),
        "alpha_decreasing": study.alpha_decreasing,
    }
