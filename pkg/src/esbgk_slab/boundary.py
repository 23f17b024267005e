"""Inflow boundary data: the slab family, tabulated samples, and admissibility.

The stationary problem is driven entirely by the distributions entering the
slab from its two walls.  This module represents that data, computes the six
inflow functionals plus the flux product that control the solution theory,
and audits the three admissibility conditions (integrability against
1/|v1|, zero transverse momentum, positive attenuated flux product).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError, InadmissibleDataError, ShapeError
from .vgrid import VelocityGrid, integrate

__all__ = [
    "BoundaryData",
    "TheoremQuantities",
    "AdmissibilityReport",
    "remark4_family",
    "tabulated_data",
    "load_tabulated_csv",
    "write_tabulated_csv",
    "theorem_quantities",
    "check_admissibility",
    "min_tau_estimate",
]

PRINTED_CONSTANT_NOTE = (
    "inflow quantities are direct quadratures of their defining integrals; "
    "the source text prints compact constants for the explicit slab family "
    "that differ by fixed factors (transverse Gaussian contributes 2*pi per "
    "unit amplitude) and are not used here"
)


@dataclass(frozen=True)
class BoundaryData:
    """Inflow data: left wall feeds v1 > 0, right wall feeds v1 < 0.

    kind "remark4" is the closed-form family (amplitude times an indicator
    band in v1 times a unit transverse Gaussian); kind "tabulated" carries
    per-node samples tied to a specific velocity grid.  vanish_band is the
    declared radius around v1 = 0 on which the data is exactly zero, which
    is what makes the 1/|v1| weights integrable.
    """

    kind: str
    vanish_band: float
    amp_left: float | None = None
    amp_right: float | None = None
    band: tuple[float, float] | None = None
    f_left: np.ndarray | None = None
    f_right: np.ndarray | None = None

    def sample(self, grid: VelocityGrid) -> tuple[np.ndarray, np.ndarray]:
        """Left and right inflow values as flat per-node arrays on grid."""
        if self.kind == "remark4":
            r1, r2 = self.band
            transverse = np.exp(-(grid.v2f**2 + grid.v3f**2) / 2.0)
            left = np.where(
                (grid.v1f >= r1) & (grid.v1f <= r2), self.amp_left * transverse, 0.0
            )
            right = np.where(
                (grid.v1f >= -r2) & (grid.v1f <= -r1), self.amp_right * transverse, 0.0
            )
        else:
            if self.f_left.shape != (grid.n_nodes,):
                raise ShapeError(
                    f"tabulated data has {self.f_left.shape[0]} nodes, "
                    f"grid has {grid.n_nodes}"
                )
            left, right = self.f_left, self.f_right
            if np.any(left[grid.v1f <= 0.0] != 0.0) or np.any(right[grid.v1f >= 0.0] != 0.0):
                raise InadmissibleDataError(
                    "tabulated inflow leaks outside its half-space: left data "
                    "must vanish for v1 <= 0 and right data for v1 >= 0"
                )
            if self.vanish_band > 0.0:
                inside = np.abs(grid.v1f) < self.vanish_band
                if np.any(left[inside] != 0.0) or np.any(right[inside] != 0.0):
                    raise InadmissibleDataError(
                        f"data nonzero inside the declared vanish band "
                        f"|v1| < {self.vanish_band}"
                    )
        left = np.ascontiguousarray(left)
        right = np.ascontiguousarray(right)
        left.setflags(write=False)
        right.setflags(write=False)
        return left, right


def remark4_family(c_left: float, c_right: float, r1: float, r2: float) -> BoundaryData:
    """Closed-form inflow family: amplitude, v1 band [r1, r2], unit transverse Gaussian."""
    if not (c_left > 0.0 and c_right > 0.0):
        raise ConfigurationError(
            f"amplitudes must be positive, got ({c_left}, {c_right})"
        )
    if not 0.0 < r1 < r2:
        raise ConfigurationError(f"band must satisfy 0 < r1 < r2, got ({r1}, {r2})")
    return BoundaryData(
        kind="remark4",
        vanish_band=float(r1),
        amp_left=float(c_left),
        amp_right=float(c_right),
        band=(float(r1), float(r2)),
    )


def tabulated_data(
    f_left: np.ndarray, f_right: np.ndarray, vanish_band: float = 0.0
) -> BoundaryData:
    """Per-node inflow samples; support and band declarations checked at sampling."""
    f_left = np.asarray(f_left, dtype=np.float64)
    f_right = np.asarray(f_right, dtype=np.float64)
    if f_left.shape != f_right.shape or f_left.ndim != 1:
        raise ShapeError(
            f"left/right samples must be equal-length flat arrays, "
            f"got {f_left.shape} and {f_right.shape}"
        )
    if np.any(f_left < 0.0) or np.any(f_right < 0.0):
        raise InadmissibleDataError("inflow samples must be nonnegative")
    if not (np.any(f_left > 0.0) or np.any(f_right > 0.0)):
        raise InadmissibleDataError("inflow data is identically zero")
    if vanish_band < 0.0:
        raise ConfigurationError(f"vanish_band must be >= 0, got {vanish_band}")
    return BoundaryData(
        kind="tabulated",
        vanish_band=float(vanish_band),
        f_left=f_left,
        f_right=f_right,
    )


def load_tabulated_csv(path, grid: VelocityGrid, vanish_band: float = 0.0) -> BoundaryData:
    """Read `v1,v2,v3,f` rows; node coordinates must match grid order exactly."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["v1", "v2", "v3", "f"]:
            raise ConfigurationError(
                f"expected CSV header 'v1,v2,v3,f', got {header!r} in {path}"
            )
        data = np.array([[float(c) for c in row] for row in reader])
    if data.shape != (grid.n_nodes, 4):
        raise ShapeError(
            f"{path} has {data.shape[0]} rows, grid has {grid.n_nodes} nodes"
        )
    for col, ref, name in ((0, grid.v1f, "v1"), (1, grid.v2f, "v2"), (2, grid.v3f, "v3")):
        if not np.array_equal(data[:, col], ref):
            k = int(np.argmax(data[:, col] != ref))
            raise ConfigurationError(
                f"{path} row {k}: {name}={data[k, col]!r} does not match "
                f"grid node {ref[k]!r}; rows must follow grid node order"
            )
    f = data[:, 3]
    return tabulated_data(
        np.where(grid.v1f > 0.0, f, 0.0),
        np.where(grid.v1f < 0.0, f, 0.0),
        vanish_band,
    )


def write_tabulated_csv(path, grid: VelocityGrid, values: np.ndarray) -> None:
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (grid.n_nodes,):
        raise ShapeError(f"values have {values.shape}, grid has {grid.n_nodes} nodes")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["v1", "v2", "v3", "f"])
        for a, b, c, d in zip(grid.v1f, grid.v2f, grid.v3f, values):
            writer.writerow([repr(float(a)), repr(float(b)), repr(float(c)), repr(float(d))])


@dataclass(frozen=True)
class TheoremQuantities:
    """Inflow functionals controlling existence: mass/energy caps, floors, and flux product.

    a_u caps density and c_u energy; a_l and c_l are the attenuated floors;
    a_s and c_s are the 1/|v1| moments whose finiteness is the integrability
    condition; gamma_l is the product of attenuated directional fluxes whose
    positivity rules out degenerate temperature.
    """

    a_u: float
    a_l: float
    a_s: float
    c_u: float
    c_l: float
    c_s: float
    gamma_l: float
    tau: float


def theorem_quantities(
    b: BoundaryData,
    tau: float,
    grid: VelocityGrid,
    *,
    a_u_override: float | None = None,
) -> TheoremQuantities:
    """The six inflow functionals plus the attenuated flux product at scale tau.

    The mass cap a_u is computed first and frozen, then reused inside every
    attenuated integrand; a_u_override substitutes a fixed attenuation
    exponent (used by the scaling property test) without touching the
    reported a_u.
    """
    if not tau > 0.0:
        raise ConfigurationError(f"tau must be positive, got {tau}")
    f_left, f_right = b.sample(grid)
    f_lr = f_left + f_right
    band = b.vanish_band

    a_u = 2.0 * integrate(grid, f_lr, "1")
    a_exp = a_u if a_u_override is None else float(a_u_override)
    with np.errstate(under="ignore"):
        atten = np.exp(-a_exp / (tau * np.abs(grid.v1f)))

    a_l = integrate(grid, atten * f_lr, "1")
    a_s = integrate(grid, f_lr, "inv_abs_v1", vanish_band=band)
    c_u = 2.0 * integrate(grid, f_lr, "vsq")
    c_l = integrate(grid, atten * f_lr, "vsq")
    c_s = integrate(grid, f_lr, "inv_abs_v1_one_plus_vsq", vanish_band=band) - a_s
    flux_left = integrate(grid, atten * f_left, "abs_v1")
    flux_right = integrate(grid, atten * f_right, "abs_v1")
    gamma_l = flux_left * flux_right

    values = (a_u, a_l, a_s, c_u, c_l, c_s, gamma_l)
    if not all(math.isfinite(v) for v in values):
        raise InadmissibleDataError(
            f"non-finite inflow quantities (a_u={a_u}, a_s={a_s}, c_s={c_s}); "
            "data concentrates too much mass near v1 = 0"
        )
    return TheoremQuantities(
        a_u=a_u, a_l=a_l, a_s=a_s, c_u=c_u, c_l=c_l, c_s=c_s,
        gamma_l=gamma_l, tau=float(tau),
    )


@dataclass(frozen=True)
class AdmissibilityReport:
    """Audit of the three admissibility conditions, report-only."""

    quantities: TheoremQuantities
    integrability_value: float
    divergence_ratio: float | None
    condition_integrable: bool
    transverse_momentum: dict[str, float]
    condition_momentum: bool
    condition_gamma: bool
    printed_constant_note: str = PRINTED_CONSTANT_NOTE

    @property
    def passed(self) -> bool:
        return bool(
            self.condition_integrable
            and self.condition_momentum
            and self.condition_gamma
        )


# relative growth of the excised 1/|v1| integral that flags divergence
DIVERGENCE_GROWTH_LIMIT = 1.05


def _excised_integrability(grid: VelocityGrid, f_lr: np.ndarray, cutoff: float) -> float:
    weight = np.where(
        np.abs(grid.v1f) >= cutoff,
        (1.0 + grid.vsqf) / np.abs(grid.v1f),
        0.0,
    )
    return integrate(grid, f_lr, weight)


def check_admissibility(b: BoundaryData, tau: float, grid: VelocityGrid) -> AdmissibilityReport:
    """Audit integrability, transverse momentum, and flux-product positivity.

    Tabulated data cannot certify integrability pointwise, so it is probed by
    nested excision: the 1/|v1| integral is evaluated outside two cutoff
    radii (4x and 2x the smallest grid speed); growth beyond 5% between them
    flags concentration near v1 = 0.  Closed-form family data has an exact
    vanishing band, so the probe is skipped.
    """
    q = theorem_quantities(b, tau, grid)
    f_left, f_right = b.sample(grid)
    f_lr = f_left + f_right

    integrability = q.a_s + q.c_s
    if b.kind == "tabulated":
        vmin = float(np.min(np.abs(grid.v1f)))
        outer = _excised_integrability(grid, f_lr, 4.0 * vmin)
        inner = _excised_integrability(grid, f_lr, 2.0 * vmin)
        ratio = inner / outer if outer > 0.0 else math.inf
        integrable = math.isfinite(integrability) and ratio <= DIVERGENCE_GROWTH_LIMIT
    else:
        ratio = None
        integrable = math.isfinite(integrability)

    momentum = {
        "left_v2": integrate(grid, f_left, "v2"),
        "left_v3": integrate(grid, f_left, "v3"),
        "right_v2": integrate(grid, f_right, "v2"),
        "right_v3": integrate(grid, f_right, "v3"),
    }
    momentum_ok = max(abs(v) for v in momentum.values()) <= 1e-12 * q.a_u

    return AdmissibilityReport(
        quantities=q,
        integrability_value=integrability,
        divergence_ratio=ratio,
        condition_integrable=integrable,
        transverse_momentum=momentum,
        condition_momentum=bool(momentum_ok),
        condition_gamma=bool(q.gamma_l > 0.0),
    )


def min_tau_estimate(
    b: BoundaryData,
    grid: VelocityGrid,
    solver_probe: Callable[[float], bool],
    *,
    tau_lo: float = 1.0,
    tau_hi: float = 1024.0,
    rel_tol: float = 0.05,
) -> float:
    """Empirical relaxation-scale threshold by bisection on solver success.

    solver_probe(tau) reports whether the fixed-point iteration converges
    inside the solution space at that tau.  The returned threshold is the
    smallest probed tau that converged; it is an empirical estimate, not a
    rigorous constant.
    """
    if not 0.0 < tau_lo < tau_hi:
        raise ConfigurationError(
            f"need 0 < tau_lo < tau_hi, got ({tau_lo}, {tau_hi})"
        )
    if not solver_probe(tau_hi):
        raise InadmissibleDataError(
            f"solver probe failed even at tau = {tau_hi}; boundary data "
            "appears inadmissible at every probed relaxation scale"
        )
    if solver_probe(tau_lo):
        return tau_lo
    lo, hi = tau_lo, tau_hi
    while hi - lo > rel_tol * hi:
        mid = math.sqrt(lo * hi)
        if solver_probe(mid):
            hi = mid
        else:
            lo = mid
    return hi
