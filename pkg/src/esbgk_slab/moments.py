"""Macroscopic fields of a velocity distribution and the relaxation tensor.

A distribution slice yields density, bulk velocity, temperature, and the
stress tensor; their nu-weighted combination is the covariance of the
anisotropic relaxation Gaussian.  Validation is by explicit eigenvalues
(closed-form symmetric 3x3 solve) so the sandwich bounds can be reported
quantitatively, not just pass/fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import ConfigurationError, DegenerateTensorError, VacuumError
from .vgrid import VelocityGrid, integrate_rows

if TYPE_CHECKING:
    from .boundary import TheoremQuantities

__all__ = [
    "MomentSet",
    "SandwichReport",
    "UTBoundsReport",
    "c1_nu",
    "c2_nu",
    "eig_sym3",
    "compute_moments",
    "compute_moments_batch",
    "tensor_sandwich_check",
    "ut_bounds_check",
]


def c1_nu(nu: float) -> float:
    """Lower sandwich coefficient min(1-nu, 1+2*nu)."""
    return min(1.0 - nu, 1.0 + 2.0 * nu)


def c2_nu(nu: float) -> float:
    """Upper sandwich coefficient max(1-nu, 1+2*nu)."""
    return max(1.0 - nu, 1.0 + 2.0 * nu)


def eig_sym3(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of a symmetric 3x3 matrix, ascending, by the trigonometric method."""
    a00, a11, a22 = a[0, 0], a[1, 1], a[2, 2]
    a01, a02, a12 = a[0, 1], a[0, 2], a[1, 2]
    p1 = a01 * a01 + a02 * a02 + a12 * a12
    if p1 == 0.0:
        return np.sort(np.array([a00, a11, a22]))
    q = (a00 + a11 + a22) / 3.0
    p2 = (a00 - q) ** 2 + (a11 - q) ** 2 + (a22 - q) ** 2 + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    b = (a - q * np.eye(3)) / p
    det_b = (
        b[0, 0] * (b[1, 1] * b[2, 2] - b[1, 2] * b[2, 1])
        - b[0, 1] * (b[1, 0] * b[2, 2] - b[1, 2] * b[2, 0])
        + b[0, 2] * (b[1, 0] * b[2, 1] - b[1, 1] * b[2, 0])
    )
    r = min(1.0, max(-1.0, det_b / 2.0))
    phi = math.acos(r) / 3.0
    lam_max = q + 2.0 * p * math.cos(phi)
    lam_min = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    lam_mid = 3.0 * q - lam_max - lam_min
    return np.array([lam_min, lam_mid, lam_max])


@dataclass(frozen=True)
class MomentSet:
    """Density, bulk velocity, temperature, stress, and relaxation tensor."""

    rho: float
    U: np.ndarray
    T: float
    Theta: np.ndarray
    T_nu: np.ndarray
    nu: float

    @property
    def energy(self) -> float:
        """Second raw moment: integral of f |v|^2 = rho (3T + |U|^2)."""
        return self.rho * (3.0 * self.T + float(self.U @ self.U))

    @property
    def momentum(self) -> np.ndarray:
        return self.rho * self.U


@dataclass(frozen=True)
class SandwichReport:
    eigenvalues: np.ndarray
    lower: float
    upper: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(
            self.eigenvalues[0] >= self.lower - self.tol
            and self.eigenvalues[-1] <= self.upper + self.tol
        )


@dataclass(frozen=True)
class UTBoundsReport:
    speed: float
    speed_bound: float
    T: float
    T_lower: float
    T_upper: float

    @property
    def passed(self) -> bool:
        return bool(
            self.speed <= self.speed_bound
            and self.T_lower <= self.T <= self.T_upper
        )

    @property
    def margins(self) -> dict[str, float]:
        return {
            "speed": self.speed_bound - self.speed,
            "T_lower": self.T - self.T_lower,
            "T_upper": self.T_upper - self.T,
        }


def _moment_weight_rows(grid: VelocityGrid) -> list[np.ndarray]:
    v1, v2, v3 = grid.v1f, grid.v2f, grid.v3f
    return [
        np.ones_like(v1),
        v1, v2, v3,
        v1 * v1, v2 * v2, v3 * v3,
        v1 * v2, v1 * v3, v2 * v3,
    ]


def _require_nu(nu: float) -> float:
    nu = float(nu)
    if not -0.5 < nu < 1.0:
        raise ConfigurationError(f"nu must lie in (-1/2, 1), got {nu}")
    return nu


def compute_moments_batch(values: np.ndarray, grid: VelocityGrid, nu: float) -> list[MomentSet]:
    """Moments of each row of a (n_slices, n_nodes) sample batch."""
    nu = _require_nu(nu)
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    raw = np.stack([integrate_rows(grid, values, w) for w in _moment_weight_rows(grid)])
    out = []
    for k in range(values.shape[0]):
        rho = raw[0, k]
        if not rho > 0.0:
            raise VacuumError(f"slice {k}: density {rho} is not positive")
        u = raw[1:4, k] / rho
        m2 = np.array([
            [raw[4, k], raw[7, k], raw[8, k]],
            [raw[7, k], raw[5, k], raw[9, k]],
            [raw[8, k], raw[9, k], raw[6, k]],
        ])
        theta = m2 / rho - np.outer(u, u)
        theta = 0.5 * (theta + theta.T)
        temp = (theta[0, 0] + theta[1, 1] + theta[2, 2]) / 3.0
        t_nu = (1.0 - nu) * temp * np.eye(3) + nu * theta
        lam = eig_sym3(t_nu)
        if lam[0] <= 0.0:
            raise DegenerateTensorError(
                f"slice {k}: relaxation tensor has eigenvalue {lam[0]:.3e} <= 0 "
                f"(nu={nu}, T={temp:.3e})"
            )
        u.setflags(write=False)
        theta.setflags(write=False)
        t_nu.setflags(write=False)
        out.append(MomentSet(rho=float(rho), U=u, T=float(temp), Theta=theta, T_nu=t_nu, nu=nu))
    return out


def compute_moments(f_slice: np.ndarray, grid: VelocityGrid, nu: float) -> MomentSet:
    """MomentSet of a single nonnegative velocity slice (vacuum -> error)."""
    flat = grid.ravel_values(f_slice)
    return compute_moments_batch(flat[None, :], grid, nu)[0]


def tensor_sandwich_check(m: MomentSet) -> SandwichReport:
    """Verify the relaxation tensor eigenvalues sit in [C1_nu T, C2_nu T]."""
    lam = eig_sym3(m.T_nu)
    return SandwichReport(
        eigenvalues=lam,
        lower=c1_nu(m.nu) * m.T,
        upper=c2_nu(m.nu) * m.T,
        tol=1e-10 * m.T,
    )


def ut_bounds_check(m: MomentSet, q: TheoremQuantities, gamma_l: float | None = None) -> UTBoundsReport:
    """Verify the bulk-speed and temperature bounds implied by the inflow quantities."""
    if gamma_l is None:
        gamma_l = q.gamma_l
    speed = float(np.linalg.norm(m.U))
    return UTBoundsReport(
        speed=speed,
        speed_bound=(q.a_u + q.c_u) / (2.0 * q.a_l),
        T=m.T,
        T_lower=gamma_l / (3.0 * q.a_u ** 2),
        T_upper=q.c_u / (3.0 * q.a_l),
    )
