"""Moment extraction, the relaxation tensor, and its eigenvalue bounds."""

from __future__ import annotations

import math
from types import SimpleNamespace

import numpy as np
import pytest

import oracles
from esbgk_slab.errors import ConfigurationError, DegenerateTensorError, VacuumError
from esbgk_slab.moments import (
    MomentSet,
    c1_nu,
    c2_nu,
    compute_moments,
    compute_moments_batch,
    eig_sym3,
    tensor_sandwich_check,
    ut_bounds_check,
)
from esbgk_slab.vgrid import GridSpec, build_grid

TWO_PI = 2.0 * math.pi


def diag_gaussian(grid, rho, u, theta_diag):
    """Separable Gaussian with bulk velocity u and diagonal stress theta_diag."""
    out = np.full(grid.n_nodes, rho, dtype=np.float64)
    for coord, mean, var in zip((grid.v1f, grid.v2f, grid.v3f), u, theta_diag):
        out = out * np.exp(-((coord - mean) ** 2) / (2.0 * var)) / math.sqrt(TWO_PI * var)
    return out


def random_mixture(grid, rng, n_parts=3):
    out = np.zeros(grid.n_nodes)
    for _ in range(n_parts):
        rho = rng.uniform(0.5, 2.0)
        u = rng.uniform(-0.3, 0.3, size=3)
        theta = rng.uniform(0.5, 1.2, size=3)
        out += diag_gaussian(grid, rho, u, theta)
    return out


@pytest.fixture(scope="module")
def grid():
    return build_grid(GridSpec(counts=(24, 16, 16)))


def test_standard_maxwellian_moments(grid):
    f = diag_gaussian(grid, 1.0, (0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
    m = compute_moments(f, grid, nu=0.3)
    assert abs(m.rho - 1.0) <= 1e-8
    assert np.max(np.abs(m.U)) <= 1e-8
    assert abs(m.T - 1.0) <= 1e-8
    assert np.max(np.abs(m.Theta - np.eye(3))) <= 1e-8


def test_shifted_anisotropic_moments():
    g = build_grid(GridSpec(counts=(28, 24, 24), v_max=10.0))
    rho, u, th = 2.0, (0.2, -0.1, 0.3), (0.8, 0.6, 0.9)
    m = compute_moments(diag_gaussian(g, rho, u, th), g, nu=-0.2)
    assert abs(m.rho - rho) <= 1e-8
    assert np.max(np.abs(m.U - np.array(u))) <= 1e-8
    assert np.max(np.abs(m.Theta - np.diag(th))) <= 1e-8
    assert abs(m.T - sum(th) / 3.0) <= 1e-8


def test_correlated_gaussian_recovers_full_stress():
    g = build_grid(GridSpec(counts=(28, 24, 24), v_max=10.0))
    c, s = math.cos(0.4), math.sin(0.4)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    theta = rot @ np.diag([1.1, 0.6, 0.8]) @ rot.T
    u = np.array([0.1, 0.2, -0.1])
    vals = oracles.gaussian_values(1.5, u, theta, g.v1f, g.v2f, g.v3f)
    m = compute_moments(vals, g, nu=0.4)
    assert np.max(np.abs(m.Theta - theta)) <= 1e-8
    expected_t_nu = 0.6 * m.T * np.eye(3) + 0.4 * theta
    assert np.max(np.abs(m.T_nu - expected_t_nu)) <= 1e-8


def test_inflow_slab_slice_density_is_two_pi():
    g = build_grid(GridSpec(counts=(24, 16, 16), v1_breaks=(1.0, 2.0)))
    band = (g.v1f >= 1.0) & (g.v1f <= 2.0)
    f = np.where(band, np.exp(-(g.v2f**2 + g.v3f**2) / 2.0), 0.0)
    m = compute_moments(f, g, nu=0.0)
    assert abs(m.rho - TWO_PI) <= 1e-8 * TWO_PI
    # v1 uniform on [1, 2]; transverse axes unit Gaussians
    assert abs(m.U[0] - 1.5) <= 1e-8
    assert np.max(np.abs(m.Theta - np.diag([1.0 / 12.0, 1.0, 1.0]))) <= 1e-8
    assert abs(m.T - 25.0 / 36.0) <= 1e-8


def test_trace_identity_and_nu_zero_collapse(grid):
    rng = np.random.default_rng(20260823)
    for _ in range(10):
        f = random_mixture(grid, rng)
        m = compute_moments(f, grid, nu=0.0)
        tr = m.Theta[0, 0] + m.Theta[1, 1] + m.Theta[2, 2]
        assert abs(tr - 3.0 * m.T) <= 1e-14 * max(1.0, abs(tr))
        assert np.max(np.abs(m.T_nu - m.T * np.eye(3))) <= 1e-15 * m.T


def test_hand_case_relaxation_tensor():
    # rho=2, U=(1,0,0), Theta=diag(2,1,1), nu=1/2 -> T=4/3, T_nu=diag(5/3,7/6,7/6)
    g = build_grid(GridSpec(counts=(32, 24, 24), v_max=12.0))
    f = diag_gaussian(g, 2.0, (1.0, 0.0, 0.0), (2.0, 1.0, 1.0))
    m = compute_moments(f, g, nu=0.5)
    assert abs(m.T - 4.0 / 3.0) <= 1e-8
    assert np.max(np.abs(m.T_nu - np.diag([5.0 / 3.0, 7.0 / 6.0, 7.0 / 6.0]))) <= 1e-8
    rep = tensor_sandwich_check(m)
    assert rep.passed
    assert abs(rep.lower - 2.0 / 3.0) <= 1e-8
    assert abs(rep.upper - 8.0 / 3.0) <= 1e-8
    assert np.max(np.abs(rep.eigenvalues - np.array([7.0 / 6.0, 7.0 / 6.0, 5.0 / 3.0]))) <= 1e-8


def test_extreme_nu_isotropic_sandwich(grid):
    f = diag_gaussian(grid, 1.0, (0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
    m = compute_moments(f, grid, nu=-0.49)
    rep = tensor_sandwich_check(m)
    assert rep.passed
    assert rep.lower == pytest.approx(0.02 * m.T, rel=1e-12)
    assert rep.upper == pytest.approx(1.49 * m.T, rel=1e-12)


def test_sandwich_flags_doctored_tensor():
    base = MomentSet(
        rho=1.0, U=np.zeros(3), T=1.0, Theta=np.eye(3),
        T_nu=np.diag([3.0, 1.0, 1.0]), nu=0.5,
    )
    rep = tensor_sandwich_check(base)
    assert not rep.passed  # eigenvalue 3.0 exceeds C2_nu * T = 2.0
    low = MomentSet(
        rho=1.0, U=np.zeros(3), T=1.0, Theta=np.eye(3),
        T_nu=np.diag([0.1, 1.0, 1.0]), nu=0.5,
    )
    assert not tensor_sandwich_check(low).passed


def test_vacuum_and_degenerate_errors(grid):
    with pytest.raises(VacuumError):
        compute_moments(np.zeros(grid.n_nodes), grid, nu=0.2)
    with pytest.raises(VacuumError):
        compute_moments(-diag_gaussian(grid, 1.0, (0, 0, 0), (1, 1, 1)), grid, nu=0.2)
    # signed garbage with positive mass but an indefinite stress tensor
    bad = diag_gaussian(grid, 1.0, (0, 0, 0), (1.0, 1.0, 1.0)) \
        - diag_gaussian(grid, 0.95, (0, 0, 0), (3.0, 0.1, 0.1))
    with pytest.raises(DegenerateTensorError):
        compute_moments(bad, grid, nu=0.5)


@pytest.mark.parametrize("nu", [-0.5, 1.0, 1.5, -2.0])
def test_nu_out_of_range(grid, nu):
    f = diag_gaussian(grid, 1.0, (0, 0, 0), (1, 1, 1))
    with pytest.raises(ConfigurationError):
        compute_moments(f, grid, nu=nu)


def test_random_fields_match_fsum_oracle_and_sandwich(grid):
    rng = np.random.default_rng(7)
    for _ in range(12):
        f = random_mixture(grid, rng)
        nu = rng.uniform(-0.45, 0.95)
        m = compute_moments(f, grid, nu)
        ref = oracles.slice_moments(f, grid.w3, grid.v1f, grid.v2f, grid.v3f, nu)
        assert abs(m.rho - ref["rho"]) <= 1e-13 * ref["rho"]
        assert np.max(np.abs(m.U - ref["U"])) <= 1e-12
        assert np.max(np.abs(m.Theta - ref["Theta"])) <= 1e-12
        rep = tensor_sandwich_check(m)
        assert rep.passed
        lam_ref = oracles.eig_sym_reference(m.T_nu)
        assert np.max(np.abs(rep.eigenvalues - lam_ref)) <= 1e-12 * max(1.0, lam_ref[-1])


def test_eig_sym3_diagonal_and_degenerate():
    assert np.array_equal(eig_sym3(np.diag([3.0, 1.0, 2.0])), np.array([1.0, 2.0, 3.0]))
    a = np.array([[2.0, 1e-14, 0.0], [1e-14, 2.0, 0.0], [0.0, 0.0, 5.0]])
    lam = eig_sym3(a)
    assert np.max(np.abs(lam - oracles.eig_sym_reference(a))) <= 1e-12


def test_batch_matches_single_calls(grid):
    rng = np.random.default_rng(11)
    rows = np.stack([random_mixture(grid, rng) for _ in range(4)])
    batch = compute_moments_batch(rows, grid, nu=0.25)
    for k in range(4):
        single = compute_moments(rows[k], grid, nu=0.25)
        assert single.rho == batch[k].rho
        assert np.array_equal(single.U, batch[k].U)
        assert np.array_equal(single.T_nu, batch[k].T_nu)


def test_energy_and_momentum_derived_fields(grid):
    f = diag_gaussian(grid, 2.0, (0.3, 0.0, 0.0), (0.9, 0.8, 1.1))
    m = compute_moments(f, grid, nu=0.1)
    raw_energy = float(np.dot(f * grid.w3, grid.vsqf))
    assert abs(m.energy - raw_energy) <= 1e-10 * raw_energy
    assert np.max(np.abs(m.momentum - m.rho * m.U)) == 0.0


def test_ut_bounds_check_frozen_arithmetic():
    q = SimpleNamespace(a_u=4.0, c_u=8.0, a_l=1.0, gamma_l=2.0)
    ok = MomentSet(rho=1.0, U=np.array([1.0, 2.0, 3.0]), T=1.0,
                   Theta=np.eye(3), T_nu=np.eye(3), nu=0.0)
    rep = ut_bounds_check(ok, q)
    assert rep.speed_bound == pytest.approx(6.0)
    assert rep.T_lower == pytest.approx(2.0 / 48.0)
    assert rep.T_upper == pytest.approx(8.0 / 3.0)
    assert rep.passed
    assert rep.margins["speed"] == pytest.approx(6.0 - math.sqrt(14.0))
    hot = MomentSet(rho=1.0, U=np.zeros(3), T=3.0,
                    Theta=3.0 * np.eye(3), T_nu=3.0 * np.eye(3), nu=0.0)
    assert not ut_bounds_check(hot, q).passed
    assert ut_bounds_check(hot, q, gamma_l=2.0).T_lower == pytest.approx(2.0 / 48.0)


def test_sandwich_coefficients():
    assert c1_nu(0.5) == 0.5 and c2_nu(0.5) == 2.0
    assert c1_nu(-0.25) == 0.5 and c2_nu(-0.25) == 1.25
    assert c1_nu(0.0) == 1.0 and c2_nu(0.0) == 1.0
