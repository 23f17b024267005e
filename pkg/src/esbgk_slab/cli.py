"""Command-line entry point: configuration ingestion, run orchestration, artifacts.

One JSON document describes a run; subcommands share it.  check audits the
inflow data and writes quantities.json, solve writes profiles.csv plus
summary.json (and optionally a raw field dump), sweep writes sweep.csv plus
checks.json, and selftest runs the embedded invariant suite on built-in
grids.  Exit codes: 0 success, 1 domain failure (inadmissible data,
non-convergence, failed invariant), 2 configuration or I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .boundary import (
    BoundaryData,
    check_admissibility,
    load_tabulated_csv,
    remark4_family,
    theorem_quantities,
)
from .errors import (
    ConfigurationError,
    InadmissibleDataError,
    NonConvergenceError,
    ShapeError,
    SingularWeightError,
    SlabModelError,
    TauTooSmallError,
)
from .gaussian import evaluate
from .moments import compute_moments, compute_moments_batch
from .solver import (
    DistributionField,
    SolverConfig,
    SpatialGrid,
    apply_phi,
    distance,
    initial_iterate,
    solve,
)
from .verify import (
    entropy_profile,
    flux_invariants,
    contraction_study,
    study_payload,
    theorem_bounds_check,
    write_sweep_csv,
)
from .vgrid import GridSpec, VelocityGrid, build_grid, selfcheck

__all__ = ["RunConfig", "load_run_config", "main"]

THREADS_ENV = "ESBGK_SLAB_THREADS"
SELFTEST_FAULT_ENV = "ESBGK_SLAB_SELFTEST_FAULT"

PROFILE_COLUMNS = (
    "x", "rho", "U1", "U2", "U3", "T",
    "Theta11", "Theta12", "Theta13", "Theta22", "Theta23", "Theta33",
    "flux_mass", "flux_mom1", "flux_mom2", "flux_mom3", "flux_energy",
)

_TOP_KEYS = {
    "boundary", "nu", "kappa", "tau", "tol", "max_iter", "omega_enforce",
    "initial", "n_x", "velocity_grid", "taus", "out_dir", "threads",
}
_GRID_KEYS = {"counts", "v_max", "eps_v1", "rule", "v1_breaks"}
_BOUNDARY_KEYS = {"family", "params", "tabulated", "vanish_band"}


@dataclass(frozen=True)
class RunConfig:
    """Parsed run description; the boundary is resolved against the built grid."""

    solver: SolverConfig
    grid_spec: GridSpec
    boundary_raw: dict
    config_dir: str
    n_x: int | None = None
    taus: tuple[float, ...] | None = None
    initial: str = "auto"
    out_dir: str | None = None
    threads: int | None = None

    def build_velocity_grid(self) -> VelocityGrid:
        return build_grid(self.grid_spec)

    def build_boundary(self, grid: VelocityGrid) -> BoundaryData:
        raw = self.boundary_raw
        if "family" in raw:
            return remark4_family(*raw["params"])
        path = raw["tabulated"]
        if not os.path.isabs(path):
            path = os.path.join(self.config_dir, path)
        return load_tabulated_csv(path, grid, raw.get("vanish_band", 0.0))


def _reject_unknown(obj: dict, allowed: set[str], context: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigurationError(
                f"unknown key {key!r} in {context}; allowed keys: {sorted(allowed)}"
            )


def _as_number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{name} must be a number, got {value!r}")
    return float(value)


def _as_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"{name} must be an integer, got {value!r}")
    return value


def _as_str(value, name: str) -> str:
    if not isinstance(value, str):
        raise ConfigurationError(f"{name} must be a string, got {value!r}")
    return value


def _parse_boundary(raw) -> dict:
    if not isinstance(raw, dict):
        raise ConfigurationError(f"boundary must be an object, got {raw!r}")
    _reject_unknown(raw, _BOUNDARY_KEYS, "boundary")
    if ("family" in raw) == ("tabulated" in raw):
        raise ConfigurationError(
            "boundary must give exactly one of 'family' or 'tabulated'"
        )
    if "family" in raw:
        family = _as_str(raw["family"], "boundary.family")
        if family != "remark4":
            raise ConfigurationError(
                f"unknown boundary family {family!r}; only 'remark4' is defined"
            )
        params = raw.get("params")
        if not isinstance(params, list) or len(params) != 4:
            raise ConfigurationError(
                "boundary.params must be a 4-element list "
                "[amp_left, amp_right, r1, r2]"
            )
        return {
            "family": family,
            "params": [_as_number(p, "boundary.params") for p in params],
        }
    spec = {"tabulated": _as_str(raw["tabulated"], "boundary.tabulated")}
    if "vanish_band" in raw:
        spec["vanish_band"] = _as_number(raw["vanish_band"], "boundary.vanish_band")
    return spec


def _parse_grid_spec(raw, boundary: dict) -> GridSpec:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigurationError(f"velocity_grid must be an object, got {raw!r}")
    _reject_unknown(raw, _GRID_KEYS, "velocity_grid")
    counts = raw.get("counts", [24, 16, 16])
    if not isinstance(counts, list) or len(counts) != 3:
        raise ConfigurationError(
            f"velocity_grid.counts must be a 3-element list, got {counts!r}"
        )
    if "v1_breaks" in raw:
        breaks = raw["v1_breaks"]
        if not isinstance(breaks, list):
            raise ConfigurationError(
                f"velocity_grid.v1_breaks must be a list, got {breaks!r}"
            )
        v1_breaks = tuple(_as_number(x, "velocity_grid.v1_breaks") for x in breaks)
    elif "family" in boundary:
        # the family data jumps at its band edges; pinning panel edges there
        # keeps the boundary integrals exact
        v1_breaks = (boundary["params"][2], boundary["params"][3])
    else:
        v1_breaks = ()
    kwargs = {}
    if "v_max" in raw:
        kwargs["v_max"] = _as_number(raw["v_max"], "velocity_grid.v_max")
    if "eps_v1" in raw:
        kwargs["eps_v1"] = _as_number(raw["eps_v1"], "velocity_grid.eps_v1")
    if "rule" in raw:
        kwargs["rule"] = _as_str(raw["rule"], "velocity_grid.rule")
    return GridSpec(
        counts=tuple(_as_int(c, "velocity_grid.counts") for c in counts),
        v1_breaks=v1_breaks,
        **kwargs,
    )


def load_run_config(path) -> RunConfig:
    """Parse and validate the single JSON run description."""
    with open(path) as handle:
        try:
            raw = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError(f"config root must be an object, got {type(raw).__name__}")
    _reject_unknown(raw, _TOP_KEYS, "config")
    if "boundary" not in raw:
        raise ConfigurationError("config is missing the 'boundary' section")
    if "nu" not in raw:
        raise ConfigurationError("config is missing 'nu'")
    boundary = _parse_boundary(raw["boundary"])

    if ("kappa" in raw) == ("tau" in raw):
        raise ConfigurationError("config must give exactly one of 'kappa' or 'tau'")
    nu = _as_number(raw["nu"], "nu")
    solver_kwargs = {}
    if "tol" in raw:
        solver_kwargs["tol"] = _as_number(raw["tol"], "tol")
    if "max_iter" in raw:
        solver_kwargs["max_iter"] = _as_int(raw["max_iter"], "max_iter")
    if "omega_enforce" in raw:
        solver_kwargs["omega_enforce"] = _as_str(raw["omega_enforce"], "omega_enforce")
    if "kappa" in raw:
        solver = SolverConfig(
            kappa=_as_number(raw["kappa"], "kappa"), nu=nu, **solver_kwargs
        )
    else:
        solver = SolverConfig.from_tau(
            _as_number(raw["tau"], "tau"), nu, **solver_kwargs
        )

    taus = None
    if "taus" in raw:
        if not isinstance(raw["taus"], list):
            raise ConfigurationError(f"taus must be a list, got {raw['taus']!r}")
        taus = tuple(_as_number(t, "taus") for t in raw["taus"])

    initial = _as_str(raw.get("initial", "auto"), "initial")
    n_x = _as_int(raw["n_x"], "n_x") if "n_x" in raw else None
    out_dir = _as_str(raw["out_dir"], "out_dir") if "out_dir" in raw else None
    threads = _as_int(raw["threads"], "threads") if "threads" in raw else None

    return RunConfig(
        solver=solver,
        grid_spec=_parse_grid_spec(raw.get("velocity_grid"), boundary),
        boundary_raw=boundary,
        config_dir=os.path.dirname(os.path.abspath(path)),
        n_x=n_x,
        taus=taus,
        initial=initial,
        out_dir=out_dir,
        threads=threads,
    )


def _resolve_threads(flag_value: int | None, cfg: RunConfig) -> int:
    if flag_value is not None:
        threads = flag_value
    elif cfg.threads is not None:
        threads = cfg.threads
    elif THREADS_ENV in os.environ:
        text = os.environ[THREADS_ENV]
        try:
            threads = int(text)
        except ValueError:
            raise ConfigurationError(
                f"{THREADS_ENV}={text!r} is not an integer"
            ) from None
    else:
        threads = 1
    if threads < 1:
        raise ConfigurationError(f"thread count must be >= 1, got {threads}")
    return threads


def _prepare_out_dir(flag_value: str | None, cfg: RunConfig) -> str:
    out_dir = flag_value if flag_value is not None else (cfg.out_dir or ".")
    os.makedirs(out_dir, exist_ok=True)
    probe = os.path.join(out_dir, ".write-probe")
    with open(probe, "w"):
        pass
    os.remove(probe)
    return out_dir


def _write_json(path, payload: dict) -> None:
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True, allow_nan=False)
        handle.write("\n")


def _finite_or_none(value: float) -> float | None:
    v = float(value)
    return v if math.isfinite(v) else None


# ---------------------------------------------------------------------------
# check


def cmd_check(cfg: RunConfig, out_dir: str) -> int:
    grid = cfg.build_velocity_grid()
    path = os.path.join(out_dir, "quantities.json")
    try:
        b = cfg.build_boundary(grid)
        report = check_admissibility(b, cfg.solver.tau, grid)
    except (InadmissibleDataError, SingularWeightError) as exc:
        _write_json(path, {
            "admissible": False,
            "error": {"type": type(exc).__name__, "message": str(exc)},
            "tau": cfg.solver.tau,
        })
        print(f"wrote {path}")
        print(f"inadmissible: {exc}")
        return 1
    q = report.quantities
    payload = {
        "tau": q.tau,
        "quantities": {
            "a_u": q.a_u, "a_l": q.a_l, "a_s": q.a_s,
            "c_u": q.c_u, "c_l": q.c_l, "c_s": q.c_s,
            "gamma_l": q.gamma_l,
        },
        "conditions": {
            "integrability": {
                "passed": report.condition_integrable,
                "value": _finite_or_none(report.integrability_value),
                "divergence_ratio": None if report.divergence_ratio is None
                else _finite_or_none(report.divergence_ratio),
            },
            "transverse_momentum": {
                "passed": report.condition_momentum,
                "values": {k: float(v) for k, v in report.transverse_momentum.items()},
            },
            "flux_product": {
                "passed": report.condition_gamma,
                "gamma_l": q.gamma_l,
            },
        },
        "admissible": report.passed,
        "printed_constant_note": report.printed_constant_note,
    }
    _write_json(path, payload)
    print(f"wrote {path}")
    print("admissible" if report.passed else "inadmissible")
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# solve


def _omega_report_dict(rep) -> dict:
    d = dataclasses.asdict(rep)
    d["failing"] = rep.failing
    d["passed"] = rep.passed
    return d


def _write_profiles(path, f: DistributionField, nu: float, flux_table) -> None:
    moments = compute_moments_batch(f.values, f.vgrid, nu)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(PROFILE_COLUMNS)
        for k, m in enumerate(moments):
            th = m.Theta
            row = [
                f.sgrid.x[k], m.rho, m.U[0], m.U[1], m.U[2], m.T,
                th[0, 0], th[0, 1], th[0, 2], th[1, 1], th[1, 2], th[2, 2],
                flux_table.columns["mass"][k],
                flux_table.columns["mom1"][k],
                flux_table.columns["mom2"][k],
                flux_table.columns["mom3"][k],
                flux_table.columns["energy"][k],
            ]
            writer.writerow([f"{float(v):.17g}" for v in row])


def _dump_field(out_dir: str, f: DistributionField, spec: GridSpec) -> list[str]:
    bin_path = os.path.join(out_dir, "field.bin")
    f.values.tofile(bin_path)
    sidecar = {
        "path": "field.bin",
        "dtype": "float64",
        "order": "C",
        "shape": list(f.values.shape),
        "n_x": f.sgrid.n_x,
        "velocity_grid": {
            "counts": list(spec.counts),
            "v_max": spec.v_max,
            "eps_v1": spec.eps_v1,
            "rule": spec.rule,
            "v1_breaks": list(spec.v1_breaks),
        },
    }
    json_path = os.path.join(out_dir, "field.json")
    _write_json(json_path, sidecar)
    return [bin_path, json_path]


def cmd_solve(cfg: RunConfig, out_dir: str, threads: int, dump_field: bool) -> int:
    if cfg.n_x is None:
        raise ConfigurationError("solve requires 'n_x' in the config")
    grid = cfg.build_velocity_grid()
    b = cfg.build_boundary(grid)
    sg = SpatialGrid(cfg.n_x)
    q = theorem_quantities(b, cfg.solver.tau, grid)
    summary_path = os.path.join(out_dir, "summary.json")
    config_echo = {
        "tau": cfg.solver.tau, "kappa": cfg.solver.kappa, "nu": cfg.solver.nu,
        "tol": cfg.solver.tol, "max_iter": cfg.solver.max_iter,
        "omega_enforce": cfg.solver.omega_enforce, "n_x": cfg.n_x,
        "velocity_counts": list(cfg.grid_spec.counts),
    }
    try:
        f, rep = solve(
            cfg.solver, b, sg, grid,
            initial=cfg.initial, quantities=q, threads=threads,
        )
    except (TauTooSmallError, NonConvergenceError, InadmissibleDataError) as exc:
        _write_json(summary_path, {
            "converged": False,
            "error": {"type": type(exc).__name__, "message": str(exc)},
            "distances": [float(d) for d in getattr(exc, "distances", [])],
            "alphas": [float(a) for a in getattr(exc, "alphas", [])],
            "config": config_echo,
        })
        print(f"wrote {summary_path}")
        print(f"run failed: {exc}")
        return 1

    flux_table = flux_invariants(f, q)
    bounds = theorem_bounds_check(f, q)
    entropy = entropy_profile(f, cfg.solver.nu)

    profiles_path = os.path.join(out_dir, "profiles.csv")
    _write_profiles(profiles_path, f, cfg.solver.nu, flux_table)
    summary = {
        "converged": rep.converged,
        "iterations": rep.iterations,
        "distances": [float(d) for d in rep.distances],
        "alphas": [float(a) for a in rep.alphas],
        "initial_kind": rep.initial_kind,
        "mild_residual": float(rep.mild_residual),
        "wall_time": rep.wall_time,
        "omega": {
            "all_passed": all(r.passed for r in rep.omega_reports),
            "per_iterate": [r.passed for r in rep.omega_reports],
            "final": _omega_report_dict(rep.omega_reports[-1]),
        },
        "bounds": {
            "margins": bounds.margins,
            "slacks": bounds.slacks,
            "passed": bounds.passed,
        },
        "entropy_max": float(np.max(entropy)),
        "flux_drifts": flux_table.drifts,
        "config": config_echo,
    }
    _write_json(summary_path, summary)
    written = [profiles_path, summary_path]
    if dump_field:
        written.extend(_dump_field(out_dir, f, cfg.grid_spec))
    for path in written:
        print(f"wrote {path}")
    print(f"converged in {rep.iterations} iterations")
    return 0


# ---------------------------------------------------------------------------
# sweep


def cmd_sweep(cfg: RunConfig, out_dir: str, threads: int) -> int:
    if cfg.taus is None:
        raise ConfigurationError("sweep requires 'taus' in the config")
    grid = cfg.build_velocity_grid()
    b = cfg.build_boundary(grid)
    if cfg.n_x is None:
        raise ConfigurationError("sweep requires 'n_x' in the config")
    study = contraction_study(
        b, list(cfg.taus), cfg.solver.nu, SpatialGrid(cfg.n_x), grid,
        tol=cfg.solver.tol, max_iter=cfg.solver.max_iter, threads=threads,
    )
    csv_path = os.path.join(out_dir, "sweep.csv")
    write_sweep_csv(study, csv_path)
    checks_path = os.path.join(out_dir, "checks.json")
    payload = study_payload(study)
    payload["nu"] = cfg.solver.nu
    _write_json(checks_path, payload)
    print(f"wrote {csv_path}")
    print(f"wrote {checks_path}")
    n_ok = sum(r.converged for r in study.rows)
    print(f"{n_ok}/{len(study.rows)} rows converged")
    return 0


# ---------------------------------------------------------------------------
# selftest


def _selftest_invariants() -> list[tuple[str, bool, str]]:
    checks: list[tuple[str, bool, str]] = []
    rng = np.random.default_rng(20260823)

    vg_prod = build_grid(GridSpec(counts=(48, 24, 24)))
    rep = selfcheck(vg_prod)
    checks.append((
        "quadrature_selfcheck", rep.passed, f"worst rel error {rep.worst:.3e}"
    ))

    vg = build_grid(GridSpec(counts=(16, 10, 10), v1_breaks=(1.0, 2.0)))

    worst = 0.0
    for _ in range(5):
        u1 = rng.uniform(-0.4, 0.4, 3)
        u2 = rng.uniform(-0.4, 0.4, 3)
        t1, t2 = rng.uniform(0.6, 1.8, 2)
        row = (
            rng.uniform(0.5, 2.0) * np.exp(
                -((vg_prod.v1f - u1[0]) ** 2 + (vg_prod.v2f - u1[1]) ** 2
                  + (vg_prod.v3f - u1[2]) ** 2) / (2.0 * t1))
            + rng.uniform(0.5, 2.0) * np.exp(
                -((vg_prod.v1f - u2[0]) ** 2 + (vg_prod.v2f - u2[1]) ** 2
                  + (vg_prod.v3f - u2[2]) ** 2) / (2.0 * t2))
        )
        nu = float(rng.uniform(-0.25, 0.5))
        m = compute_moments(row, vg_prod, nu)
        m_back = compute_moments(evaluate(m, vg_prod), vg_prod, nu)
        worst = max(
            worst,
            abs(m_back.rho - m.rho) / m.rho,
            float(np.max(np.abs(m_back.momentum - m.momentum)))
            / (m.rho * (1.0 + float(np.max(np.abs(m.U))))),
            abs(m_back.energy - m.energy) / m.energy,
        )
    checks.append((
        "gaussian_moment_matching", worst <= 1e-6, f"worst rel error {worst:.3e}"
    ))

    row = np.exp(-0.5 * ((vg.v1f - 0.2) ** 2 + vg.v2f**2 + vg.v3f**2) / 1.3)
    m0 = compute_moments(row, vg, 0.0)
    gauss = evaluate(m0, vg)
    shift = (
        (vg.v1f - m0.U[0]) ** 2 + (vg.v2f - m0.U[1]) ** 2 + (vg.v3f - m0.U[2]) ** 2
    )
    maxwellian = m0.rho / (2.0 * math.pi * m0.T) ** 1.5 * np.exp(-shift / (2.0 * m0.T))
    collapse = float(np.max(np.abs(gauss - maxwellian))) / float(np.max(maxwellian))
    checks.append((
        "maxwellian_collapse", collapse <= 1e-13, f"scale-relative error {collapse:.3e}"
    ))

    trace_worst = 0.0
    for nu in (-0.49, -0.25, 0.3, 0.9):
        m = compute_moments(row, vg, nu)
        trace_worst = max(
            trace_worst, abs(float(np.trace(m.T_nu)) - 3.0 * m.T) / (3.0 * m.T)
        )
    checks.append((
        "trace_identity", trace_worst <= 1e-10, f"worst rel error {trace_worst:.3e}"
    ))

    b = remark4_family(1.0, 1.0, 1.0, 2.0)
    small = build_grid(GridSpec(counts=(8, 6, 6), v1_breaks=(1.0, 2.0)))
    scfg = SolverConfig.from_tau(50.0, 0.0)
    sg = SpatialGrid(9)
    f0 = initial_iterate(b, theorem_quantities(b, scfg.tau, small), sg, small)
    out = apply_phi(f0, b, scfg)
    n_neg = int(np.sum(out.values < 0.0))
    checks.append((
        "sweep_positivity", n_neg == 0, f"{n_neg} negative nodes"
    ))

    fields = [
        DistributionField(
            values=np.abs(rng.normal(size=(sg.n_x, small.n_nodes))) + 0.01,
            sgrid=sg, vgrid=small,
        )
        for _ in range(3)
    ]
    d_self = distance(fields[0], fields[0])
    d_fg = distance(fields[0], fields[1])
    d_gf = distance(fields[1], fields[0])
    d_fh = distance(fields[0], fields[2])
    d_gh = distance(fields[1], fields[2])
    axioms_ok = (
        d_self == 0.0 and d_fg == d_gf and d_fh <= d_fg + d_gh + 1e-12
    )
    checks.append((
        "distance_axioms", axioms_ok,
        f"d(f,f)={d_self}, symmetry gap {abs(d_fg - d_gf):.1e}, "
        f"triangle slack {d_fg + d_gh - d_fh:.3e}",
    ))

    fault = os.environ.get(SELFTEST_FAULT_ENV)
    if fault:
        name = "injected_fault" if fault == "1" else f"injected_fault:{fault}"
        checks.append((name, False, f"forced by {SELFTEST_FAULT_ENV} (test hook)"))
    return checks


def cmd_selftest() -> int:
    start = time.perf_counter()
    checks = _selftest_invariants()
    for name, passed, detail in checks:
        print(f"{'ok  ' if passed else 'FAIL'} {name}: {detail}")
    failed = [name for name, passed, _ in checks if not passed]
    elapsed = time.perf_counter() - start
    if failed:
        print(f"selftest failed in {elapsed:.1f}s: {', '.join(failed)}")
        return 1
    print(f"selftest passed in {elapsed:.1f}s ({len(checks)} invariants)")
    return 0


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esbgk-slab",
        description="Stationary slab solutions of the ellipsoidal-statistical "
        "BGK kinetic model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    specs = {
        "check": "audit inflow data admissibility and write quantities.json",
        "solve": "run the fixed-point solve and write profiles.csv + summary.json",
        "sweep": "solve across a tau list and write sweep.csv + checks.json",
        "selftest": "run the embedded invariant suite on built-in grids",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument(
            "--config",
            required=name != "selftest",
            help="path to the JSON run description",
        )
        p.add_argument("--out-dir", help="artifact directory (default: config out_dir or '.')")
        p.add_argument("--threads", type=int, help=f"worker threads (default: config, then ${THREADS_ENV}, then 1)")
        if name == "solve":
            p.add_argument(
                "--dump-field", action="store_true",
                help="also write the raw field as field.bin + field.json",
            )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            return cmd_selftest()
        cfg = load_run_config(args.config)
        threads = _resolve_threads(args.threads, cfg)
        out_dir = _prepare_out_dir(args.out_dir, cfg)
        if args.command == "check":
            return cmd_check(cfg, out_dir)
        if args.command == "solve":
            return cmd_solve(cfg, out_dir, threads, args.dump_field)
        return cmd_sweep(cfg, out_dir, threads)
    except (ConfigurationError, ShapeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return 2
    except SlabModelError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
