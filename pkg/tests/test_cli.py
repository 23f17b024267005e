"""Config ingestion, artifact emission, and exit codes of the command line."""

from __future__ import annotations

import csv
import json
import os
import time

import numpy as np
import pytest

from esbgk_slab.cli import (
    PROFILE_COLUMNS,
    SELFTEST_FAULT_ENV,
    THREADS_ENV,
    load_run_config,
    main,
)
from esbgk_slab.errors import ConfigurationError
from esbgk_slab.vgrid import GridSpec, build_grid
from esbgk_slab.boundary import write_tabulated_csv


def write_config(tmp_path, name="run.json", **overrides):
    cfg = {
        "boundary": {"family": "remark4", "params": [1.0, 1.0, 1.0, 2.0]},
        "nu": 0.0,
        "tau": 100.0,
        "tol": 1e-10,
        "max_iter": 200,
        "n_x": 9,
        "velocity_grid": {"counts": [8, 6, 6]},
    }
    for key, value in overrides.items():
        if value is None:
            cfg.pop(key, None)
        else:
            cfg[key] = value
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_load_run_config_roundtrip(tmp_path):
    path = write_config(tmp_path, taus=[10.0, 50.0], out_dir="artifacts", threads=2)
    cfg = load_run_config(path)
    assert cfg.solver.tau == 100.0
    assert cfg.solver.nu == 0.0
    assert cfg.solver.kappa == 100.0
    assert cfg.grid_spec.counts == (8, 6, 6)
    assert cfg.grid_spec.v1_breaks == (1.0, 2.0)
    assert cfg.n_x == 9
    assert cfg.taus == (10.0, 50.0)
    assert cfg.out_dir == "artifacts"
    assert cfg.threads == 2


def test_load_run_config_kappa_form(tmp_path):
    path = write_config(tmp_path, tau=None, kappa=200.0, nu=0.5)
    cfg = load_run_config(path)
    assert cfg.solver.kappa == 200.0
    assert cfg.solver.tau == 100.0


def test_load_run_config_rejects_unknown_keys(tmp_path):
    with pytest.raises(ConfigurationError, match="unknown key 'bogus'"):
        load_run_config(write_config(tmp_path, bogus=1))
    with pytest.raises(ConfigurationError, match="velocity_grid"):
        load_run_config(
            write_config(tmp_path, velocity_grid={"counts": [8, 6, 6], "nodes": 3})
        )
    with pytest.raises(ConfigurationError, match="boundary"):
        load_run_config(
            write_config(
                tmp_path,
                boundary={"family": "remark4", "params": [1, 1, 1, 2], "x": 0},
            )
        )


def test_load_run_config_requires_kappa_xor_tau(tmp_path):
    with pytest.raises(ConfigurationError, match="exactly one of 'kappa' or 'tau'"):
        load_run_config(write_config(tmp_path, kappa=50.0))
    with pytest.raises(ConfigurationError, match="exactly one of 'kappa' or 'tau'"):
        load_run_config(write_config(tmp_path, tau=None))


@pytest.mark.parametrize(
    "overrides",
    [
        {"nu": "zero"},
        {"n_x": 9.5},
        {"taus": 10.0},
        {"boundary": {"family": "remark4", "params": [1, 1, 1]}},
        {"boundary": {"family": "unknown", "params": [1, 1, 1, 2]}},
        {"boundary": {}},
        {"velocity_grid": {"counts": [8, 6]}},
        {"threads": True},
    ],
)
def test_load_run_config_rejects_bad_values(tmp_path, overrides):
    with pytest.raises(ConfigurationError):
        load_run_config(write_config(tmp_path, **overrides))


def test_malformed_json_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["check", "--config", str(path)]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_missing_config_file_exits_2(tmp_path, capsys):
    assert main(["check", "--config", str(tmp_path / "absent.json")]) == 2
    assert "file error" in capsys.readouterr().err


def test_check_admissible_family(tmp_path):
    out = tmp_path / "out"
    code = main([
        "check", "--config", write_config(tmp_path), "--out-dir", str(out)
    ])
    assert code == 0
    payload = json.loads((out / "quantities.json").read_text())
    assert payload["admissible"] is True
    assert payload["tau"] == 100.0
    assert set(payload["quantities"]) == {
        "a_u", "a_l", "a_s", "c_u", "c_l", "c_s", "gamma_l"
    }
    assert payload["quantities"]["gamma_l"] > 0.0
    conditions = payload["conditions"]
    assert conditions["integrability"]["passed"] is True
    assert conditions["transverse_momentum"]["passed"] is True
    assert conditions["flux_product"]["passed"] is True
    assert "printed_constant_note" in payload


def test_check_half_maxwellian_tabulated_exits_1(tmp_path):
    # eps_v1 > 0 clusters nodes at the excision scale, which is what lets the
    # nested probe see the 1/|v1| concentration of un-banded Maxwellian data
    grid = build_grid(GridSpec(counts=(24, 16, 16), eps_v1=0.05))
    values = np.exp(-0.5 * grid.vsqf)
    csv_path = tmp_path / "half.csv"
    write_tabulated_csv(csv_path, grid, values)
    config = write_config(
        tmp_path,
        boundary={"tabulated": "half.csv", "vanish_band": 0.0},
        velocity_grid={"counts": [24, 16, 16], "eps_v1": 0.05},
    )
    out = tmp_path / "out"
    assert main(["check", "--config", config, "--out-dir", str(out)]) == 1
    payload = json.loads((out / "quantities.json").read_text())
    assert payload["admissible"] is False
    assert payload["conditions"]["integrability"]["passed"] is False
    assert payload["conditions"]["integrability"]["divergence_ratio"] > 1.05


def test_check_undeclared_band_recorded_exit_1(tmp_path):
    grid = build_grid(GridSpec(counts=(8, 6, 6)))
    values = np.where(grid.v1f > 0.0, np.exp(-0.5 * grid.vsqf), 0.0)
    write_tabulated_csv(tmp_path / "half.csv", grid, values)
    config = write_config(
        tmp_path,
        boundary={"tabulated": "half.csv"},
        velocity_grid={"counts": [8, 6, 6]},
    )
    out = tmp_path / "out"
    assert main(["check", "--config", config, "--out-dir", str(out)]) == 1
    payload = json.loads((out / "quantities.json").read_text())
    assert payload["admissible"] is False
    assert "vanishing band" in payload["error"]["message"]


def test_check_banded_tabulated_relative_path(tmp_path, monkeypatch):
    grid = build_grid(GridSpec(counts=(8, 6, 6), v1_breaks=(1.0, 2.0)))
    values = np.where(np.abs(grid.v1f) >= 1.0, np.exp(-0.5 * grid.vsqf), 0.0)
    write_tabulated_csv(tmp_path / "band.csv", grid, values)
    config = write_config(
        tmp_path,
        boundary={"tabulated": "band.csv", "vanish_band": 1.0},
        velocity_grid={"counts": [8, 6, 6], "v1_breaks": [1.0, 2.0]},
    )
    out = tmp_path / "out"
    monkeypatch.chdir(tmp_path.parent)
    assert main(["check", "--config", config, "--out-dir", str(out)]) == 0


def test_solve_writes_profiles_and_summary(tmp_path):
    out = tmp_path / "out"
    code = main([
        "solve", "--config", write_config(tmp_path), "--out-dir", str(out)
    ])
    assert code == 0
    with open(out / "profiles.csv", newline="") as handle:
        rows = list(csv.reader(handle))
    assert tuple(rows[0]) == PROFILE_COLUMNS
    assert len(rows) == 1 + 9
    xs = [float(r[0]) for r in rows[1:]]
    assert xs == pytest.approx(np.linspace(0.0, 1.0, 9).tolist(), abs=0.0)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["converged"] is True
    assert summary["iterations"] > 0
    assert summary["omega"]["all_passed"] is True
    assert summary["bounds"]["passed"] is True
    assert summary["entropy_max"] <= 1e-8
    assert summary["mild_residual"] <= 1e-8
    assert summary["config"]["n_x"] == 9
    assert len(summary["distances"]) == summary["iterations"]
    assert not (out / "field.bin").exists()


def test_solve_dump_field_roundtrip(tmp_path):
    out = tmp_path / "out"
    code = main([
        "solve", "--config", write_config(tmp_path),
        "--out-dir", str(out), "--dump-field",
    ])
    assert code == 0
    sidecar = json.loads((out / "field.json").read_text())
    assert sidecar["dtype"] == "float64"
    assert sidecar["order"] == "C"
    n_x, n_nodes = sidecar["shape"]
    assert n_x == 9
    raw = np.fromfile(out / "field.bin", dtype=np.float64)
    assert raw.size == n_x * n_nodes
    field = raw.reshape(n_x, n_nodes)
    assert np.all(np.isfinite(field))
    assert np.all(field >= 0.0)


def test_solve_small_tau_failure_exit_1(tmp_path, capsys):
    out = tmp_path / "out"
    code = main([
        "solve", "--config", write_config(tmp_path, tau=2.0),
        "--out-dir", str(out),
    ])
    assert code == 1
    summary = json.loads((out / "summary.json").read_text())
    assert summary["converged"] is False
    assert summary["error"]["type"] in {"TauTooSmallError", "InadmissibleDataError"}
    assert summary["error"]["message"]
    assert not (out / "profiles.csv").exists()


def test_solve_nonconvergence_exit_1(tmp_path):
    out = tmp_path / "out"
    code = main([
        "solve",
        "--config", write_config(tmp_path, tol=1e-16, max_iter=3),
        "--out-dir", str(out),
    ])
    assert code == 1
    summary = json.loads((out / "summary.json").read_text())
    assert summary["error"]["type"] == "NonConvergenceError"
    assert len(summary["distances"]) == 3


def test_solve_profiles_identical_across_threads(tmp_path):
    config = write_config(tmp_path)
    outs = []
    for threads in ("1", "3"):
        out = tmp_path / f"out{threads}"
        assert main([
            "solve", "--config", config, "--out-dir", str(out),
            "--threads", threads,
        ]) == 0
        outs.append((out / "profiles.csv").read_bytes())
    assert outs[0] == outs[1]


def test_sweep_writes_csv_and_checks(tmp_path):
    config = write_config(tmp_path, taus=[10.0, 50.0, 200.0])
    out = tmp_path / "out"
    assert main(["sweep", "--config", config, "--out-dir", str(out)]) == 0
    with open(out / "sweep.csv", newline="") as handle:
        rows = list(csv.reader(handle))
    assert len(rows) == 4
    assert rows[0][0] == "tau"
    checks = json.loads((out / "checks.json").read_text())
    assert len(checks["rows"]) == 3
    assert checks["nu"] == 0.0
    assert checks["fit_c"] > 0.0
    assert checks["alpha_decreasing"] is True


def test_sweep_identical_across_threads(tmp_path):
    config = write_config(tmp_path, taus=[10.0, 50.0, 200.0])
    blobs = []
    for threads in ("1", "4"):
        out = tmp_path / f"out{threads}"
        assert main([
            "sweep", "--config", config, "--out-dir", str(out),
            "--threads", threads,
        ]) == 0
        blobs.append((
            (out / "sweep.csv").read_bytes(),
            (out / "checks.json").read_bytes(),
        ))
    assert blobs[0] == blobs[1]


def test_sweep_empty_taus_exits_2(tmp_path, capsys):
    config = write_config(tmp_path, taus=[])
    assert main(["sweep", "--config", config, "--out-dir", str(tmp_path / "o")]) == 2
    assert "empty" in capsys.readouterr().err


def test_sweep_missing_taus_exits_2(tmp_path, capsys):
    assert main([
        "sweep", "--config", write_config(tmp_path),
        "--out-dir", str(tmp_path / "o"),
    ]) == 2
    assert "taus" in capsys.readouterr().err


def test_out_dir_not_a_directory_exits_2(tmp_path, capsys):
    blocker = tmp_path / "blocker.txt"
    blocker.write_text("file")
    code = main([
        "check", "--config", write_config(tmp_path),
        "--out-dir", str(blocker / "sub"),
    ])
    assert code == 2
    assert "file error" in capsys.readouterr().err


def test_threads_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "2")
    out = tmp_path / "out"
    assert main([
        "solve", "--config", write_config(tmp_path), "--out-dir", str(out)
    ]) == 0
    monkeypatch.setenv(THREADS_ENV, "soon")
    assert main([
        "solve", "--config", write_config(tmp_path), "--out-dir", str(out)
    ]) == 2


def test_threads_must_be_positive(tmp_path, capsys):
    assert main([
        "solve", "--config", write_config(tmp_path),
        "--out-dir", str(tmp_path / "o"), "--threads", "0",
    ]) == 2
    assert ">= 1" in capsys.readouterr().err


def test_solve_honors_initial_and_enforce_keys(tmp_path):
    out = tmp_path / "out"
    code = main([
        "solve",
        "--config", write_config(
            tmp_path, initial="attenuated", omega_enforce="warn"
        ),
        "--out-dir", str(out),
    ])
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["initial_kind"] == "attenuated"


def test_selftest_passes_within_budget(capsys):
    start = time.perf_counter()
    assert main(["selftest"]) == 0
    assert time.perf_counter() - start < 30.0
    out = capsys.readouterr().out
    assert "selftest passed" in out
    assert out.count("ok  ") == 6


def test_selftest_fault_hook_exits_1(monkeypatch, capsys):
    monkeypatch.setenv(SELFTEST_FAULT_ENV, "quadrature_selfcheck")
    assert main(["selftest"]) == 1
    out = capsys.readouterr().out
    assert "injected_fault:quadrature_selfcheck" in out
    assert "selftest failed" in out
