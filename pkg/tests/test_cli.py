"""Experiment runner: config parsing, artifacts, subcommands, exit codes."""
import csv
import json
from pathlib import Path

import numpy as np
import pytest

from qite_pde.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    ConfigError,
    TRAJECTORY_HEADER,
    load_config,
    main,
    run_experiment,
    sweep_domains,
    validate_hamiltonian,
)
from qite_pde.fd_operators import BoundaryCondition

ZERO = BoundaryCondition.ZERO
PERIODIC = BoundaryCondition.PERIODIC


def write_config(tmp_path: Path, **overrides) -> Path:
    data = {
        "grid": {"qubits": [4], "spacing": [0.1], "boundary": ["zero"]},
        "initial": {"kind": "square_wave"},
        "alpha": 0.8,
        "qite": {"domain_size": 4, "dt": 0.001, "steps": 30},
        "norm": {"correction_period": 10, "ground_state": "exact"},
        "snapshot_times": [0.0, 0.015, 0.03],
        "output_dir": "artifacts",
    }
    data.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return path


def read_rows(path: Path) -> list[dict]:
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


def test_run_writes_artifacts(tmp_path):
    cfg = load_config(write_config(tmp_path))
    summary = run_experiment(cfg)
    out = tmp_path / "artifacts"
    assert (out / "trajectory.csv").exists()
    assert (out / "snapshots.csv").exists()
    assert (out / "summary.json").exists()
    rows = read_rows(out / "trajectory.csv")
    assert len(rows) == 30
    assert list(rows[0]) == TRAJECTORY_HEADER
    assert all(row["schema_version"] == "1" for row in rows)
    assert summary["final_fidelity"] > 0.9999


def test_summary_recomputable_from_trajectory(tmp_path):
    cfg = load_config(write_config(tmp_path))
    summary = run_experiment(cfg)
    rows = read_rows(tmp_path / "artifacts" / "trajectory.csv")
    last = rows[-1]
    assert float(last["fidelity"]) == summary["final_fidelity"]
    assert float(last["mse"]) == summary["final_mse"]
    assert float(last["log10_norm_ratio"]) == summary["final_log10_ratio"]
    assert int(last["step"]) == 30


def test_reruns_are_bit_identical(tmp_path):
    cfg = load_config(write_config(tmp_path))
    run_experiment(cfg, tmp_path / "a")
    run_experiment(cfg, tmp_path / "b")
    for name in ("trajectory.csv", "snapshots.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_exact_only_mode_constant_fidelity(tmp_path):
    cfg = load_config(write_config(tmp_path, mode="exact_only"))
    run_experiment(cfg, tmp_path / "exact")
    rows = read_rows(tmp_path / "exact" / "trajectory.csv")
    for row in rows:
        assert float(row["fidelity"]) == pytest.approx(1.0, abs=1e-12)
        assert float(row["fit_residual"]) == 0.0


def test_snapshot_times_snap_to_step_boundaries(tmp_path):
    cfg = load_config(write_config(tmp_path, snapshot_times=[0.0, 0.0151, 0.03]))
    run_experiment(cfg, tmp_path / "snap")
    rows = read_rows(tmp_path / "snap" / "snapshots.csv")
    times = sorted({row["t"] for row in rows})
    # 0.0151 snaps to the nearest completed step, 0.015.
    assert times == ["0.0", "0.015", "0.03"]
    per_time = [row for row in rows if row["t"] == "0.0"]
    assert len(per_time) == 16  # one row per 1D grid point
    assert [r["axis_index_1"] for r in per_time] == [str(k) for k in range(16)]


def test_snapshot_initial_matches_samples(tmp_path):
    cfg = load_config(write_config(tmp_path))
    run_experiment(cfg, tmp_path / "snap0")
    rows = [r for r in read_rows(tmp_path / "snap0" / "snapshots.csv") if r["t"] == "0.0"]
    values = np.array([float(r["psi_qite"]) for r in rows])
    expected = np.zeros(16)
    expected[4:12] = 1.0
    assert np.abs(values - expected).max() < 1e-12


def test_2d_snapshot_layout(tmp_path):
    path = write_config(
        tmp_path,
        grid={"qubits": [2, 2], "spacing": [0.1, 0.1], "boundary": ["zero", "periodic"]},
        initial={"kind": "product",
                 "x": {"kind": "inverted_parabola", "max_height": 1.5},
                 "y": {"kind": "triangle_wave", "height": 1.0, "offset": 1.0}},
        qite={"domain_size": 2, "dt": 0.001, "steps": 5},
        snapshot_times=[0.005],
    )
    cfg = load_config(path)
    run_experiment(cfg, tmp_path / "snap2d")
    rows = read_rows(tmp_path / "snap2d" / "snapshots.csv")
    assert list(rows[0]) == ["t", "axis_index_1", "axis_index_2", "x", "y", "f_exact", "psi_qite"]
    assert len(rows) == 16
    assert rows[7]["axis_index_1"] == "1" and rows[7]["axis_index_2"] == "3"


def test_samples_initial_condition_from_csv(tmp_path):
    sample_file = tmp_path / "field.csv"
    sample_file.write_text("value\n" + "\n".join(str(v) for v in range(1, 17)) + "\n")
    path = write_config(
        tmp_path,
        initial={"kind": "samples", "path": "field.csv", "column": "value"},
        qite={"domain_size": 4, "dt": 0.001, "steps": 2},
        snapshot_times=[0.0],
    )
    cfg = load_config(path)
    run_experiment(cfg, tmp_path / "samples_run")
    rows = [r for r in read_rows(tmp_path / "samples_run" / "snapshots.csv") if r["t"] == "0.0"]
    values = [float(r["psi_qite"]) for r in rows]
    assert values == pytest.approx(list(range(1, 17)), abs=1e-10)


def test_sweep_single_domain_equals_run(tmp_path):
    cfg = load_config(write_config(tmp_path))
    run_experiment(cfg, tmp_path / "single")
    sweep_domains(cfg, [4], tmp_path / "swept")
    assert (
        (tmp_path / "single" / "trajectory.csv").read_bytes()
        == (tmp_path / "swept" / "D4" / "trajectory.csv").read_bytes()
    )


def test_sweep_writes_comparison_table(tmp_path):
    cfg = load_config(write_config(tmp_path))
    report = sweep_domains(cfg, [2, 4], tmp_path / "swept")
    assert sorted(report["domains"]) == ["2", "4"]
    rows = read_rows(tmp_path / "swept" / "sweep.csv")
    assert list(rows[0]) == ["step", "t", "fidelity_D2", "mse_D2", "fidelity_D4", "mse_D4"]
    assert len(rows) == 30
    assert float(rows[-1]["fidelity_D4"]) >= float(rows[-1]["fidelity_D2"]) - 1e-9


def test_validate_hamiltonian_values():
    assert validate_hamiltonian(6, (ZERO,)) == 0.0
    assert validate_hamiltonian(5, (PERIODIC,)) == 0.0
    assert validate_hamiltonian(6, (ZERO, PERIODIC), dimension=2) == 0.0


def test_cli_validate_exit_codes(capsys):
    assert main(["validate-hamiltonian", "--qubits", "6", "--bc", "zero"]) == EXIT_OK
    assert main(["validate-hamiltonian", "--qubits", "6", "--bc", "zero,periodic",
                 "--dim", "2"]) == EXIT_OK
    # The 1-qubit periodic stencil is rejected as unsupported.
    assert main(["validate-hamiltonian", "--qubits", "1", "--bc", "periodic"]) == EXIT_CONFIG


def test_cli_run_and_config_errors(tmp_path, capsys):
    path = write_config(
        tmp_path,
        qite={"domain_size": 4, "dt": 0.001, "steps": 5},
        snapshot_times=[0.0, 0.005],
    )
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "cli_out")]) == EXIT_OK
    assert (tmp_path / "cli_out" / "summary.json").exists()

    missing = tmp_path / "nope.json"
    assert main(["run", "--config", str(missing)]) == EXIT_CONFIG

    bad = tmp_path / "bad.json"
    bad.write_text('{"grid": {}}')
    assert main(["run", "--config", str(bad)]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_cli_ground_state(tmp_path, capsys):
    path = write_config(tmp_path)
    assert main(["ground-state", "--config", str(path)]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["source"] == "exact"
    assert payload["eigenvalue"] == pytest.approx(
        80.0 * (2.0 - 2.0 * np.cos(np.pi / 17.0)), abs=1e-10
    )
    assert payload["overlap_with_initial"] > 0.5


def test_config_validation_messages(tmp_path):
    with pytest.raises(ConfigError, match="alpha"):
        load_config(write_config(tmp_path, alpha=-1.0))
    with pytest.raises(ConfigError, match="snapshot_times"):
        load_config(write_config(tmp_path, snapshot_times=[99.0]))
    with pytest.raises(ConfigError, match="mode"):
        load_config(write_config(tmp_path, mode="warp"))
    with pytest.raises(ConfigError, match="boundary"):
        load_config(write_config(
            tmp_path, grid={"qubits": [4], "spacing": [0.1], "boundary": ["open"]}
        ))
