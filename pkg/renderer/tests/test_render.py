"""Renderer tests: synthetic schema-conformant inputs plus a real run."""
import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qite_figures.interpolate import infer_boundary, periodic_curve, sine_curve
from qite_figures.render import (
    FigureKind,
    FigureSpec,
    SchemaError,
    main,
    render,
)

TRAJECTORY_HEADER = (
    "schema_version,step,t,fidelity,mse,log10_norm_ratio,c_prime,C_psi,C_f,fit_residual"
)


def write_trajectory(path: Path, steps=40, version=1):
    rows = [TRAJECTORY_HEADER]
    c_psi = 1.0
    for k in range(1, steps + 1):
        t = k * 1e-3
        c_psi *= 0.995
        rows.append(
            f"{version},{k},{t},{1.0 - 1e-6 * k},{1e-9 * k},{0.001 * np.sin(k / 5.0)},"
            f"0.995,{c_psi},{c_psi * 1.01},{1e-7}"
        )
    path.write_text("\n".join(rows) + "\n")
    return path


def write_snapshots_1d(path: Path, n=16, periodic=False):
    h = 0.1
    origin = 0.0 if periodic else h
    xs = origin + h * np.arange(n)
    length = n * h if periodic else (n + 1) * h
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["t", "axis_index_1", "x", "f_exact", "psi_qite"])
        for t in (0.0, 0.2):
            values = np.sin(np.pi * xs / length) * np.exp(-t)
            for k in range(n):
                writer.writerow([t, k, xs[k], values[k], values[k] * 1.001])
    return path


def write_snapshots_2d(path: Path, n=8):
    h = 0.1
    xs = h * (1 + np.arange(n))
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["t", "axis_index_1", "axis_index_2", "x", "y", "f_exact", "psi_qite"])
        for t in (0.0, 0.1):
            for k1 in range(n):
                for k2 in range(n):
                    value = np.exp(-t) * (k1 + 1) * (k2 + 1) / n**2
                    writer.writerow([t, k1, k2, xs[k1], xs[k2], value, value])
    return path


def test_norm_ratio_figure(tmp_path):
    traj = write_trajectory(tmp_path / "trajectory.csv")
    out = tmp_path / "norm.png"
    render(FigureSpec(FigureKind.NORM_RATIO, (traj,), out))
    assert out.stat().st_size > 0


def test_metrics_figure_multiple_inputs(tmp_path):
    (tmp_path / "D2").mkdir()
    (tmp_path / "D6").mkdir()
    a = write_trajectory(tmp_path / "D2" / "trajectory.csv")
    b = write_trajectory(tmp_path / "D6" / "trajectory.csv")
    out = tmp_path / "metrics.png"
    render(FigureSpec(FigureKind.METRICS, (a, b), out))
    assert out.stat().st_size > 0


def test_snapshots_figure_both_boundaries(tmp_path):
    for periodic in (False, True):
        snaps = write_snapshots_1d(tmp_path / f"snap_{periodic}.csv", periodic=periodic)
        out = tmp_path / f"snap_{periodic}.png"
        render(FigureSpec(FigureKind.SNAPSHOTS_1D, (snaps,), out))
        assert out.stat().st_size > 0


def test_heatmap_figure(tmp_path):
    snaps = write_snapshots_2d(tmp_path / "snap2d.csv")
    out = tmp_path / "heat.png"
    render(FigureSpec(FigureKind.HEATMAP_2D, (snaps,), out))
    assert out.stat().st_size > 0


def test_rerender_is_byte_identical(tmp_path):
    traj = write_trajectory(tmp_path / "trajectory.csv")
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    render(FigureSpec(FigureKind.NORM_RATIO, (traj,), a))
    render(FigureSpec(FigureKind.NORM_RATIO, (traj,), b))
    assert a.read_bytes() == b.read_bytes()


def test_schema_mismatch_names_column(tmp_path):
    traj = write_trajectory(tmp_path / "trajectory.csv")
    content = traj.read_text().replace("log10_norm_ratio", "log_ratio")
    traj.write_text(content)
    with pytest.raises(SchemaError, match="log10_norm_ratio"):
        render(FigureSpec(FigureKind.NORM_RATIO, (traj,), tmp_path / "x.png"))
    assert not (tmp_path / "x.png").exists()


def test_schema_version_mismatch(tmp_path):
    traj = write_trajectory(tmp_path / "trajectory.csv", version=9)
    with pytest.raises(SchemaError, match="schema_version"):
        render(FigureSpec(FigureKind.NORM_RATIO, (traj,), tmp_path / "x.png"))


def test_empty_trajectory_is_error(tmp_path):
    traj = tmp_path / "trajectory.csv"
    traj.write_text(TRAJECTORY_HEADER + "\n")
    with pytest.raises(SchemaError, match="no data rows"):
        render(FigureSpec(FigureKind.NORM_RATIO, (traj,), tmp_path / "x.png"))
    assert not (tmp_path / "x.png").exists()


def test_kind_and_dimension_mismatch(tmp_path):
    snaps_2d = write_snapshots_2d(tmp_path / "snap2d.csv")
    with pytest.raises(SchemaError, match="heatmap-2d"):
        render(FigureSpec(FigureKind.SNAPSHOTS_1D, (snaps_2d,), tmp_path / "x.png"))
    snaps_1d = write_snapshots_1d(tmp_path / "snap1d.csv")
    with pytest.raises(SchemaError, match="snapshots-1d"):
        render(FigureSpec(FigureKind.HEATMAP_2D, (snaps_1d,), tmp_path / "x.png"))


def test_cli_exit_codes(tmp_path, capsys):
    traj = write_trajectory(tmp_path / "trajectory.csv")
    out = tmp_path / "cli.png"
    assert main(["--kind", "norm-ratio", "--in", str(traj), "--out", str(out)]) == 0
    assert out.exists()
    missing = tmp_path / "nope.csv"
    assert main(["--kind", "norm-ratio", "--in", str(missing), "--out", str(out)]) == 1
    assert "render error" in capsys.readouterr().err


def test_interpolation_passes_through_samples():
    h = 0.1
    n = 16
    xs = h * (1 + np.arange(n))
    length = (n + 1) * h
    values = np.sin(2 * np.pi * xs / length)
    fine_x, fine = sine_curve(xs, values, points=2 * (n + 1) * 8 + 1)
    for x, v in zip(xs, values):
        nearest = np.argmin(np.abs(fine_x - x))
        assert abs(fine[nearest] - v) < 1e-9

    xs_p = h * np.arange(n)
    values_p = 1.0 + np.cos(2 * np.pi * np.arange(n) / n)
    fine_xp, fine_p = periodic_curve(xs_p, values_p, points=n * 8)
    for x, v in zip(xs_p, values_p):
        nearest = np.argmin(np.abs(fine_xp - x))
        assert abs(fine_p[nearest] - v) < 1e-9


def test_boundary_inference():
    h = 0.25
    assert infer_boundary(h * (1 + np.arange(8))) == "zero"
    assert infer_boundary(h * np.arange(8)) == "periodic"


# --- end-to-end: a real benchmark run rendered into all four kinds -------

def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "qite_pde.cli", *args],
        cwd=cwd, capture_output=True, text=True,
    )


@pytest.fixture(scope="module")
def benchmark_artifacts(tmp_path_factory):
    pytest.importorskip("qite_pde")
    root = tmp_path_factory.mktemp("bench")
    config_1d = {
        "grid": {"qubits": [6], "spacing": [0.1], "boundary": ["zero"]},
        "initial": {"kind": "square_wave"},
        "alpha": 0.8,
        "qite": {"domain_size": 6, "dt": 0.001, "steps": 150},
        "norm": {"correction_period": 10, "ground_state": "exact"},
        "snapshot_times": [0.0, 0.05, 0.15],
        "output_dir": "run1d",
    }
    config_2d = {
        "grid": {"qubits": [3, 3], "spacing": [0.1, 0.1], "boundary": ["zero", "zero"]},
        "initial": {"kind": "square_wave"},
        "alpha": 0.8,
        "qite": {"domain_size": 3, "dt": 0.001, "steps": 60},
        "norm": {"correction_period": 10, "ground_state": "exact"},
        "snapshot_times": [0.0, 0.06],
        "output_dir": "run2d",
    }
    (root / "c1.json").write_text(json.dumps(config_1d))
    (root / "c2.json").write_text(json.dumps(config_2d))
    for name in ("c1.json", "c2.json"):
        result = run_cli(["run", "--config", name], cwd=root)
        assert result.returncode == 0, result.stderr
    return root


def test_all_kinds_from_real_run(benchmark_artifacts, tmp_path):
    root = benchmark_artifacts
    jobs = [
        ("norm-ratio", [root / "run1d" / "trajectory.csv"]),
        ("metrics", [root / "run1d" / "trajectory.csv"]),
        ("snapshots-1d", [root / "run1d" / "snapshots.csv"]),
        ("heatmap-2d", [root / "run2d" / "snapshots.csv"]),
    ]
    for kind, inputs in jobs:
        first = tmp_path / f"{kind}.png"
        second = tmp_path / f"{kind}_again.png"
        for out in (first, second):
            code = main(["--kind", kind, "--in", *map(str, inputs), "--out", str(out)])
            assert code == 0, kind
            assert out.stat().st_size > 0
        assert first.read_bytes() == second.read_bytes(), kind
