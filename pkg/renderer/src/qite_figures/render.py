"""Render run artifacts into figures.

Four figure kinds cover the standard panels: ``norm-ratio`` traces of
log10 r(t), ``snapshots-1d`` sample dots with smooth interpolation,
``heatmap-2d`` panel grids sharing one colour bar, and ``metrics``
fidelity/MSE against time.  Inputs are the runner's ``trajectory.csv``
and ``snapshots.csv``; files are validated against the schema they
declare before anything is drawn, and rendering the same inputs twice
produces byte-identical images.
"""
from __future__ import annotations

import argparse
import enum
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from .interpolate import infer_boundary, smooth_curve

SUPPORTED_SCHEMA = 1

TRAJECTORY_COLUMNS = [
    "schema_version", "step", "t", "fidelity", "mse", "log10_norm_ratio",
    "c_prime", "C_psi", "C_f", "fit_residual",
]
SNAPSHOT_1D_COLUMNS = ["t", "axis_index_1", "x", "f_exact", "psi_qite"]
SNAPSHOT_2D_COLUMNS = ["t", "axis_index_1", "axis_index_2", "x", "y", "f_exact", "psi_qite"]

FIGURE_DPI = 130


class SchemaError(ValueError):
    """An input file does not match the expected schema."""


class FigureKind(enum.Enum):
    NORM_RATIO = "norm-ratio"
    SNAPSHOTS_1D = "snapshots-1d"
    HEATMAP_2D = "heatmap-2d"
    METRICS = "metrics"


@dataclass(frozen=True)
class FigureSpec:
    kind: FigureKind
    inputs: tuple[Path, ...]
    output: Path
    boundary: str = "auto"      # zero | periodic | auto (snapshots-1d only)


def _check_columns(frame: pd.DataFrame, expected: list[str], path: Path) -> None:
    for column in expected:
        if column not in frame.columns:
            raise SchemaError(f"{path}: missing column {column!r}")
    extra = [c for c in frame.columns if c not in expected]
    if extra:
        raise SchemaError(f"{path}: unexpected column {extra[0]!r}")


def load_trajectory(path: Path) -> pd.DataFrame:
    frame = pd.read_csv(path)
    _check_columns(frame, TRAJECTORY_COLUMNS, path)
    if frame.empty:
        raise SchemaError(f"{path}: trajectory has no data rows")
    versions = set(frame["schema_version"].astype(int))
    if versions != {SUPPORTED_SCHEMA}:
        raise SchemaError(
            f"{path}: column 'schema_version' declares {sorted(versions)}, "
            f"supported is {SUPPORTED_SCHEMA}"
        )
    return frame


def load_snapshots(path: Path) -> tuple[pd.DataFrame, bool]:
    frame = pd.read_csv(path)
    two_d = "axis_index_2" in frame.columns
    _check_columns(frame, SNAPSHOT_2D_COLUMNS if two_d else SNAPSHOT_1D_COLUMNS, path)
    if frame.empty:
        raise SchemaError(f"{path}: snapshots file has no data rows")
    return frame, two_d


def _label(path: Path) -> str:
    return path.resolve().parent.name or path.stem


def _render_norm_ratio(spec: FigureSpec) -> plt.Figure:
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for path in spec.inputs:
        frame = load_trajectory(path)
        ax.plot(frame["t"], frame["log10_norm_ratio"], lw=1.2, label=_label(path))
    ax.axhline(0.0, color="0.6", lw=0.8, ls=":")
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\log_{10} r(t)$")
    ax.set_title("reconstructed / true norm ratio")
    ax.legend(loc="best", fontsize=8)
    return fig


def _render_metrics(spec: FigureSpec) -> plt.Figure:
    fig, (ax_f, ax_m) = plt.subplots(2, 1, figsize=(7.0, 5.6), sharex=True)
    for path in spec.inputs:
        frame = load_trajectory(path)
        label = _label(path)
        ax_f.plot(frame["t"], frame["fidelity"], lw=1.2, label=label)
        ax_m.semilogy(frame["t"], np.clip(frame["mse"], 1e-18, None), lw=1.2, label=label)
    ax_f.set_ylabel("fidelity")
    ax_f.legend(loc="best", fontsize=8)
    ax_m.set_ylabel("mean squared error")
    ax_m.set_xlabel("t")
    fig.align_ylabels()
    return fig


def _render_snapshots_1d(spec: FigureSpec) -> plt.Figure:
    if len(spec.inputs) != 1:
        raise SchemaError("snapshots-1d takes exactly one snapshots.csv")
    frame, two_d = load_snapshots(spec.inputs[0])
    if two_d:
        raise SchemaError(f"{spec.inputs[0]}: 2D snapshots; use heatmap-2d")
    times = sorted(frame["t"].unique())
    colors = plt.cm.viridis(np.linspace(0.15, 0.9, len(times)))
    fig, (ax_sim, ax_ref) = plt.subplots(1, 2, figsize=(9.6, 4.0), sharey=True)
    for ax, column, title in ((ax_sim, "psi_qite", "simulated"), (ax_ref, "f_exact", "reference")):
        for color, t in zip(colors, times):
            block = frame[frame["t"] == t].sort_values("axis_index_1")
            x = block["x"].to_numpy()
            values = block[column].to_numpy()
            bc = spec.boundary if spec.boundary != "auto" else infer_boundary(x)
            fine_x, fine = smooth_curve(x, values, bc)
            ax.plot(fine_x, fine, color=color, lw=1.0)
            ax.plot(x, values, "o", color=color, ms=2.6, label=f"t={t:g}")
        ax.set_title(title)
        ax.set_xlabel("x")
    ax_sim.set_ylabel("field value")
    ax_sim.legend(loc="best", fontsize=7)
    return fig


def _render_heatmap_2d(spec: FigureSpec) -> plt.Figure:
    if len(spec.inputs) != 1:
        raise SchemaError("heatmap-2d takes exactly one snapshots.csv")
    frame, two_d = load_snapshots(spec.inputs[0])
    if not two_d:
        raise SchemaError(f"{spec.inputs[0]}: 1D snapshots; use snapshots-1d")
    times = sorted(frame["t"].unique())
    fields = {}
    for t in times:
        block = frame[frame["t"] == t]
        n1 = int(block["axis_index_1"].max()) + 1
        n2 = int(block["axis_index_2"].max()) + 1
        for column in ("psi_qite", "f_exact"):
            grid = np.full((n1, n2), np.nan)
            grid[block["axis_index_1"], block["axis_index_2"]] = block[column]
            fields[(t, column)] = grid
    vmin = min(g.min() for g in fields.values())
    vmax = max(g.max() for g in fields.values())
    fig, axes = plt.subplots(
        2, len(times), figsize=(2.6 * len(times) + 1.2, 5.4), squeeze=False
    )
    image = None
    for col, t in enumerate(times):
        for row, (column, title) in enumerate((("psi_qite", "simulated"), ("f_exact", "reference"))):
            ax = axes[row][col]
            image = ax.imshow(
                fields[(t, column)].T, origin="lower", vmin=vmin, vmax=vmax,
                cmap="viridis", aspect="equal",
            )
            ax.set_xticks(())
            ax.set_yticks(())
            if row == 0:
                ax.set_title(f"t={t:g}", fontsize=9)
            if col == 0:
                ax.set_ylabel(title)
    fig.colorbar(image, ax=[axes[0][-1], axes[1][-1]], shrink=0.85)
    return fig


_RENDERERS = {
    FigureKind.NORM_RATIO: _render_norm_ratio,
    FigureKind.METRICS: _render_metrics,
    FigureKind.SNAPSHOTS_1D: _render_snapshots_1d,
    FigureKind.HEATMAP_2D: _render_heatmap_2d,
}


def render(spec: FigureSpec) -> Path:
    """Draw one figure and write it to spec.output; returns the path."""
    for path in spec.inputs:
        if not path.exists():
            raise SchemaError(f"input not found: {path}")
    fig = _RENDERERS[spec.kind](spec)
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, dpi=FIGURE_DPI)
    plt.close(fig)
    return spec.output


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description="Render figures from qite-pde run artifacts."
    )
    parser.add_argument("--kind", required=True,
                        choices=[k.value for k in FigureKind])
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="trajectory.csv or snapshots.csv paths")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--bc", default="auto", choices=("auto", "zero", "periodic"),
                        help="boundary handling for 1D interpolation")
    args = parser.parse_args(argv)
    spec = FigureSpec(
        kind=FigureKind(args.kind),
        inputs=tuple(Path(p) for p in args.inputs),
        output=Path(args.out),
        boundary=args.bc,
    )
    try:
        render(spec)
    except (SchemaError, ValueError) as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
