"""Config-driven experiment runner.

A run is described by one JSON document: grid geometry, initial waveform,
diffusivity, evolution knobs, norm-correction settings, snapshot times
and an output directory.  Each run writes three artifacts:

  trajectory.csv   one row per completed step (schema below)
  snapshots.csv    physical-scale samples of the simulated and reference
                   solutions at the requested times
  summary.json     final metrics, ground eigenvalue, runtime, config echo

Subcommands: ``run``, ``sweep`` (one run per domain size plus a combined
comparison table), ``validate-hamiltonian`` (Pauli recomposition against
the direct stencil matrix) and ``ground-state``.

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fd_operators import (
    BoundaryCondition,
    FdOperator,
    heat_hamiltonian_1d,
    laplace_hamiltonian_2d,
    second_difference_matrix,
)
from .grid import (
    ExplicitSamples,
    GridSpec,
    InitialCondition,
    InvertedParabola,
    ProductWave,
    SquareWave,
    TriangleWave,
    encode,
)
from .norm import GroundStateInfo, GroundStateSource, LongRunSettings, ground_state
from .oracle import SpectralSolution
from .qite import GeneratorBasis, QiteConfig, StepFailureError, TrajectoryRecord, run
from .state_engine import StateVector

SCHEMA_VERSION = 1

TRAJECTORY_HEADER = [
    "schema_version", "step", "t", "fidelity", "mse", "log10_norm_ratio",
    "c_prime", "C_psi", "C_f", "fit_residual",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec
    initial: InitialCondition
    alpha: float
    qite: QiteConfig
    ground_source: GroundStateSource
    long_run: LongRunSettings | None
    mode: str                      # "qite" | "exact_only"
    snapshot_times: tuple[float, ...]
    output_dir: Path


def _require(data: dict, key: str, context: str):
    if key not in data:
        raise ConfigError(f"{context}: missing required field {key!r}")
    return data[key]


def _parse_bc(name: str, context: str) -> BoundaryCondition:
    try:
        return BoundaryCondition(name)
    except ValueError:
        raise ConfigError(f"{context}: unknown boundary condition {name!r}") from None


def _parse_grid(data: dict) -> GridSpec:
    qubits = tuple(int(q) for q in _require(data, "qubits", "grid"))
    spacing = tuple(float(h) for h in _require(data, "spacing", "grid"))
    bc = tuple(_parse_bc(b, "grid.boundary") for b in _require(data, "boundary", "grid"))
    start = data.get("start")
    if start is not None:
        start = tuple(float(s) for s in start)
    try:
        return GridSpec(qubits=qubits, spacing=spacing, bc=bc, start=start)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None


def _read_sample_column(path: Path, column: str | None) -> tuple[float, ...]:
    if not path.exists():
        raise ConfigError(f"initial.path: no such file {path}")
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise ConfigError(f"initial.path: {path} is empty")
    header = rows[0]
    index = 0
    start_row = 0
    if column is not None:
        if column not in header:
            raise ConfigError(f"initial.column: no column {column!r} in {path}")
        index = header.index(column)
        start_row = 1
    else:
        try:
            float(header[0])
        except ValueError:
            start_row = 1
    try:
        return tuple(float(row[index]) for row in rows[start_row:] if row)
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"initial.path: bad sample data in {path}: {exc}") from None


def _parse_axis_wave(data: dict, context: str) -> InitialCondition:
    kind = _require(data, "kind", context)
    if kind == "square_wave":
        return SquareWave()
    if kind == "triangle_wave":
        return TriangleWave(
            height=float(data.get("height", 1.0)),
            offset=float(data.get("offset", 0.0)),
        )
    if kind == "inverted_parabola":
        return InvertedParabola(max_height=float(data.get("max_height", 1.0)))
    raise ConfigError(f"{context}: unknown waveform kind {kind!r}")


def _parse_initial(data: dict, base_dir: Path) -> InitialCondition:
    kind = _require(data, "kind", "initial")
    if kind == "product":
        return ProductWave(
            x_factor=_parse_axis_wave(_require(data, "x", "initial"), "initial.x"),
            y_factor=_parse_axis_wave(_require(data, "y", "initial"), "initial.y"),
        )
    if kind == "samples":
        path = Path(_require(data, "path", "initial"))
        if not path.is_absolute():
            path = base_dir / path
        return ExplicitSamples(_read_sample_column(path, data.get("column")))
    return _parse_axis_wave(data, "initial")


def _parse_qite(data: dict) -> QiteConfig:
    try:
        return QiteConfig(
            domain_size=int(_require(data, "domain_size", "qite")),
            dt=float(_require(data, "dt", "qite")),
            steps=int(_require(data, "steps", "qite")),
            correction_period=int(data.get("correction_period", 10)),
            regularization=float(data.get("regularization", 1e-8)),
            basis=GeneratorBasis(data.get("basis", "odd_y")),
            solver=str(data.get("solver", "auto")),
        )
    except ValueError as exc:
        raise ConfigError(f"qite: {exc}") from None


def parse_config(data: dict, base_dir: Path) -> RunConfig:
    grid = _parse_grid(_require(data, "grid", "config"))
    initial = _parse_initial(_require(data, "initial", "config"), base_dir)
    alpha = float(_require(data, "alpha", "config"))
    if alpha <= 0:
        raise ConfigError("alpha: must be positive")
    qite_cfg = _parse_qite(_require(data, "qite", "config"))
    norm_data = data.get("norm", {})
    source_name = norm_data.get("ground_state", "exact")
    try:
        source = GroundStateSource(source_name)
    except ValueError:
        raise ConfigError(f"norm.ground_state: unknown source {source_name!r}") from None
    if "correction_period" in norm_data:
        qite_cfg = QiteConfig(
            domain_size=qite_cfg.domain_size,
            dt=qite_cfg.dt,
            steps=qite_cfg.steps,
            correction_period=int(norm_data["correction_period"]),
            regularization=qite_cfg.regularization,
            basis=qite_cfg.basis,
            solver=qite_cfg.solver,
        )
    long_run = None
    if "long_run" in norm_data:
        lr = norm_data["long_run"]
        long_run = LongRunSettings(
            duration=float(lr.get("duration", 10.0)),
            dt=float(lr.get("dt", 0.01)),
            domain_size=lr.get("domain_size"),
            regularization=float(lr.get("regularization", 1e-8)),
        )
    mode = data.get("mode", "qite")
    if mode not in ("qite", "exact_only"):
        raise ConfigError(f"mode: must be 'qite' or 'exact_only', got {mode!r}")
    horizon = qite_cfg.steps * qite_cfg.dt
    snapshot_times = tuple(float(t) for t in data.get("snapshot_times", ()))
    for t in snapshot_times:
        if t < 0 or t > horizon + 1e-12:
            raise ConfigError(f"snapshot_times: {t} outside [0, {horizon}]")
    output_dir = Path(data.get("output_dir", "run_output"))
    if not output_dir.is_absolute():
        output_dir = base_dir / output_dir
    return RunConfig(
        grid=grid,
        initial=initial,
        alpha=alpha,
        qite=qite_cfg,
        ground_source=source,
        long_run=long_run,
        mode=mode,
        snapshot_times=snapshot_times,
        output_dir=output_dir,
    )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return parse_config(data, path.parent.resolve())


def config_to_dict(cfg: RunConfig) -> dict:
    """JSON-serialisable echo of the resolved configuration."""
    initial: dict = {"kind": type(cfg.initial).__name__}
    if isinstance(cfg.initial, TriangleWave):
        initial.update(height=cfg.initial.height, offset=cfg.initial.offset)
    elif isinstance(cfg.initial, InvertedParabola):
        initial.update(max_height=cfg.initial.max_height)
    elif isinstance(cfg.initial, ProductWave):
        initial.update(
            x=type(cfg.initial.x_factor).__name__, y=type(cfg.initial.y_factor).__name__
        )
    elif isinstance(cfg.initial, ExplicitSamples):
        initial.update(samples=len(cfg.initial.values))
    return {
        "grid": {
            "qubits": list(cfg.grid.qubits),
            "spacing": list(cfg.grid.spacing),
            "boundary": [b.value for b in cfg.grid.bc],
            "start": [cfg.grid.origin(a) for a in range(cfg.grid.dimension)],
        },
        "initial": initial,
        "alpha": cfg.alpha,
        "qite": {
            "domain_size": cfg.qite.domain_size,
            "dt": cfg.qite.dt,
            "steps": cfg.qite.steps,
            "correction_period": cfg.qite.correction_period,
            "regularization": cfg.qite.regularization,
            "basis": cfg.qite.basis.value,
            "solver": cfg.qite.solver,
        },
        "norm": {"ground_state": cfg.ground_source.value},
        "mode": cfg.mode,
        "snapshot_times": list(cfg.snapshot_times),
    }


def build_hamiltonian(cfg: RunConfig) -> FdOperator:
    g = cfg.grid
    if g.dimension == 1:
        return heat_hamiltonian_1d(g.qubits[0], g.spacing[0], cfg.alpha, g.bc[0])
    return laplace_hamiltonian_2d(
        g.qubits[0], g.qubits[1], g.spacing[0], g.spacing[1], cfg.alpha, g.bc[0], g.bc[1]
    )


def _fmt(value) -> str:
    return repr(float(value))


def _write_trajectory(path: Path, records: list[TrajectoryRecord]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRAJECTORY_HEADER)
        for r in records:
            writer.writerow([
                SCHEMA_VERSION, r.step, _fmt(r.t), _fmt(r.fidelity), _fmt(r.mse),
                _fmt(r.log10_norm_ratio), _fmt(r.c_prime), _fmt(r.c_psi),
                _fmt(r.c_f), _fmt(r.fit_residual),
            ])


def _write_snapshots(
    path: Path,
    cfg: RunConfig,
    reference: SpectralSolution,
    snapshot_states: dict[int, StateVector],
    c_psi_by_step: dict[int, float],
    initial_norm: float,
) -> None:
    grid = cfg.grid
    two_d = grid.dimension == 2
    header = (
        ["t", "axis_index_1", "axis_index_2", "x", "y", "f_exact", "psi_qite"]
        if two_d
        else ["t", "axis_index_1", "x", "f_exact", "psi_qite"]
    )
    xs = grid.points(0)
    ys = grid.points(1) if two_d else None
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for step in sorted(snapshot_states):
            t = step * cfg.qite.dt
            exact_state, c_f = reference.evolve_exact(t)
            f_scale = initial_norm * np.sqrt(c_f)
            psi_scale = initial_norm * np.sqrt(c_psi_by_step[step])
            f_vals = f_scale * exact_state.amplitudes.real
            psi_vals = psi_scale * snapshot_states[step].amplitudes.real
            if two_d:
                n2 = grid.samples(1)
                for flat in range(f_vals.shape[0]):
                    k1, k2 = divmod(flat, n2)
                    writer.writerow([
                        _fmt(t), k1, k2, _fmt(xs[k1]), _fmt(ys[k2]),
                        _fmt(f_vals[flat]), _fmt(psi_vals[flat]),
                    ])
            else:
                for k in range(f_vals.shape[0]):
                    writer.writerow([
                        _fmt(t), k, _fmt(xs[k]), _fmt(f_vals[k]), _fmt(psi_vals[k]),
                    ])


def _resolve_ground(cfg: RunConfig, hamiltonian: FdOperator) -> GroundStateInfo:
    if cfg.ground_source is GroundStateSource.LONG_QITE:
        return ground_state(hamiltonian, cfg.ground_source, cfg.long_run)
    return ground_state(hamiltonian)


def run_experiment(cfg: RunConfig, out_dir: Path | None = None) -> dict:
    """Execute one configured run and persist its artifacts.

    Returns the summary dictionary.  A failing step still writes the
    partial trajectory plus an error record before returning.
    """
    started = time.time()
    out = Path(out_dir) if out_dir is not None else cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    hamiltonian = build_hamiltonian(cfg)
    initial, initial_norm = encode(cfg.initial, cfg.grid)
    reference = SpectralSolution.build(hamiltonian, initial)
    ground = _resolve_ground(cfg, hamiltonian)

    snap_steps = {
        min(max(round(t / cfg.qite.dt), 0), cfg.qite.steps) for t in cfg.snapshot_times
    }
    snapshot_states: dict[int, StateVector] = {}
    c_psi_by_step: dict[int, float] = {0: 1.0}
    if 0 in snap_steps:
        snapshot_states[0] = initial

    def hook(step: int, state: StateVector) -> None:
        if step in snap_steps:
            snapshot_states[step] = state

    error: dict | None = None
    try:
        records = run(
            initial,
            hamiltonian,
            cfg.qite,
            ground=ground,
            exact_only=cfg.mode == "exact_only",
            state_hook=hook,
            initial_norm=initial_norm,
        )
    except StepFailureError as exc:
        records = exc.records
        error = {"failed_step": exc.step, "message": str(exc.cause)}

    for record in records:
        if record.step in snap_steps or record.step == cfg.qite.steps:
            c_psi_by_step[record.step] = record.c_psi
    _write_trajectory(out / "trajectory.csv", records)
    _write_snapshots(
        out / "snapshots.csv",
        cfg,
        reference,
        {k: v for k, v in snapshot_states.items() if k in snap_steps},
        c_psi_by_step,
        initial_norm,
    )
    summary = {
        "final_fidelity": records[-1].fidelity if records else 1.0,
        "final_mse": records[-1].mse if records else 0.0,
        "final_log10_ratio": records[-1].log10_norm_ratio if records else 0.0,
        "lambda0": ground.eigenvalue,
        "runtime_seconds": time.time() - started,
        "config": config_to_dict(cfg),
    }
    if error is not None:
        summary["error"] = error
    with open(out / "summary.json", "w") as handle:
        json.dump(summary, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return summary


def _with_domain(cfg: RunConfig, domain_size: int) -> RunConfig:
    qite_cfg = QiteConfig(
        domain_size=domain_size,
        dt=cfg.qite.dt,
        steps=cfg.qite.steps,
        correction_period=cfg.qite.correction_period,
        regularization=cfg.qite.regularization,
        basis=cfg.qite.basis,
        solver=cfg.qite.solver,
    )
    return RunConfig(
        grid=cfg.grid,
        initial=cfg.initial,
        alpha=cfg.alpha,
        qite=qite_cfg,
        ground_source=cfg.ground_source,
        long_run=cfg.long_run,
        mode=cfg.mode,
        snapshot_times=cfg.snapshot_times,
        output_dir=cfg.output_dir,
    )


def _sweep_worker(args: tuple[RunConfig, int, str]) -> tuple[int, dict]:
    cfg, domain, out_dir = args
    return domain, run_experiment(_with_domain(cfg, domain), Path(out_dir))


def sweep_domains(cfg: RunConfig, domains: list[int], out_dir: Path | None = None) -> dict:
    """One run per domain size; failures are isolated per run."""
    out = Path(out_dir) if out_dir is not None else cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(cfg, d, str(out / f"D{d}")) for d in sorted(set(domains))]
    results: dict[int, dict] = {}
    failures: dict[int, str] = {}
    with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
        futures = {pool.submit(_sweep_worker, job): job[1] for job in jobs}
        for future, domain in futures.items():
            try:
                _, summary = future.result()
                results[domain] = summary
            except Exception as exc:  # noqa: BLE001 - isolate per-run failures
                failures[domain] = str(exc)
    _write_sweep_table(out, sorted(results))
    report = {
        "domains": {str(d): results[d] for d in sorted(results)},
        "failures": {str(d): failures[d] for d in sorted(failures)},
    }
    with open(out / "sweep_summary.json", "w") as handle:
        json.dump(report, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return report


def _write_sweep_table(out: Path, domains: list[int]) -> None:
    """Align fidelity and MSE columns of the per-domain trajectories."""
    tables = {}
    for d in domains:
        path = out / f"D{d}" / "trajectory.csv"
        if not path.exists():
            continue
        with open(path, newline="") as handle:
            rows = list(csv.DictReader(handle))
        tables[d] = rows
    if not tables:
        return
    present = sorted(tables)
    length = min(len(rows) for rows in tables.values())
    header = ["step", "t"]
    for d in present:
        header += [f"fidelity_D{d}", f"mse_D{d}"]
    with open(out / "sweep.csv", "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for i in range(length):
            base = tables[present[0]][i]
            row = [base["step"], base["t"]]
            for d in present:
                row += [tables[d][i]["fidelity"], tables[d][i]["mse"]]
            writer.writerow(row)


def validate_hamiltonian(
    qubits: int,
    bc: tuple[BoundaryCondition, ...],
    dimension: int = 1,
    spacing: float = 0.1,
    alpha: float = 0.8,
) -> float:
    """Max-abs deviation of the Pauli recomposition from the direct stencil."""
    if dimension == 1:
        op = heat_hamiltonian_1d(qubits, spacing, alpha, bc[0])
        stencil = second_difference_matrix(1 << qubits, bc[0])
    else:
        n1 = qubits // 2
        n2 = qubits - n1
        op = laplace_hamiltonian_2d(n1, n2, spacing, spacing, alpha, bc[0], bc[1])
        dx = second_difference_matrix(1 << n1, bc[0])
        dy = second_difference_matrix(1 << n2, bc[1])
        stencil = np.kron(dx, np.eye(1 << n2)) + np.kron(np.eye(1 << n1), dy)
    return float(np.abs(op.matrix - op.scale * stencil).max())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qite-pde",
        description="Solve heat-equation benchmarks with inexact imaginary-time evolution.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one configured run")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None)

    p_sweep = sub.add_parser("sweep", help="one run per domain size")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--domains", required=True, help="comma list, e.g. 2,4,6")
    p_sweep.add_argument("--out", default=None)

    p_val = sub.add_parser(
        "validate-hamiltonian", help="check Pauli recomposition against the stencil"
    )
    p_val.add_argument("--qubits", type=int, required=True)
    p_val.add_argument("--bc", required=True, help="zero|periodic, comma list for 2D")
    p_val.add_argument("--dim", type=int, default=1, choices=(1, 2))
    p_val.add_argument("--spacing", type=float, default=0.1)
    p_val.add_argument("--alpha", type=float, default=0.8)

    p_gs = sub.add_parser("ground-state", help="report the ground-state data")
    p_gs.add_argument("--config", required=True)
    p_gs.add_argument("--heuristic", action="store_true",
                      help="estimate by long relaxation instead of the exact eigensolver")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            out = Path(args.out) if args.out else None
            summary = run_experiment(cfg, out)
            print(json.dumps({k: v for k, v in summary.items() if k != "config"},
                             indent=2, sort_keys=True))
            return EXIT_NUMERICAL if "error" in summary else EXIT_OK

        if args.command == "sweep":
            cfg = load_config(args.config)
            try:
                domains = [int(d) for d in args.domains.split(",") if d]
            except ValueError:
                raise ConfigError(f"--domains: not a comma list of integers: {args.domains!r}")
            if not domains:
                raise ConfigError("--domains: at least one domain size required")
            out = Path(args.out) if args.out else None
            report = sweep_domains(cfg, domains, out)
            print(json.dumps(
                {"completed": sorted(report["domains"]), "failures": report["failures"]},
                indent=2, sort_keys=True))
            return EXIT_NUMERICAL if report["failures"] else EXIT_OK

        if args.command == "validate-hamiltonian":
            bcs = tuple(_parse_bc(b.strip(), "--bc") for b in args.bc.split(","))
            if args.dim == 2 and len(bcs) == 1:
                bcs = (bcs[0], bcs[0])
            if len(bcs) != args.dim:
                raise ConfigError("--bc: need one condition per dimension")
            if args.qubits > 10:
                raise ConfigError("--qubits: validation is limited to 10 total qubits")
            if args.dim == 1 and bcs[0] is BoundaryCondition.PERIODIC and args.qubits < 2:
                raise ConfigError("--qubits: the periodic operator needs at least 2 qubits")
            deviation = validate_hamiltonian(
                args.qubits, bcs, args.dim, args.spacing, args.alpha
            )
            print(f"max abs deviation: {deviation!r}")
            return EXIT_OK if deviation <= 1e-12 else EXIT_NUMERICAL

        if args.command == "ground-state":
            cfg = load_config(args.config)
            hamiltonian = build_hamiltonian(cfg)
            source = (
                GroundStateSource.LONG_QITE if args.heuristic else GroundStateSource.EXACT_EIGEN
            )
            info = ground_state(hamiltonian, source, cfg.long_run)
            initial, _ = encode(cfg.initial, cfg.grid)
            print(json.dumps({
                "eigenvalue": info.eigenvalue,
                "source": info.source.value,
                "degenerate": info.degenerate,
                "overlap_with_initial": float(np.real(info.state.inner(initial))),
            }, indent=2, sort_keys=True))
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StepFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
