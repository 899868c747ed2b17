"""Discretising functions onto qubit registers and reading them back.

A register of n qubits holds N = 2^n uniformly spaced samples per axis.
Zero-boundary axes carry implied ghost samples f(0) = f(L) = 0, so the
physical length is L = (N+1)h and the first stored sample sits at x = h.
Periodic axes wrap, L = N h, first sample at x = 0.  Two-dimensional
fields store the x axis on the most significant qubits: sample (k1, k2)
lives at flat index k1 * N2 + k2.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .fd_operators import BoundaryCondition
from .state_engine import StateVector


@dataclass(frozen=True)
class GridSpec:
    """Per-axis discretisation geometry."""

    qubits: tuple[int, ...]
    spacing: tuple[float, ...]
    bc: tuple[BoundaryCondition, ...]
    start: tuple[float, ...] | None = None

    def __post_init__(self):
        dims = len(self.qubits)
        if dims not in (1, 2):
            raise ValueError("only 1D and 2D grids are supported")
        if len(self.spacing) != dims or len(self.bc) != dims:
            raise ValueError("per-axis field lengths must match the dimension")
        if self.start is not None and len(self.start) != dims:
            raise ValueError("per-axis field lengths must match the dimension")
        if any(q < 1 for q in self.qubits):
            raise ValueError("each axis needs at least one qubit")
        if any(h <= 0 for h in self.spacing):
            raise ValueError("grid spacing must be positive")

    @property
    def dimension(self) -> int:
        return len(self.qubits)

    @property
    def total_qubits(self) -> int:
        return sum(self.qubits)

    def samples(self, axis: int) -> int:
        return 1 << self.qubits[axis]

    def origin(self, axis: int) -> float:
        if self.start is not None:
            return self.start[axis]
        # Zero BC: first stored sample sits one spacing inside the ghost
        # boundary; periodic axes start at the wrap point itself.
        if self.bc[axis] is BoundaryCondition.ZERO:
            return self.spacing[axis]
        return 0.0

    def length(self, axis: int) -> float:
        n = self.samples(axis)
        h = self.spacing[axis]
        if self.bc[axis] is BoundaryCondition.ZERO:
            return (n + 1) * h
        return n * h

    def points(self, axis: int) -> np.ndarray:
        return self.origin(axis) + self.spacing[axis] * np.arange(self.samples(axis))

    def shape(self) -> tuple[int, ...]:
        return tuple(self.samples(a) for a in range(self.dimension))


@dataclass(frozen=True)
class SquareWave:
    """1 on the middle half of the axis samples (N/4 .. 3N/4-1), else 0."""


@dataclass(frozen=True)
class TriangleWave:
    """One full period across the axis: minimum `offset` at the ends,
    peak `offset + height` at the centre."""

    height: float = 1.0
    offset: float = 0.0


@dataclass(frozen=True)
class InvertedParabola:
    """max_height * (1 - (2x/L - 1)^2); vanishes at the ghost boundaries."""

    max_height: float = 1.0


AxisWave = Union[SquareWave, TriangleWave, InvertedParabola]


@dataclass(frozen=True)
class ProductWave:
    """Separable 2D field: x_factor(x) * y_factor(y)."""

    x_factor: AxisWave
    y_factor: AxisWave


@dataclass(frozen=True)
class ExplicitSamples:
    """Field given directly as N (or N1*N2) sample values."""

    values: tuple[float, ...]


InitialCondition = Union[SquareWave, TriangleWave, InvertedParabola, ProductWave, ExplicitSamples]


def axis_profile(wave: AxisWave, grid: GridSpec, axis: int) -> np.ndarray:
    """Sample a 1D waveform along one grid axis."""
    n = grid.samples(axis)
    if isinstance(wave, SquareWave):
        out = np.zeros(n)
        out[n // 4 : (3 * n) // 4] = 1.0
        return out
    x = grid.points(axis)
    rel = 2.0 * x / grid.length(axis) - 1.0
    if isinstance(wave, TriangleWave):
        return wave.offset + wave.height * (1.0 - np.abs(rel))
    if isinstance(wave, InvertedParabola):
        return wave.max_height * (1.0 - rel**2)
    raise TypeError(f"not an axis waveform: {wave!r}")


def field_samples(cond: InitialCondition, grid: GridSpec) -> np.ndarray:
    """Evaluate an initial condition on the full grid, shaped per axis."""
    if isinstance(cond, ExplicitSamples):
        values = np.asarray(cond.values, dtype=float)
        expected = int(np.prod(grid.shape()))
        if values.size != expected:
            raise ValueError(f"expected {expected} samples, got {values.size}")
        return values.reshape(grid.shape())
    if grid.dimension == 1:
        if isinstance(cond, ProductWave):
            raise ValueError("product waveforms need a 2D grid")
        return axis_profile(cond, grid, 0)
    if isinstance(cond, ProductWave):
        fx, fy = cond.x_factor, cond.y_factor
    else:
        # A bare axis waveform on a 2D grid means the same profile in x and y.
        fx = fy = cond
    return np.outer(axis_profile(fx, grid, 0), axis_profile(fy, grid, 1))


def encode(cond: InitialCondition, grid: GridSpec) -> tuple[StateVector, float]:
    """Load samples into a unit statevector; returns (state, initial norm).

    Amplitude of |k> (or |k1>|k2>) is f(x_k) / norm.  Only nonnegative,
    not-identically-zero fields are supported: amplitude readout
    reconstructs the field from square roots of probabilities.
    """
    samples = field_samples(cond, grid).reshape(-1)
    if np.any(samples < 0):
        raise ValueError("sampled function must be nonnegative everywhere")
    norm = float(np.linalg.norm(samples))
    if norm == 0.0:
        raise ValueError("sampled function is identically zero")
    state = StateVector(samples / norm, grid.total_qubits)
    return state, norm


def decode(state: StateVector, scale: float, grid: GridSpec) -> np.ndarray:
    """scale * amplitude at each grid point, shaped per axis ordering."""
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    return scale * state.amplitudes.real.reshape(grid.shape())


def readout_probabilities(
    state: StateVector, shots: int | None = None, seed: int | None = None
) -> np.ndarray:
    """Computational-basis probabilities, exact or sampled.

    Without ``shots`` this is |amplitude|^2 exactly, so square roots of the
    result reproduce a nonnegative-real state.  With ``shots`` it returns
    multinomial empirical frequencies.
    """
    state.require_normalized()
    probs = state.probabilities()
    if shots is None:
        return probs
    if shots <= 0:
        raise ValueError("shot count must be positive")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs / probs.sum())
    return counts / shots
