"""Tracking the scale of the state vector over imaginary time.

The normalised trajectory loses the decaying norm of the physical
solution.  Three estimators recover it: the per-step linear factor
c' = 1 - 2 dt <H>, its running product C', and the ground-state-anchored
correction C* = exp(-2 lambda0 t) <gs|f(0)>^2 / <gs|psi(t)>^2.  The hybrid
C_psi multiplies linear factors between corrections and snaps to C* every
K steps, which keeps the compounding drift of C' bounded.

Note the linear factor uses the minus sign that the first-order expansion
of <exp(-2 H dt)> demands; with a positive-spectrum Hamiltonian every
factor is <= 1.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .fd_operators import FdOperator
from .state_engine import StateVector

OVERLAP_FLOOR = 1e-12
DEGENERACY_GAP = 1e-10


class GroundStateSource(enum.Enum):
    EXACT_EIGEN = "exact"
    LONG_QITE = "long_qite"


class CorrectionUnavailable(RuntimeError):
    """Ground-state overlap too small to divide by; keep the running product."""


@dataclass(frozen=True)
class GroundStateInfo:
    """Lowest-eigenvalue data (exact or relaxation-estimated)."""

    state: StateVector
    eigenvalue: float
    source: GroundStateSource
    degenerate: bool = False


@dataclass(frozen=True)
class LongRunSettings:
    """How far and how coarsely to relax when estimating the ground state."""

    duration: float = 10.0
    dt: float = 0.01
    domain_size: int | None = None
    regularization: float = 1e-8
    initial: StateVector | None = None


@dataclass
class NormTracker:
    """Single-owner per-trajectory accumulator for the hybrid estimator."""

    period: int
    initial_overlap: float
    initial_norm: float = 1.0
    c_psi: float = 1.0
    step: int = 0

    def __post_init__(self):
        if self.period < 1:
            raise ValueError("correction period must be at least 1")
        if self.c_psi <= 0:
            raise ValueError("squared-norm estimate must be positive")


def linear_factor(state: StateVector, hamiltonian: FdOperator, dt: float) -> float:
    """First-order squared-norm factor 1 - 2 dt <state|H|state>."""
    state.require_normalized()
    return 1.0 - 2.0 * dt * hamiltonian.expectation(state.amplitudes)


def running_product(previous: float, factor: float) -> float:
    """Multiplicative accumulation of linear factors."""
    if previous <= 0 or factor <= 0:
        raise ValueError("squared-norm factors must be positive")
    return previous * factor


def corrected_norm(
    t: float, tracker: NormTracker, ground: GroundStateInfo, state: StateVector
) -> float:
    """Ground-state-anchored estimate of the squared norm at time t."""
    overlap_now = float(np.real(ground.state.inner(state)))
    if abs(overlap_now) < OVERLAP_FLOOR:
        raise CorrectionUnavailable(
            f"ground-state overlap {overlap_now:.3e} below {OVERLAP_FLOOR}"
        )
    ratio = tracker.initial_overlap / overlap_now
    return float(np.exp(-2.0 * ground.eigenvalue * t) * ratio * ratio)


def hybrid_update(
    tracker: NormTracker, step: int, c_prime: float, c_star: float | None
) -> float:
    """Advance the tracker one step: snap to C* on correction steps.

    ``c_prime`` is the factor for the step from (step-1) to step,
    evaluated on the pre-step state, so the never-corrected limit
    reproduces the running product of linear factors exactly.  A missing
    ``c_star`` (overlap too small) falls back to the product branch.
    """
    if step < 1:
        raise ValueError("steps are counted from 1")
    if step % tracker.period == 0 and c_star is not None:
        tracker.c_psi = c_star
    else:
        tracker.c_psi = running_product(tracker.c_psi, c_prime)
    tracker.step = step
    return tracker.c_psi


def ground_state(
    hamiltonian: FdOperator,
    source: GroundStateSource = GroundStateSource.EXACT_EIGEN,
    long_run: LongRunSettings | None = None,
) -> GroundStateInfo:
    """Lowest-eigenvalue pair, exact or via a long relaxation run.

    The exact route reads the cached dense eigendecomposition.  The
    relaxation route evolves an initial state (uniform by default) for
    ``long_run.duration`` of imaginary time and reports the final state
    with its Rayleigh quotient.
    """
    if source is GroundStateSource.EXACT_EIGEN:
        w, v = hamiltonian.eigensystem
        degenerate = bool(w.shape[0] > 1 and (w[1] - w[0]) < DEGENERACY_GAP)
        state = StateVector(v[:, 0], hamiltonian.qubit_count)
        return GroundStateInfo(
            state=state,
            eigenvalue=float(w[0]),
            source=source,
            degenerate=degenerate,
        )
    from .qite import relax_to_ground_state

    settings = long_run or LongRunSettings()
    state = relax_to_ground_state(hamiltonian, settings)
    rayleigh = hamiltonian.expectation(state.amplitudes)
    return GroundStateInfo(state=state, eigenvalue=rayleigh, source=source)
