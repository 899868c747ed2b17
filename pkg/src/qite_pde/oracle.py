"""Ground truth for the discretised dynamics and the comparison metrics.

The "analytical" trajectory is the exact evolution of the discretised
system: expand the initial samples in the Hamiltonian eigenbasis, decay
each mode by exp(-lambda_k t), renormalise.  C_f(t) is the squared norm
relative to t = 0; fidelity, norm ratio and mean squared error compare a
simulated trajectory against this reference.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fd_operators import FdOperator
from .state_engine import StateVector


@dataclass(frozen=True, eq=False)
class SpectralSolution:
    """Eigen-expansion of a normalised initial state under one Hamiltonian."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    coefficients: np.ndarray
    qubit_count: int

    @classmethod
    def build(cls, hamiltonian: FdOperator, initial: StateVector) -> "SpectralSolution":
        initial.require_normalized()
        w, v = hamiltonian.eigensystem
        coeffs = v.T @ initial.amplitudes.real
        return cls(
            eigenvalues=w,
            eigenvectors=v,
            coefficients=coeffs,
            qubit_count=hamiltonian.qubit_count,
        )

    def evolve_exact(self, t: float) -> tuple[StateVector, float]:
        """Normalised exact state and C_f(t) = ||f(t)||^2 / ||f(0)||^2."""
        if t < 0:
            raise ValueError("time must be nonnegative")
        decayed = self.coefficients * np.exp(-self.eigenvalues * t)
        c_f = float(np.sum(decayed**2))
        amps = self.eigenvectors @ (decayed / np.sqrt(c_f))
        return StateVector(amps, self.qubit_count), c_f


def fidelity(reference: StateVector, state: StateVector) -> float:
    """<reference|state> for the real-nonnegative state convention."""
    reference.require_normalized()
    state.require_normalized()
    return float(np.real(reference.inner(state)))


def norm_ratio(c_psi: float, c_f: float) -> float:
    """sqrt(C_psi / C_f): reconstructed over true squared-norm ratio."""
    if c_f <= 0:
        raise ValueError("reference squared norm must be positive")
    return float(np.sqrt(c_psi / c_f))


def mse(c_f: float, r: float, f: float, n_samples: int) -> float:
    """Mean squared error in the factored form 2 C_f / N * ((1+r^2)/2 - r F)."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    return 2.0 * c_f / n_samples * ((1.0 + r * r) / 2.0 - r * f)


def mse_direct(
    reference: StateVector, state: StateVector, c_f: float, c_psi: float
) -> float:
    """||sqrt(C_f) ref - sqrt(C_psi) state||^2 / N; the unfactored form."""
    diff = np.sqrt(c_f) * reference.amplitudes - np.sqrt(c_psi) * state.amplitudes
    return float(np.linalg.norm(diff) ** 2 / reference.amplitudes.shape[0])
