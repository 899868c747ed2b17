"""Statevector storage and the numerical kernels the evolver needs.

States are immutable snapshots of 2^n complex amplitudes; every operation
returns a fresh vector.  Domain-local work (reduced density matrices,
unitaries) moves the domain qubits to the front axes of the reshaped
amplitude tensor and treats the rest as an environment index.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fd_operators import FdOperator
from .pauli import PauliSum, ResourceLimitError, apply_string

NORM_TOL = 1e-10

REDUCED_QUBIT_LIMIT = 12


@dataclass(frozen=True)
class StateVector:
    """2^n complex amplitudes with the register size they live on."""

    amplitudes: np.ndarray
    qubit_count: int = field(default=-1)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        n = self.qubit_count
        if n < 0:
            n = int(amps.shape[0]).bit_length() - 1
        if amps.ndim != 1 or amps.shape[0] != 1 << n:
            raise ValueError("amplitude vector length must be 2^qubit_count")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "qubit_count", n)

    @classmethod
    def basis_state(cls, qubit_count: int, index: int) -> "StateVector":
        amps = np.zeros(1 << qubit_count, dtype=complex)
        amps[index] = 1.0
        return cls(amps, qubit_count)

    @classmethod
    def uniform(cls, qubit_count: int) -> "StateVector":
        dim = 1 << qubit_count
        return cls(np.full(dim, dim**-0.5, dtype=complex), qubit_count)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalise the zero vector")
        return StateVector(self.amplitudes / nrm, self.qubit_count)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def require_normalized(self, tol: float = NORM_TOL) -> None:
        if not self.is_normalized(tol):
            raise ValueError(f"state norm {self.norm()} is not 1 within {tol}")

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def max_imag(self) -> float:
        return float(np.abs(self.amplitudes.imag).max())


@dataclass(frozen=True)
class QubitDomain:
    """Ordered subset of register qubits a local generator may act on."""

    qubits: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("domain qubits must be distinct")
        if any(q < 0 for q in self.qubits):
            raise ValueError("domain qubits must be nonnegative")

    @property
    def size(self) -> int:
        return len(self.qubits)

    def validate_for(self, qubit_count: int) -> None:
        if any(q >= qubit_count for q in self.qubits):
            raise ValueError(f"domain {self.qubits} exceeds register of {qubit_count}")


def apply_pauli_sum(op: PauliSum, state: StateVector) -> StateVector:
    """dense(op) @ state, computed term by term without the dense matrix."""
    if op.qubit_count != state.qubit_count:
        raise ValueError("operator and state act on different registers")
    out = np.zeros(state.amplitudes.shape[0], dtype=complex)
    for term in op.terms:
        out += term.coefficient * apply_string(term.axes, state.amplitudes)
    return StateVector(out, state.qubit_count)


def _domain_matrix(state: StateVector, dom: QubitDomain) -> np.ndarray:
    """Amplitudes as a (2^D, 2^env) matrix with domain qubits leading."""
    n = state.qubit_count
    dom.validate_for(n)
    tensor = state.amplitudes.reshape([2] * n)
    ordered = np.moveaxis(tensor, dom.qubits, range(dom.size))
    return ordered.reshape(1 << dom.size, -1)


def _from_domain_matrix(mat: np.ndarray, dom: QubitDomain, qubit_count: int) -> np.ndarray:
    tensor = mat.reshape([2] * qubit_count)
    restored = np.moveaxis(tensor, range(dom.size), dom.qubits)
    return restored.reshape(-1)


def reduced_cross(ket: StateVector, bra: StateVector, dom: QubitDomain) -> np.ndarray:
    """Environment trace of |ket><bra| on the domain: Tr(M sigma) = <bra|sigma|ket>."""
    if dom.size > REDUCED_QUBIT_LIMIT:
        raise ResourceLimitError(f"domain of {dom.size} qubits is too large to reduce")
    kmat = _domain_matrix(ket, dom)
    bmat = _domain_matrix(bra, dom)
    return kmat @ bmat.conj().T


def reduced_density(state: StateVector, dom: QubitDomain) -> np.ndarray:
    """Reduced density matrix on the domain qubits (PSD, unit trace)."""
    state.require_normalized()
    return reduced_cross(state, state, dom)


def apply_domain_matrix(state: StateVector, dom: QubitDomain, mat: np.ndarray) -> StateVector:
    """Apply a 2^D x 2^D matrix on the domain qubits, identity elsewhere."""
    work = _domain_matrix(state, dom)
    out = _from_domain_matrix(mat @ work, dom, state.qubit_count)
    return StateVector(out, state.qubit_count)


def apply_domain_unitary(
    state: StateVector, dom: QubitDomain, generator: np.ndarray, dt: float
) -> StateVector:
    """exp(-i * generator * dt) on the domain, via exact eigendecomposition."""
    generator = np.asarray(generator)
    if generator.shape != (1 << dom.size, 1 << dom.size):
        raise ValueError("generator shape does not match the domain")
    if np.abs(generator - generator.conj().T).max() > 1e-10:
        raise ValueError("generator must be Hermitian")
    w, v = np.linalg.eigh(generator)
    unitary = (v * np.exp(-1j * w * dt)) @ v.conj().T
    return apply_domain_matrix(state, dom, unitary)


def exact_nonunitary_step(
    state: StateVector, hamiltonian: FdOperator, dt: float
) -> tuple[StateVector, float]:
    """Normalised action of exp(-H dt) plus its exact squared norm.

    Returns (exp(-H dt)|s> / ||.||, <s|exp(-2 H dt)|s>), both computed in
    the cached eigenbasis of the Hamiltonian.
    """
    state.require_normalized()
    if dt < 0:
        raise ValueError("time step must be nonnegative")
    if hamiltonian.qubit_count != state.qubit_count:
        raise ValueError("Hamiltonian and state act on different registers")
    w, v = hamiltonian.eigensystem
    coords = v.T @ state.amplitudes
    decayed = np.exp(-w * dt) * coords
    c = float(np.sum(np.exp(-2.0 * w * dt) * np.abs(coords) ** 2))
    target = v @ decayed
    target /= np.linalg.norm(target)
    return StateVector(target, state.qubit_count), c
