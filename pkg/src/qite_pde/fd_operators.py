"""Finite-difference Hamiltonians in Pauli form.

The second-difference operator on N=2^n samples decomposes recursively
over qubits: the zero-boundary operator splits into an identity-padded
copy of itself plus products of corner ladder operators, and the periodic
operator adds the two full-register corner ladders.  All coefficients are
dyadic rationals, so the Pauli recomposition reproduces the integer
stencil matrix exactly in floating point.

``heat_hamiltonian_1d`` and ``laplace_hamiltonian_2d`` wrap the
decompositions into operators for the heat equation `df/dt = alpha *
laplacian(f)`: the evolution generator is ``-(alpha/h^2)`` times the
integer-structured sum, with the scale kept outside the Pauli
coefficients.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .pauli import I, X, Y, PauliSum, PauliTerm, kron


class BoundaryCondition(enum.Enum):
    ZERO = "zero"
    PERIODIC = "periodic"


class Corner(enum.Enum):
    """Which corner entry the n-qubit ladder operator carries."""

    SOUTH_WEST = "south_west"   # lower-left: ((X - iY)/2)^(x)n
    NORTH_EAST = "north_east"   # upper-right: ((X + iY)/2)^(x)n


def ladder(n: int, corner: Corner) -> PauliSum:
    """n-fold tensor power of (X -+ iY)/2: a single 1 in one matrix corner.

    Expands to 2^n Pauli terms, each of magnitude 2^-n.
    """
    if n < 1:
        raise ValueError("ladder operator needs at least one qubit")
    sign = -1.0j if corner is Corner.SOUTH_WEST else 1.0j
    cell = PauliSum(1, [PauliTerm((X,), 0.5), PauliTerm((Y,), 0.5 * sign)])
    out = cell
    for _ in range(n - 1):
        out = kron(out, cell)
    return out


def d0(n: int) -> PauliSum:
    """Zero-boundary second difference on 2^n samples (unit spacing).

    Dense form is tridiagonal(1, -2, 1).  Recursion: pad the (n-1)-qubit
    operator with identity and add the two cross-corner ladder products
    that stitch the sample blocks together.
    """
    if n < 1:
        raise ValueError("need at least one qubit")
    if n == 1:
        return PauliSum(1, [PauliTerm((I,), -2.0), PauliTerm((X,), 1.0)])
    return (
        kron(PauliSum.identity(1), d0(n - 1))
        + kron(ladder(1, Corner.SOUTH_WEST), ladder(n - 1, Corner.NORTH_EAST))
        + kron(ladder(1, Corner.NORTH_EAST), ladder(n - 1, Corner.SOUTH_WEST))
    )


def dp(n: int) -> PauliSum:
    """Periodic second difference: d0 plus the two wrap-around corners.

    n = 1 would stack the wrap entries onto existing couplings, so it is
    rejected rather than silently producing a different stencil.
    """
    if n < 2:
        raise ValueError("periodic operator requires at least 2 qubits")
    return d0(n) + ladder(n, Corner.SOUTH_WEST) + ladder(n, Corner.NORTH_EAST)


def second_difference_matrix(size: int, bc: BoundaryCondition) -> np.ndarray:
    """Direct integer stencil matrix; the independent oracle for d0/dp."""
    m = -2.0 * np.eye(size) + np.eye(size, k=1) + np.eye(size, k=-1)
    if bc is BoundaryCondition.PERIODIC:
        if size < 3:
            raise ValueError("periodic stencil needs at least 3 samples")
        m[0, -1] += 1.0
        m[-1, 0] += 1.0
    return m


@dataclass(frozen=True, eq=False)
class FdOperator:
    """A finite-difference Hamiltonian: ``scale * dense(pauli)``.

    ``pauli`` keeps the integer-structured decomposition; ``scale``
    carries the -alpha/h^2 physics so the decomposition stays exact.
    Dense matrix and eigensystem are realised lazily and cached; the
    eigensystem (ascending eigenvalues, columns sign-fixed so the
    largest-magnitude component is positive) is the single source of
    truth for exact evolution, oracle trajectories and ground states.
    """

    pauli: PauliSum
    qubit_count: int
    scale: float
    bc: tuple[BoundaryCondition, ...]
    axis_qubits: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.axis_qubits:
            object.__setattr__(self, "axis_qubits", (self.qubit_count,))
        if sum(self.axis_qubits) != self.qubit_count:
            raise ValueError("axis qubit counts must sum to the register size")

    @cached_property
    def matrix(self) -> np.ndarray:
        dense = self.pauli.dense()
        if dense.size and np.abs(dense.imag).max() > 1e-12:
            raise ValueError("finite-difference operator must be real")
        return self.scale * dense.real

    @cached_property
    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        w, v = np.linalg.eigh(self.matrix)
        for k in range(v.shape[1]):
            col = v[:, k]
            if col[np.argmax(np.abs(col))] < 0:
                v[:, k] = -col
        v.flags.writeable = False
        w.flags.writeable = False
        return w, v

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.matrix @ amplitudes

    def expectation(self, amplitudes: np.ndarray) -> float:
        return float(np.real(np.vdot(amplitudes, self.matrix @ amplitudes)))


def heat_hamiltonian_1d(
    n: int, h: float, alpha: float, bc: BoundaryCondition
) -> FdOperator:
    """Heat-equation generator -(alpha/h^2) * second difference.

    Real symmetric with nonnegative spectrum; strictly positive under
    zero boundary conditions.
    """
    if h <= 0:
        raise ValueError("grid spacing must be positive")
    if alpha <= 0:
        raise ValueError("diffusivity must be positive")
    sum_ = d0(n) if bc is BoundaryCondition.ZERO else dp(n)
    return FdOperator(
        pauli=sum_, qubit_count=n, scale=-alpha / h**2, bc=(bc,), axis_qubits=(n,)
    )


def laplace_hamiltonian_2d(
    n1: int,
    n2: int,
    h1: float,
    h2: float,
    alpha: float,
    bc_x: BoundaryCondition,
    bc_y: BoundaryCondition,
) -> FdOperator:
    """Heat-equation generator for the 2D five-point stencil.

    The x register occupies the most significant qubits.  No term couples
    an x qubit with a y qubit: the sum is D_x (x) I + (h1/h2)^2 I (x) D_y,
    scaled by -alpha/h1^2.
    """
    if h1 <= 0 or h2 <= 0:
        raise ValueError("grid spacings must be positive")
    if alpha <= 0:
        raise ValueError("diffusivity must be positive")
    dx = d0(n1) if bc_x is BoundaryCondition.ZERO else dp(n1)
    dy = d0(n2) if bc_y is BoundaryCondition.ZERO else dp(n2)
    ratio = (h1 / h2) ** 2
    combined = kron(dx, PauliSum.identity(n2)) + ratio * kron(
        PauliSum.identity(n1), dy
    )
    return FdOperator(
        pauli=combined,
        qubit_count=n1 + n2,
        scale=-alpha / h1**2,
        bc=(bc_x, bc_y),
        axis_qubits=(n1, n2),
    )
