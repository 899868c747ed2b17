"""Pauli-string algebra on qubit registers.

Strings are stored as per-qubit axis codes (0=I, 1=X, 2=Y, 3=Z), qubit 0
being the most significant tensor factor: the dense matrix of a term is
``sigma[axes[0]] (x) sigma[axes[1]] (x) ...`` and basis state ``|k>`` reads
qubit 0 off the top bit of ``k``.

Internally every string is reduced to an (xmask, zmask) bit-pair per the
usual convention I=(0,0), X=(1,0), Z=(0,1), Y=(1,1), so products are table
lookups and a string applies to a state vector in a single
permute-and-phase pass without materialising the 2^n x 2^n matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

I, X, Y, Z = 0, 1, 2, 3
AXIS_CHARS = "IXYZ"

DENSE_QUBIT_LIMIT = 12

# Coefficients below this are dropped when sums are merged.
COEFF_PRUNE = 1e-14

_I_POW = np.array([1.0, 1.0j, -1.0, -1.0j])


class ResourceLimitError(RuntimeError):
    """Raised when an operation would exceed a hard resource limit."""

# Single-qubit products a*b -> (axis, power of i).
# Cyclic rule: X*Y = iZ, Y*Z = iX, Z*X = iY; reversed order picks up -i.
_MUL_AXIS = (
    (I, X, Y, Z),
    (X, I, Z, Y),
    (Y, Z, I, X),
    (Z, Y, X, I),
)
_MUL_IPOW = (
    (0, 0, 0, 0),
    (0, 0, 1, 3),
    (0, 3, 0, 1),
    (0, 1, 3, 0),
)


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli string."""

    axes: tuple[int, ...]
    coefficient: complex

    def __post_init__(self):
        if not all(a in (I, X, Y, Z) for a in self.axes):
            raise ValueError(f"invalid axis codes in {self.axes}")
        if not np.isfinite(complex(self.coefficient)):
            raise ValueError("coefficient must be finite")

    @property
    def qubit_count(self) -> int:
        return len(self.axes)

    def string(self) -> str:
        return "".join(AXIS_CHARS[a] for a in self.axes)


def axes_from_string(s: str) -> tuple[int, ...]:
    return tuple(AXIS_CHARS.index(c) for c in s.upper())


def multiply(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[complex, tuple[int, ...]]:
    """Product of two Pauli strings: dense(a) @ dense(b) == phase * dense(axes)."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    ipow = 0
    axes = []
    for qa, qb in zip(a, b):
        axes.append(_MUL_AXIS[qa][qb])
        ipow += _MUL_IPOW[qa][qb]
    return complex(_I_POW[ipow % 4]), tuple(axes)


def term_masks(axes: tuple[int, ...]) -> tuple[int, int, int]:
    """(xmask, zmask, y_count) with qubit 0 on the most significant bit."""
    n = len(axes)
    xm = zm = yc = 0
    for q, a in enumerate(axes):
        bit = 1 << (n - 1 - q)
        if a in (X, Y):
            xm |= bit
        if a in (Z, Y):
            zm |= bit
        if a == Y:
            yc += 1
    return xm, zm, yc


def _phases(xmask: int, zmask: int, y_count: int, dim: int) -> np.ndarray:
    """phase(b) such that sigma|b> = phase(b) |b ^ xmask> for b = 0..dim-1."""
    b = np.arange(dim)
    parity = np.bitwise_count(b & zmask).astype(np.int64) & 1
    return _I_POW[y_count % 4] * (1 - 2 * parity)


def apply_string(axes: tuple[int, ...], amplitudes: np.ndarray) -> np.ndarray:
    """sigma @ amplitudes for a bare (coefficient-free) Pauli string."""
    dim = amplitudes.shape[0]
    if dim != 1 << len(axes):
        raise ValueError("state dimension does not match string length")
    xm, zm, yc = term_masks(axes)
    vals = amplitudes * _phases(xm, zm, yc, dim)
    out = np.empty(dim, dtype=complex)
    out[np.arange(dim) ^ xm] = vals
    return out


def _amplitudes(state) -> np.ndarray:
    amps = getattr(state, "amplitudes", state)
    return np.asarray(amps)


def expectation(state, term: PauliTerm) -> complex:
    """<state| term |state> without building the dense operator.

    The state must be normalised; operators here are applied in one
    permute-and-phase pass over the amplitudes.
    """
    amps = _amplitudes(state)
    if amps.shape[0] != 1 << term.qubit_count:
        raise ValueError("state and term act on different qubit counts")
    if abs(np.linalg.norm(amps) - 1.0) > 1e-10:
        raise ValueError("expectation requires a normalised state")
    return complex(term.coefficient) * complex(np.vdot(amps, apply_string(term.axes, amps)))


class PauliSum:
    """Merged, canonically ordered collection of Pauli terms on one register.

    Immutable; addition, scalar multiplication and tensor products return
    new sums.  Terms with equal axes are merged and coefficients below
    ``COEFF_PRUNE`` are dropped.
    """

    __slots__ = ("qubit_count", "_terms")

    def __init__(self, qubit_count: int, terms: Iterable[PauliTerm] = ()):
        if qubit_count < 1:
            raise ValueError("qubit_count must be positive")
        self.qubit_count = qubit_count
        merged: dict[tuple[int, ...], complex] = {}
        for t in terms:
            if t.qubit_count != qubit_count:
                raise ValueError("term length does not match qubit_count")
            merged[t.axes] = merged.get(t.axes, 0.0) + complex(t.coefficient)
        self._terms = {
            ax: c for ax, c in sorted(merged.items()) if abs(c) >= COEFF_PRUNE
        }

    @classmethod
    def from_dict(cls, qubit_count: int, data: dict[tuple[int, ...], complex]) -> "PauliSum":
        return cls(qubit_count, (PauliTerm(ax, c) for ax, c in data.items()))

    @classmethod
    def identity(cls, qubit_count: int, coefficient: complex = 1.0) -> "PauliSum":
        return cls(qubit_count, [PauliTerm((I,) * qubit_count, coefficient)])

    @classmethod
    def zero(cls, qubit_count: int) -> "PauliSum":
        return cls(qubit_count)

    @property
    def terms(self) -> tuple[PauliTerm, ...]:
        return tuple(PauliTerm(ax, c) for ax, c in self._terms.items())

    def coefficient(self, axes: tuple[int, ...]) -> complex:
        return self._terms.get(axes, 0.0)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.qubit_count == other.qubit_count and self._terms == other._terms

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if self.qubit_count != other.qubit_count:
            raise ValueError("cannot add sums on different registers")
        out = dict(self._terms)
        for ax, c in other._terms.items():
            out[ax] = out.get(ax, 0.0) + c
        return PauliSum.from_dict(self.qubit_count, out)

    def __mul__(self, scalar: complex) -> "PauliSum":
        return PauliSum.from_dict(
            self.qubit_count, {ax: c * scalar for ax, c in self._terms.items()}
        )

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"PauliSum(n={self.qubit_count}, terms={len(self._terms)})"

    def support(self) -> tuple[int, ...]:
        """Qubits touched by at least one non-identity axis."""
        touched = set()
        for ax in self._terms:
            for q, a in enumerate(ax):
                if a != I:
                    touched.add(q)
        return tuple(sorted(touched))

    def dense(self) -> np.ndarray:
        """Dense 2^n x 2^n realisation; refuses registers above 12 qubits."""
        n = self.qubit_count
        if n > DENSE_QUBIT_LIMIT:
            raise ResourceLimitError(
                f"dense realisation of {n} qubits exceeds the {DENSE_QUBIT_LIMIT}-qubit limit"
            )
        dim = 1 << n
        out = np.zeros((dim, dim), dtype=complex)
        cols = np.arange(dim)
        for ax, c in self._terms.items():
            xm, zm, yc = term_masks(ax)
            out[cols ^ xm, cols] += c * _phases(xm, zm, yc, dim)
        return out

    def to_text(self) -> str:
        """One `coeff * STRING` line per term, lexicographic string order."""
        lines = []
        for ax, c in self._terms.items():
            label = "".join(AXIS_CHARS[a] for a in ax)
            if c.imag == 0.0:
                coeff = repr(c.real)
            else:
                coeff = repr(c)
            lines.append(f"{coeff} * {label}")
        return "\n".join(lines)


def kron(a: PauliSum, b: PauliSum) -> PauliSum:
    """Tensor product of two sums (a on the most significant qubits)."""
    out: dict[tuple[int, ...], complex] = {}
    for ax_a, ca in a._terms.items():
        for ax_b, cb in b._terms.items():
            key = ax_a + ax_b
            out[key] = out.get(key, 0.0) + ca * cb
    return PauliSum.from_dict(a.qubit_count + b.qubit_count, out)
