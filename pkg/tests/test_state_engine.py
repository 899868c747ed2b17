"""State engine kernels: operator application, reductions, unitaries."""
import numpy as np
import pytest

from qite_pde.fd_operators import BoundaryCondition, FdOperator, d0, heat_hamiltonian_1d
from qite_pde.pauli import PauliSum, PauliTerm, ResourceLimitError
from qite_pde.state_engine import (
    QubitDomain,
    StateVector,
    apply_domain_unitary,
    apply_pauli_sum,
    exact_nonunitary_step,
    reduced_cross,
    reduced_density,
)


def random_state(rng, n, real=False):
    dim = 1 << n
    raw = rng.standard_normal(dim)
    if not real:
        raw = raw + 1j * rng.standard_normal(dim)
    return StateVector(raw / np.linalg.norm(raw), n)


def test_apply_difference_block_to_basis_state():
    op = PauliSum(1, [PauliTerm((0,), -2.0), PauliTerm((1,), 1.0)])
    out = apply_pauli_sum(op, StateVector.basis_state(1, 0))
    assert np.allclose(out.amplitudes, [-2.0, 1.0])


def test_apply_difference_to_uniform_state():
    # Tridiagonal stencil on a constant vector: interior rows cancel,
    # boundary rows keep a single -1.
    n = 6
    state = StateVector.uniform(n)
    out = apply_pauli_sum(d0(n), state)
    expected = np.zeros(64)
    expected[0] = expected[-1] = -1.0 / 8.0
    assert np.allclose(out.amplitudes, expected, atol=1e-13)


def test_apply_identity_sum():
    rng = np.random.default_rng(0)
    state = random_state(rng, 4)
    out = apply_pauli_sum(PauliSum.identity(4), state)
    assert np.allclose(out.amplitudes, state.amplitudes)


def test_apply_matches_dense_random():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        n_terms = int(rng.integers(1, 6))
        terms = [
            PauliTerm(
                tuple(rng.integers(0, 4, n)),
                complex(rng.standard_normal(), rng.standard_normal()),
            )
            for _ in range(n_terms)
        ]
        op = PauliSum(n, terms)
        state = random_state(rng, n)
        got = apply_pauli_sum(op, state).amplitudes
        want = op.dense() @ state.amplitudes
        assert np.abs(got - want).max() < 1e-12


def test_apply_dimension_mismatch():
    with pytest.raises(ValueError):
        apply_pauli_sum(PauliSum.identity(2), StateVector.basis_state(3, 0))


def test_reduced_density_product_state_is_projector():
    rng = np.random.default_rng(2)
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    a /= np.linalg.norm(a)
    b /= np.linalg.norm(b)
    state = StateVector(np.kron(a, b), 3)
    rho = reduced_density(state, QubitDomain((0,)))
    assert np.allclose(rho, np.outer(a, a.conj()), atol=1e-13)
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 1


def test_reduced_density_bell_state():
    bell = StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2), 2)
    rho = reduced_density(bell, QubitDomain((0,)))
    assert np.allclose(rho, np.eye(2) / 2, atol=1e-14)


def test_reduced_density_expectation_cross_check():
    from qite_pde.pauli import PauliTerm, expectation

    rng = np.random.default_rng(3)
    state = random_state(rng, 6)
    dom = QubitDomain((2, 4))
    rho = reduced_density(state, dom)
    # Tr(rho X(x)Z) against the stride-pass expectation of the embedded string.
    sigma = np.kron(np.array([[0, 1], [1, 0]]), np.array([[1, 0], [0, -1]]))
    got = np.trace(rho @ sigma)
    axes = [0] * 6
    axes[2], axes[4] = 1, 3
    want = expectation(state, PauliTerm(tuple(axes), 1.0))
    assert abs(got - want) < 1e-12


def test_reduced_density_trace_and_psd():
    rng = np.random.default_rng(4)
    state = random_state(rng, 5)
    rho = reduced_density(state, QubitDomain((1, 2, 3)))
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
    w = np.linalg.eigvalsh(rho)
    assert w.min() > -1e-12


def test_reduced_density_marginal_consistency():
    rng = np.random.default_rng(5)
    state = random_state(rng, 6)
    big = reduced_density(state, QubitDomain((1, 2, 3, 4)))
    small = reduced_density(state, QubitDomain((2, 3)))
    # Trace qubits 1 and 4 out of the 4-qubit matrix.
    marg = np.trace(big.reshape(2, 4, 2, 2, 4, 2), axis1=0, axis2=3)
    marg = np.trace(marg.reshape(4, 2, 4, 2), axis1=1, axis2=3)
    assert np.abs(marg - small).max() < 1e-12


def test_reduced_density_domain_limit():
    state = StateVector.uniform(13)
    with pytest.raises(ResourceLimitError):
        reduced_density(state, QubitDomain(tuple(range(13))))


def test_domain_unitary_identity():
    rng = np.random.default_rng(6)
    state = random_state(rng, 3)
    out = apply_domain_unitary(state, QubitDomain((0, 1)), np.zeros((4, 4)), 0.01)
    assert np.allclose(out.amplitudes, state.amplitudes)


def test_domain_unitary_x_rotation():
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    out = apply_domain_unitary(
        StateVector.basis_state(1, 0), QubitDomain((0,)), x, np.pi / 2
    )
    assert np.allclose(out.amplitudes, [0.0, -1.0j], atol=1e-12)


def test_domain_unitary_preserves_norm():
    rng = np.random.default_rng(7)
    for _ in range(5):
        state = random_state(rng, 5)
        herm = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        herm = herm + herm.conj().T
        out = apply_domain_unitary(state, QubitDomain((1, 3, 4)), herm, 0.3)
        assert abs(out.norm() - 1.0) < 1e-12


def test_domain_unitary_rejects_non_hermitian():
    state = StateVector.basis_state(2, 0)
    bad = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        apply_domain_unitary(state, QubitDomain((0,)), bad, 0.1)


def test_exact_step_eigenstate_fixed_point():
    op = heat_hamiltonian_1d(4, 0.1, 0.8, BoundaryCondition.ZERO)
    w, v = op.eigensystem
    state = StateVector(v[:, 2], 4)
    target, c = exact_nonunitary_step(state, op, 1e-3)
    assert abs(abs(state.inner(target)) - 1.0) < 1e-12
    assert c == pytest.approx(np.exp(-2.0 * w[2] * 1e-3), rel=1e-12)


def test_exact_step_zero_hamiltonian():
    op = FdOperator(pauli=PauliSum.zero(3), qubit_count=3, scale=0.0,
                    bc=(BoundaryCondition.ZERO,))
    rng = np.random.default_rng(8)
    state = random_state(rng, 3)
    target, c = exact_nonunitary_step(state, op, 1e-3)
    assert np.allclose(target.amplitudes, state.amplitudes, atol=1e-13)
    assert c == pytest.approx(1.0)


def test_exact_step_two_level_value():
    op = heat_hamiltonian_1d(1, 1.0, 1.0, BoundaryCondition.ZERO)
    _, v = op.eigensystem
    state = StateVector((v[:, 0] + v[:, 1]) / np.sqrt(2.0), 1)
    _, c = exact_nonunitary_step(state, op, 1e-3)
    assert c == pytest.approx((np.exp(-0.002) + np.exp(-0.006)) / 2.0, rel=1e-12)


def test_exact_step_preserves_nonnegativity():
    rng = np.random.default_rng(9)
    op = heat_hamiltonian_1d(5, 0.1, 0.8, BoundaryCondition.PERIODIC)
    raw = rng.random(32)
    state = StateVector(raw / np.linalg.norm(raw), 5)
    target, _ = exact_nonunitary_step(state, op, 0.05)
    assert target.amplitudes.real.min() > -1e-12


def test_reduced_cross_matches_outer_product():
    rng = np.random.default_rng(10)
    ket = random_state(rng, 4)
    bra = random_state(rng, 4)
    dom = QubitDomain((0, 1, 2, 3))
    got = reduced_cross(ket, bra, dom)
    want = np.outer(ket.amplitudes, bra.amplitudes.conj())
    assert np.abs(got - want).max() < 1e-13


def test_state_vector_validation():
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 0.0, 0.0]), 2)
    with pytest.raises(ValueError):
        StateVector(np.array([np.inf, 0.0]), 1)
    with pytest.raises(ValueError):
        QubitDomain((1, 1))
