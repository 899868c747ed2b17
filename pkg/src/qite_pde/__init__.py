"""Statevector solver for linear PDEs via inexact imaginary-time evolution.

Finite-difference Hamiltonians are decomposed in the Pauli basis, the
normalised trajectory is evolved by fitting unitary generators on qubit
windows, and the physical solution is recovered by reconstructing the
decaying norm from per-step linear factors with periodic ground-state
corrections.
"""

from .fd_operators import (
    BoundaryCondition,
    Corner,
    FdOperator,
    d0,
    dp,
    heat_hamiltonian_1d,
    ladder,
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
    decode,
    encode,
    field_samples,
    readout_probabilities,
)
from .norm import (
    CorrectionUnavailable,
    GroundStateInfo,
    GroundStateSource,
    LongRunSettings,
    NormTracker,
    corrected_norm,
    ground_state,
    hybrid_update,
    linear_factor,
    running_product,
)
from .oracle import SpectralSolution, fidelity, mse, mse_direct, norm_ratio
from .pauli import PauliSum, PauliTerm, ResourceLimitError, expectation, kron, multiply
from .qite import (
    DomainLayout,
    GeneratorBasis,
    QiteConfig,
    StepFailureError,
    StepReport,
    TrajectoryRecord,
    default_layout,
    fit_generator,
    qite_step,
    run,
)
from .state_engine import (
    QubitDomain,
    StateVector,
    apply_domain_unitary,
    apply_pauli_sum,
    exact_nonunitary_step,
    reduced_density,
)

__version__ = "0.1.0"
