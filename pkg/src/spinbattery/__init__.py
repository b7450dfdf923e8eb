"""Spin transport through an XXZ chain between fully polarized battery leads.

The package simulates the quench of a system chain strongly coupled to two
finite spin-chain leads (one all-up, one all-down), tracks the ensuing spin
current, and classifies the transport regime from finite-size and time
scaling.  An exact Krylov oracle covers small chains for verification.
"""

from .analysis import (
    AnalysisWindow,
    FitModel,
    FitResult,
    RegimeLabel,
    battery_magnetization,
    battery_magnetization_summed,
    classify_regime,
    fit_exponential,
    fit_power_law,
    fit_time_decay,
    nonmonotonicity_witness,
    quasi_steady_current,
    state_fidelity,
)
from .config import RunConfig, SweepConfig, parse_config
from .errors import (
    CapacityError,
    ConfigError,
    ConservationError,
    DecompositionError,
    DimensionMismatchError,
    IOFormatError,
    PreparationError,
    SectorError,
    SpinBatteryError,
)
from .evolve import (
    EvolutionConfig,
    continuity_residual,
    evolve,
    measure_current,
    measure_profile,
    trotter_convergence_probe,
)
from .groundstate import GroundStateResult, dmrg_ground_state
from .model import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    ChainSpec,
    IsolatedChainSpec,
    SystemPrep,
    TrotterSchedule,
    bond_hamiltonian,
    initial_state,
    trotter_schedule,
)
from .mps import (
    CompressionResult,
    MatrixProductState,
    ReducedDensityMatrix,
    expect_one_site,
    expect_two_site,
    from_product_state,
    ghz_state,
    overlap,
    reduced_density_matrix,
    variational_compress,
)
from .oracle import (
    DenseState,
    dense_from_bits,
    dense_from_mps,
    dense_ghz,
    exact_evolve,
    exact_ground_state,
    exact_rdm,
)
from .record import TrajectoryRecord
from .tensor import TruncatedSVD, contract, hermitian_gate_exponential, svd_truncate

__version__ = "0.1.0"
