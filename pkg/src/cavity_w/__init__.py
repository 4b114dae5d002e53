"""Simulation of deterministic W-state expansion with detuned cavity passes."""

from .state_core import (
    NormalizationError,
    NumericalGuardError,
    PureStateDense,
    SingleExcitationState,
    canonical_w,
    fidelity,
    fix_global_phase,
    inner_product,
    permute,
    project_single_excitation,
    to_dense,
    w_class_fidelity,
)
from .pair_interaction import (
    ApproximationReport,
    InteractionParams,
    TruncationError,
    compare_effective_exact,
    effective_propagator,
    exact_propagator,
    photon_effective_hamiltonian,
    vacuum_effective_hamiltonian,
)
from .subspace_engine import (
    PairRotation,
    RoundPlan,
    analytic_amplitude,
    analytic_amplitudes,
    ancilla_first_order,
    apply_pair,
    apply_round,
    expand_double,
    run_cascade,
)
from .protocol import (
    MeasurementRecord,
    ProtocolResult,
    Schedule,
    build_schedule,
    reduce_to_size,
    run_ideal,
)
from .noise_model import (
    FeasibilityReport,
    NoiseConfig,
    TrajectoryOutcome,
    estimate_fidelity,
    feasibility,
    sample_noisy_run,
)

__version__ = "0.1.0"
