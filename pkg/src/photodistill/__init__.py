"""Optimal distillation of photonic indistinguishability with three photons."""
from .baselines import ComparisonRecord, ScatterPoint, compare_u0, haar_unitary, scatter
from .distill import (
    U0,
    DistillationPlan,
    DistillParams,
    extract_params,
    gain,
    optimal_success_probability,
    optimize_params,
    plan,
    predicted_success,
    predicted_visibility,
    synthesize_optimal_unitary,
    u0_gain,
    unitary_dilation,
)
from .errors import (
    DegenerateProtocolError,
    DistillError,
    InfeasibleBalanceError,
    InfeasibleBargmannError,
    UndefinedParametersError,
    ValidationError,
)
from .interference import (
    Interferometer,
    SimulationResult,
    distillation_circuit,
    fock_oracle,
    pattern_probability,
    permanent,
    simulate_distillation_circuit,
)
from .scenario import (
    GramMatrix,
    InternalState,
    PreparationConfig,
    Scenario,
    balance_delay,
    gram_from_states,
    polarization,
    prepare_polarization,
    prepare_polarization_time,
    sample_random_gram,
    sample_random_scenario,
    scenario_from_data,
    scenario_from_gram,
)

__version__ = "0.1.0"
