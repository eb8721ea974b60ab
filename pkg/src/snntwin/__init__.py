"""SNN/QNN twin construction, exact integrate-and-fire checks and an analytical energy model."""
from .errors import ConfigurationError, DomainError, InfeasibleScenarioError, OutOfPremiseError
from .neuron import (
    NeuronParams,
    SimulationTrace,
    SpikeMatrix,
    SpikeTrain,
    check_premise,
    encode_rate,
    simulate_if,
    spike_count_oracle,
)
from .twin import (
    EquivalenceReport,
    Scenario,
    TwinSpec,
    bits_for_window,
    check_equivalence,
    qnn_activation,
    scenario_sparsity,
    scenario_spike_rate,
    spike_rate_bounds,
)
from .energy import (
    EnergyBreakdown,
    HardwareProfile,
    WorkloadConfig,
    compute_advantage,
    compute_energy_qnn,
    compute_energy_snn,
    data_advantage,
    data_energy_qnn,
    data_energy_snn,
    data_energy_snn_aggregated,
    factor_F,
    total_energy,
)
from .profiles import builtin_profiles, load_profile, resolve_profile
from .analysis import (
    MODEL_PRESETS,
    BreakevenResult,
    ModelPreset,
    SweepRecord,
    breakeven_spike_rate,
    landscape,
    sensitivity,
    sparse_dense_threshold,
)

__version__ = "0.1.0"
