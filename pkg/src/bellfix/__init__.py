"""CHSH statistics with per-trial setting choices, with one fixed POVM per
particle, and the local models that reproduce the latter."""
from .fixed_povm import (
    EffectLabel,
    JointDistribution,
    Povm,
    UndefinedConditionalError,
    chsh_from_fixed,
    conditional_correlator,
    joint_distribution,
    mixed_povm,
    povms_for,
)
from .lhv_models import (
    AdvanceModel,
    InstructionModel,
    TrialRecord,
    advance_model_from,
    empirical_distribution,
    instruction_model_from,
    predicted_distribution,
    sample_instructions,
    tv_distance,
)
from .measurements import (
    MeasurementSetting,
    SettingsQuartet,
    chsh_value,
    correlator,
    grid_search_chsh,
    local_deterministic_bound,
    optimal_quartet,
    projectors,
)
from .quantum_core import (
    DensityOperator,
    born_probability,
    dagger,
    is_psd,
    kron,
    maximally_mixed,
    product_00,
    singlet,
    trace,
)

__version__ = "0.1.0"

__all__ = [
    "AdvanceModel",
    "DensityOperator",
    "EffectLabel",
    "InstructionModel",
    "JointDistribution",
    "MeasurementSetting",
    "Povm",
    "SettingsQuartet",
    "TrialRecord",
    "UndefinedConditionalError",
    "advance_model_from",
    "born_probability",
    "chsh_from_fixed",
    "chsh_value",
    "conditional_correlator",
    "correlator",
    "dagger",
    "empirical_distribution",
    "grid_search_chsh",
    "instruction_model_from",
    "is_psd",
    "joint_distribution",
    "kron",
    "local_deterministic_bound",
    "maximally_mixed",
    "mixed_povm",
    "optimal_quartet",
    "povms_for",
    "predicted_distribution",
    "product_00",
    "projectors",
    "sample_instructions",
    "singlet",
    "trace",
    "tv_distance",
]
