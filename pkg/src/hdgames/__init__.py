"""Toolkit for binary-action games whose payoffs depend on the history of
play: learning rules, explicit monotone couplings against a static reference
game, stochastic-dominance oracles, and two networked case studies
(threat-intelligence sharing, epidemic-coupled coordination)."""

from ._version import __version__  # noqa: F401

from .errors import (  # noqa: F401
    AlignmentViolationError,
    BudgetError,
    ConfigError,
    DimensionError,
    InvalidPairError,
    NumericError,
    OrderError,
)
from .profiles import (  # noqa: F401
    ActionProfile,
    History,
    PartitionSets,
    deviating_agent,
    enumerate_histories,
    enumerate_profiles,
    mirror_deviation,
    partition_sets,
    path_leq,
    profile_leq,
    unilateral_neighbors,
)
from .games import (  # noqa: F401
    AlignedPair,
    AlignmentReport,
    FunctionalStaticGame,
    HistoryGame,
    LiftedStaticGame,
    StaticGame,
    TabularStaticGame,
    check_alignment,
    random_game_ensemble,
)
from .learning import (  # noqa: F401
    BestResponseRule,
    InertialRule,
    InitialDistribution,
    LearningRule,
    LogLinearRule,
    TransitionDistribution,
    action_distribution,
    enumerate_path_measure,
    path_probability,
    sample_step,
    simulate_path,
    step_distribution,
    step_probability,
    verify_rule_properties,
)
from .coupling import (  # noqa: F401
    INCREASING_FUNCTIONALS,
    CouplingReport,
    OneStepCoupling,
    PathCoupling,
    dominance_report,
    gap_identity_report,
    one_step_coupling,
    path_coupling_marginals,
    random_upper_sets,
    sweep_one_step_couplings,
    verify_coupling,
)
from .equilibrium import (  # noqa: F401
    PotentialFunction,
    StabilityEstimate,
    check_exact_potential,
    estimate_all_ones_probability,
    gibbs_distribution,
    is_strict_nash,
    potential_maximizers,
    stationary_distribution,
    total_variation,
    transition_matrix,
)
from .graphs import Graph  # noqa: F401
from .cti import (  # noqa: F401
    CtiConfig,
    ValueSpec,
    cti_condition_check,
    cti_game,
    cti_pair,
    cti_potential,
    cti_potential_value,
    cti_reference,
    figure_one_config,
    figure_one_experiment,
)
from .sisgcg import (  # noqa: F401
    SisgcgConfig,
    beta_of_profile,
    convention_utility,
    figure_two_config,
    figure_two_experiment,
    gcg_potential,
    gcg_reference,
    hypothesis_check,
    invariance_check,
    sis_step,
    sis_trajectory,
    sisgcg_pair,
)
from .config import ExperimentConfig, build_config, default_config, parse_config  # noqa: F401
from .records import TrialRecord  # noqa: F401
from .runner import run_experiment, run_experiment_records  # noqa: F401
from .verify import run_verifications  # noqa: F401
