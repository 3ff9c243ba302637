"""Networked social learning with informativeness-triggered communication.

Agents on a communication graph learn a hidden state from private
signals. Each round, an agent shares its accumulated evidence with a
neighbor only when one of them found its fresh signal uninformative,
so the network pays for communication exactly when private data stops
being enough.
"""

from .analysis import (
    IdentifiabilityReport,
    check_interval_connectivity,
    equivalence_classes,
    estimate_rate,
    identifiability_report,
    kl_divergence,
    mixing_gap,
    network_divergence,
    product_convergence_gap,
)
from .harness import (
    BaselineComparison,
    ExperimentConfig,
    TrajectoryRecord,
    build_likelihoods,
    build_model,
    build_network,
    build_prior,
    build_state_space,
    compare_baseline,
    distinguished_state,
    export,
    generate_signals,
    initial_state,
    read_beliefs_csv,
    reference_config,
    run_experiment,
    run_round,
)
from .learning import (
    InformativenessVerdict,
    bayes_update,
    belief_from_potentials,
    binary_informative,
    binary_tv,
    initial_belief,
    is_informative,
    potential_update,
    tv_distance,
)
from .model import (
    AssumptionViolation,
    BeliefState,
    LikelihoodModel,
    Network,
    Prior,
    StateSpace,
    ValidationReport,
    complete_edges,
    metropolis_weights,
    ring_edges,
    validate_assumptions,
)
from .switching import (
    CommLedger,
    SwitchingMatrix,
    build_switching_matrix,
    record_round,
)

__version__ = "0.1.0"
