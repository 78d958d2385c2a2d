"""Gradient TD control with policy-gradient corrections on linear features.

The package bundles an exact-objectives engine (projected Bellman error, TD
error, analytic gradients, stationary distributions), incremental
two-timescale learners, and a reproducible Baird-star experiment harness
with a CSV-logging CLI.
"""

from .exceptions import ConfigError, NumericalError, PgqError
from .harness import (
    ExperimentConfig,
    GradCheckReport,
    MetricRow,
    MetricSeries,
    grad_check,
    read_csv,
    run_rng,
    run_sampled,
    run_trajectory,
    write_csv,
)
from .learners import (
    ALGORITHMS,
    GQ,
    PGQ,
    PGQDerived,
    QLearning,
    TransitionSample,
    make_learner,
    td_error,
    w_update,
)
from .mdp import (
    DASHED,
    SOLID,
    FeatureMap,
    StateActionDistribution,
    TabularMdp,
    build_baird_star,
    build_random_mdp,
    onehot_features,
    sample_transition,
    state_action_transition_matrix,
    stationary_distribution,
)
from .objectives import ObjectiveWorkspace
from .policy import BoltzmannPolicy, importance_ratios

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "BoltzmannPolicy",
    "ConfigError",
    "DASHED",
    "ExperimentConfig",
    "FeatureMap",
    "GQ",
    "GradCheckReport",
    "MetricRow",
    "MetricSeries",
    "NumericalError",
    "ObjectiveWorkspace",
    "PGQ",
    "PGQDerived",
    "PgqError",
    "QLearning",
    "SOLID",
    "StateActionDistribution",
    "TabularMdp",
    "TransitionSample",
    "build_baird_star",
    "build_random_mdp",
    "grad_check",
    "importance_ratios",
    "make_learner",
    "onehot_features",
    "read_csv",
    "run_rng",
    "run_sampled",
    "run_trajectory",
    "sample_transition",
    "state_action_transition_matrix",
    "stationary_distribution",
    "td_error",
    "w_update",
    "write_csv",
]
