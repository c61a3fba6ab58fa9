"""Markov chains on graded posets: up/down rules, compatibility, Bayesian
down-rule construction, and growth processes on Young's lattice and N^d."""

from .engine import (
    CompatibilityReport,
    DistributionSequence,
    LevelDistribution,
    apply_rule,
    check_compatibility,
    construct_down_rule,
    d_preimage,
    is_T_sequence,
    propagate,
    stationary_sequence,
    stationary_ud,
    ud_transition_matrix,
)
from .fixtures import fixture
from .poset import Direction, FinitePoset, TransitionRule, build_finite_poset, validate_rule
from .young import Partition, partitions_of

__all__ = [
    "CompatibilityReport",
    "Direction",
    "DistributionSequence",
    "FinitePoset",
    "LevelDistribution",
    "Partition",
    "TransitionRule",
    "apply_rule",
    "build_finite_poset",
    "check_compatibility",
    "construct_down_rule",
    "d_preimage",
    "fixture",
    "is_T_sequence",
    "partitions_of",
    "propagate",
    "stationary_sequence",
    "stationary_ud",
    "ud_transition_matrix",
    "validate_rule",
]
