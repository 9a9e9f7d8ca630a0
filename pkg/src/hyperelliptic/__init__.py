"""Recognition of hyperelliptic multigraphs.

Decides, for a finite multigraph, whether its divisorial gonality, stable
gonality, or stable divisorial gonality is at most 2, by running the safe and
complete reduction-rule system for the requested flavor.  Chip-firing
machinery provides the rule preconditions and independent brute-force
verification oracles.
"""
from .chipfiring import (
    apply_laplacian,
    constrained_suitable_exists,
    cycle_pair_equivalent,
    dgon_at_most_2,
    effective_equivalent,
    equivalent,
    fire_set,
    is_valid_firing,
    level_sets,
    rank_at_least_one,
    reduce_divisor,
    replay,
)
from .engine import (
    DGON,
    FLAVORS,
    SDGON,
    SGON,
    EngineError,
    ReductionStep,
    Verdict,
    default_order,
    replay_trace,
    rule_application_budget,
    run,
    step,
)
from .multigraph import ChainCycle, GraphError, Multigraph
from .treewidth2 import tw_at_most_2

__all__ = [
    "ChainCycle",
    "DGON",
    "EngineError",
    "FLAVORS",
    "GraphError",
    "Multigraph",
    "ReductionStep",
    "SDGON",
    "SGON",
    "Verdict",
    "apply_laplacian",
    "constrained_suitable_exists",
    "cycle_pair_equivalent",
    "default_order",
    "dgon_at_most_2",
    "effective_equivalent",
    "equivalent",
    "fire_set",
    "is_valid_firing",
    "level_sets",
    "rank_at_least_one",
    "reduce_divisor",
    "replay",
    "replay_trace",
    "rule_application_budget",
    "run",
    "step",
    "tw_at_most_2",
]

__version__ = "0.1.0"
