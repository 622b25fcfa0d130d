"""Splittable-item bin packing with at most k parts per bin.

Exact-rational domain model, online next-fit, a two-stage k=2 algorithm,
an exhaustive oracle, structural packing rewrites and adversarial instance
generators.
"""

from .core import (
    BoundsReport,
    Instance,
    ItemClass,
    Packing,
    PackingGraph,
    Rational,
    classify,
    graph_of,
    item_weight,
    lower_bounds,
    parse_rational,
    validate_packing,
)
from .nextfit import CloseReason, NfTrace, check_block_inequality, next_fit
from .exact import (
    BudgetExceeded,
    FlowNetwork,
    IncidenceStructure,
    SearchBudget,
    exact_opt,
    feasible,
    feasible_in,
)
from .algo75 import A75Report, StepLabel, pack_75, split_2b
from .normalize import (
    bound_degrees,
    normalization_violations,
    normalize,
    remove_cycles,
    smalls_to_leaves,
)
from .generators import (
    gen_a75_worst,
    gen_from_3partition,
    gen_nf_worst,
    gen_random,
    three_partition_brute,
)

__all__ = [
    "A75Report",
    "BoundsReport",
    "BudgetExceeded",
    "CloseReason",
    "FlowNetwork",
    "IncidenceStructure",
    "Instance",
    "ItemClass",
    "NfTrace",
    "Packing",
    "PackingGraph",
    "Rational",
    "SearchBudget",
    "StepLabel",
    "check_block_inequality",
    "classify",
    "exact_opt",
    "feasible",
    "feasible_in",
    "gen_a75_worst",
    "gen_from_3partition",
    "gen_nf_worst",
    "gen_random",
    "graph_of",
    "item_weight",
    "lower_bounds",
    "next_fit",
    "normalization_violations",
    "normalize",
    "pack_75",
    "parse_rational",
    "remove_cycles",
    "smalls_to_leaves",
    "split_2b",
    "three_partition_brute",
    "validate_packing",
    "bound_degrees",
]
