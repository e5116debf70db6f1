"""Finite tree forcing conditions.

Level-structured trees with ordinal labels, indexed families of standard
partial maps, rho-separation, and the constructive extension and
amalgamation operations of the condition poset.
"""

from .forcing import (
    Condition,
    MatchedPair,
    add_index,
    amalgamate,
    augment,
    bijectivize_cone,
    bijectivize_level,
    build_matched_pair,
    extend_heights,
    fan_out_condition,
    grow_node,
    hausdorffize,
    leq,
    lift_with_support,
    normalize_condition,
    strong_ad_containment,
    validate_condition,
    validate_matched_pair,
    widen_node,
)
from .ordinals import Ordinal, parse_ordinal
from .separation import (
    Loop,
    PairwiseViolation,
    RhoOracle,
    WitnessOrder,
    decide_rho_separation,
    decide_separation,
    is_consistent,
    one_key_lift,
)
from .treemaps import TreeMap, agreement_pairs, classify_map, tensor_downward_closure
from .trees import StandardTree, validate_tree

__all__ = [
    "Condition",
    "Loop",
    "MatchedPair",
    "Ordinal",
    "PairwiseViolation",
    "RhoOracle",
    "StandardTree",
    "TreeMap",
    "WitnessOrder",
    "add_index",
    "agreement_pairs",
    "amalgamate",
    "augment",
    "bijectivize_cone",
    "bijectivize_level",
    "build_matched_pair",
    "classify_map",
    "decide_rho_separation",
    "decide_separation",
    "extend_heights",
    "fan_out_condition",
    "grow_node",
    "hausdorffize",
    "is_consistent",
    "leq",
    "lift_with_support",
    "normalize_condition",
    "one_key_lift",
    "parse_ordinal",
    "strong_ad_containment",
    "tensor_downward_closure",
    "validate_condition",
    "validate_matched_pair",
    "validate_tree",
    "widen_node",
]
