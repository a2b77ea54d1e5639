"""Molecular graphs, edit actions, feasibility masking, and graph oracles."""

from .canon import canonical_key, canonical_order, isomorphic
from .constraints import (
    Constraints,
    PatternRule,
    bond_rule,
    check_structural_constraints,
    stability_pattern_rules,
)
from .enumerate import enumerate_molecules, enumerate_valid
from .masking import (
    decode_level0,
    encode_existing_atom,
    encode_new_atom,
    encode_stop,
    feasible_level0,
    feasible_level1,
    feasible_level2,
)
from .molecule import (
    DONT_CHANGE,
    Action,
    AddAtom,
    AddBond,
    DontChange,
    Molecule,
    apply_action,
    valence_slack,
    validate_graph,
)
from .rollout import random_rollout
from .state import ActionLevelState, DesignState

__all__ = [
    "Action", "ActionLevelState", "AddAtom", "AddBond", "Constraints",
    "DONT_CHANGE", "DesignState", "DontChange", "Molecule", "PatternRule",
    "apply_action", "bond_rule", "canonical_key", "canonical_order",
    "check_structural_constraints", "decode_level0", "encode_existing_atom",
    "encode_new_atom", "encode_stop", "enumerate_molecules", "enumerate_valid",
    "feasible_level0", "feasible_level1", "feasible_level2", "isomorphic",
    "random_rollout", "stability_pattern_rules", "valence_slack",
    "validate_graph",
]
