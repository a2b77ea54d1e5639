"""Functional feasibility API over immutable molecules.

Thin wrappers around :class:`DesignState`; use the state directly for
rollouts and search, these for one-off queries and tests.
"""

from __future__ import annotations

from .constraints import Constraints
from .molecule import Molecule
from .state import ActionLevelState, DesignState


def encode_stop() -> int:
    return 0


def encode_new_atom(atom_type: int) -> int:
    return 1 + atom_type


def encode_existing_atom(j: int, alphabet_size: int) -> int:
    return 1 + alphabet_size + j


def decode_level0(choice: int, alphabet_size: int):
    """Decode a level-0 choice to ("stop",), ("new", atom_type) or ("old", atom_index)."""
    if choice == 0:
        return ("stop",)
    if choice <= alphabet_size:
        return ("new", choice - 1)
    return ("old", choice - alphabet_size - 1)


def feasible_level0(m: Molecule, constraints: Constraints) -> list:
    """Encoded level-0 choices with at least one valid completion.
    Stopping (0) is always feasible for a valid molecule."""
    return DesignState.from_molecule(m, constraints).feasible_actions()


def feasible_level1(m: Molecule, constraints: Constraints, state: ActionLevelState) -> list:
    if state.level != 1:
        raise ValueError("feasible_level1 requires a level-1 state")
    ds = DesignState.from_molecule(m, constraints)
    ds.set_level_state(state)
    return ds.feasible_actions()


def feasible_level2(m: Molecule, constraints: Constraints, state: ActionLevelState) -> list:
    if state.level != 2:
        raise ValueError("feasible_level2 requires a level-2 state")
    ds = DesignState.from_molecule(m, constraints)
    ds.set_level_state(state)
    return ds.feasible_actions()
