"""Random-policy rollouts: uniform over the feasible set at every level."""

from __future__ import annotations

import random
from typing import Optional

from ..alphabet import Alphabet
from .constraints import Constraints
from .molecule import Molecule
from .state import DesignState


def random_rollout(
    alphabet: Alphabet,
    constraints: Constraints,
    rng: random.Random,
    start: Optional[Molecule] = None,
    collect_trace: bool = False,
):
    """Roll one design to completion under the uniform random policy.

    Returns the final molecule, or (molecule, trace) with collect_trace,
    where trace is the flat list of sub-action choices ending in 0.
    """
    if start is None:
        t = rng.randrange(len(alphabet))
        state = DesignState(alphabet, constraints, [t], [[0]])
    else:
        state = DesignState.from_molecule(start, constraints)
    trace = [] if collect_trace else None
    while not state.done:
        feasible = state.feasible_actions()
        choice = feasible[rng.randrange(len(feasible))]
        if collect_trace:
            trace.append(choice)
        state.step(choice)
    mol = state.to_molecule()
    return (mol, trace) if collect_trace else mol
