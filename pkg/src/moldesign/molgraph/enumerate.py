"""Exhaustive enumeration of reachable molecules. Test oracle; keep inputs tiny."""

from __future__ import annotations

from dataclasses import replace

from ..alphabet import Alphabet
from ..errors import BudgetExceeded
from .canon import canonical_key
from .constraints import Constraints, check_structural_constraints
from .molecule import Molecule
from .state import DesignState

MAX_ENUM_ATOMS = 6


def enumerate_molecules(
    alphabet: Alphabet,
    constraints: Constraints,
    max_n: int,
    state_cap: int = 500_000,
) -> dict:
    """All molecules reachable from single-atom starts, keyed by canonical key.

    Every reachable state is itself a complete valid molecule (stopping is
    always feasible), so the reachable-state set is the answer. States are
    deduplicated by canonical key during the search.
    """
    if max_n > MAX_ENUM_ATOMS:
        raise ValueError(f"enumeration is capped at {MAX_ENUM_ATOMS} atoms, got {max_n}")
    constraints = replace(constraints, max_atoms=min(constraints.max_atoms, max_n))

    found: dict = {}
    frontier: list = []
    for t in range(len(alphabet)):
        m = Molecule.single_atom(alphabet, t)
        if not check_structural_constraints(m, constraints)[0]:
            continue
        key = canonical_key(m)
        if key not in found:
            found[key] = m
            frontier.append(m)

    while frontier:
        m = frontier.pop()
        base = DesignState.from_molecule(m, constraints)
        for c in base.feasible_actions():
            if c == 0:
                continue
            s1 = base.clone()
            s1.step(c)
            for l in s1.feasible_actions():
                s2 = s1.clone()
                s2.step(l)
                for o in s2.feasible_actions():
                    s3 = s2.clone()
                    s3.step(o)
                    child = s3.to_molecule()
                    key = canonical_key(child)
                    if key not in found:
                        if len(found) >= state_cap:
                            raise BudgetExceeded(
                                f"enumeration exceeded state cap {state_cap}"
                            )
                        found[key] = child
                        frontier.append(child)
    return found


def enumerate_valid(alphabet: Alphabet, constraints: Constraints, max_n: int,
                    state_cap: int = 500_000) -> set:
    """Canonical keys of every reachable valid molecule (see enumerate_molecules)."""
    return set(enumerate_molecules(alphabet, constraints, max_n, state_cap))
