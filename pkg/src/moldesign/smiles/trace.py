"""Conversion between molecules and edit-action sequences.

A molecule maps to many action sequences; this picks one deterministically:
breadth-first spanning tree from atom 0 with lowest-index tie-break, atoms
added along tree edges, ring-closing bonds afterwards, then the stop action.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..errors import DisconnectedMolecule
from ..molgraph import (
    DONT_CHANGE,
    Action,
    AddAtom,
    AddBond,
    DontChange,
    Molecule,
    apply_action,
)


@dataclass(frozen=True)
class ActionTrace:
    """A starting atom plus the actions that grow it into a molecule."""

    initial: Molecule
    steps: tuple

    def __len__(self) -> int:
        return len(self.steps)


def to_action_trace(m: Molecule) -> ActionTrace:
    """Deterministic action sequence reconstructing a graph isomorphic to m."""
    n = m.n_atoms
    order = [0]
    parent = {0: None}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in sorted(int(x) for x in m.neighbors(u)):
            if v not in parent:
                parent[v] = u
                order.append(v)
                queue.append(v)
    if len(order) != n:
        raise DisconnectedMolecule(f"only {len(order)} of {n} atoms reachable from atom 0")

    new_index = {orig: i for i, orig in enumerate(order)}
    steps = []
    for orig in order[1:]:
        steps.append(
            AddAtom(
                atom_type=int(m.atoms[orig]),
                attach_to=new_index[parent[orig]],
                order=int(m.bonds[orig, parent[orig]]),
            )
        )
    ring_bonds = []
    for u in range(n):
        for v in (int(x) for x in m.neighbors(u)):
            if u < v and parent.get(v) != u and parent.get(u) != v:
                a, b = new_index[u], new_index[v]
                if a > b:
                    a, b = b, a
                ring_bonds.append((a, b, int(m.bonds[u, v])))
    for a, b, o in sorted(ring_bonds):
        steps.append(AddBond(first=a, second=b, order=o))
    steps.append(DONT_CHANGE)
    return ActionTrace(
        initial=Molecule.single_atom(m.alphabet, int(m.atoms[0])),
        steps=tuple(steps),
    )


def replay(trace: ActionTrace) -> Molecule:
    m = trace.initial
    for action in trace.steps:
        m = apply_action(m, action)
    return m


def encode_action(action: Action, alphabet_size: int) -> tuple:
    """Flatten one action into its sub-action choices (see DesignState)."""
    if isinstance(action, DontChange):
        return (0,)
    if isinstance(action, AddAtom):
        return (1 + action.atom_type, action.attach_to, action.order)
    if isinstance(action, AddBond):
        return (1 + alphabet_size + action.first, action.second, action.order)
    raise TypeError(f"unknown action {action!r}")


def to_subactions(trace: ActionTrace) -> list:
    """Flat sub-action choice list for a whole trace, ending with 0."""
    k = len(trace.initial.alphabet)
    out = []
    for action in trace.steps:
        out.extend(encode_action(action, k))
    return out
