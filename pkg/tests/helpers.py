"""Independent oracles used across the test suite.

These deliberately avoid the production masking/apply code paths: actions are
materialized as raw arrays and judged by the definition-level validator, so
they can serve as ground truth for the feasibility engine.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from moldesign.molgraph import (
    AddAtom,
    AddBond,
    Molecule,
    check_structural_constraints,
    random_rollout,
    validate_graph,
)


def materialize(m: Molecule, action):
    """Result arrays (atoms, bonds) of an action, with no validity checks."""
    n = m.n_atoms
    if isinstance(action, AddAtom):
        atoms = np.append(m.atoms, action.atom_type)
        bonds = np.zeros((n + 1, n + 1), dtype=np.int64)
        bonds[:n, :n] = m.bonds
        bonds[n, action.attach_to] = bonds[action.attach_to, n] = action.order
    else:
        atoms = m.atoms.copy()
        bonds = m.bonds.copy()
        bonds[action.first, action.second] = action.order
        bonds[action.second, action.first] = action.order
    return atoms, bonds


def action_is_valid(m: Molecule, constraints, action) -> bool:
    """Ground-truth feasibility: materialize, then validate from definitions."""
    if isinstance(action, AddBond):
        if action.first == action.second:
            return False
        if m.bonds[action.first, action.second] != 0:
            return False
    atoms, bonds = materialize(m, action)
    if len(atoms) > constraints.max_atoms:
        return False
    if validate_graph(m.alphabet, atoms, bonds):
        return False
    n0 = m.n_atoms
    for i in constraints.frozen_atoms:
        if atoms[i] != m.atoms[i]:
            return False
        if not np.array_equal(bonds[i, :n0], m.bonds[i]) or bonds[i, n0:].any():
            return False
    result = Molecule(m.alphabet, atoms, bonds, _validate=False)
    return check_structural_constraints(result, constraints)[0]


def _orders(m):
    return range(1, m.alphabet.max_bond_order + 1)


def brute_feasible0(m: Molecule, constraints) -> list:
    k = len(m.alphabet)
    n = m.n_atoms
    out = {0}
    for t in range(k):
        if any(
            action_is_valid(m, constraints, AddAtom(t, l, o))
            for l in range(n)
            for o in _orders(m)
        ):
            out.add(1 + t)
    for j in range(n):
        if any(
            action_is_valid(m, constraints, AddBond(j, l, o))
            for l in range(n)
            if l != j
            for o in _orders(m)
        ):
            out.add(1 + k + j)
    return sorted(out)


def brute_feasible1(m: Molecule, constraints, state) -> list:
    n = m.n_atoms
    if state.new_atom_type is not None:
        t = state.new_atom_type
        return [
            l for l in range(n)
            if any(action_is_valid(m, constraints, AddAtom(t, l, o)) for o in _orders(m))
        ]
    j = state.first_atom
    return [
        l for l in range(n)
        if l != j
        and any(action_is_valid(m, constraints, AddBond(j, l, o)) for o in _orders(m))
    ]


def brute_feasible2(m: Molecule, constraints, state) -> list:
    l = state.second_atom
    if state.new_atom_type is not None:
        action = lambda o: AddAtom(state.new_atom_type, l, o)
    else:
        action = lambda o: AddBond(state.first_atom, l, o)
    return [o for o in _orders(m) if action_is_valid(m, constraints, action(o))]


def brute_isomorphic(a: Molecule, b: Molecule) -> bool:
    """Exhaustive permutation search; only for tiny molecules."""
    n = a.n_atoms
    if n != b.n_atoms:
        return False
    ta = [int(x) for x in a.atoms]
    tb = [int(x) for x in b.atoms]
    if sorted(ta) != sorted(tb):
        return False
    for perm in itertools.permutations(range(n)):
        if any(ta[i] != tb[perm[i]] for i in range(n)):
            continue
        if all(
            a.bonds[i, j] == b.bonds[perm[i], perm[j]]
            for i in range(n)
            for j in range(i + 1, n)
        ):
            return True
    return False


def permuted(m: Molecule, perm) -> Molecule:
    """Relabel atoms: new index p holds old atom perm[p]."""
    perm = list(perm)
    n = m.n_atoms
    atoms = [int(m.atoms[perm[p]]) for p in range(n)]
    bonds = np.zeros((n, n), dtype=np.int64)
    for p in range(n):
        for q in range(n):
            bonds[p, q] = m.bonds[perm[p], perm[q]]
    return Molecule(m.alphabet, atoms, bonds)


def random_molecules(alphabet, constraints, rng: random.Random, count: int,
                     min_atoms: int = 1) -> list:
    mols = []
    while len(mols) < count:
        m = random_rollout(alphabet, constraints, rng)
        if m.n_atoms >= min_atoms:
            mols.append(m)
    return mols
