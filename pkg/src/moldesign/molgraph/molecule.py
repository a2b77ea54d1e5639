"""Molecular graphs and the edit actions that build them.

A molecule is a hydrogen-suppressed graph: an atom-type vector indexing into
an :class:`~moldesign.alphabet.Alphabet` and a symmetric bond-order matrix.
Implicit hydrogens are whatever valence capacity the explicit bonds leave
unused. Atom indices are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..alphabet import Alphabet
from ..errors import InfeasibleAction


@dataclass(frozen=True)
class DontChange:
    """Terminate the design; the molecule is complete."""


@dataclass(frozen=True)
class AddAtom:
    """Append a new atom of type `atom_type` bonded to `attach_to` with `order`."""

    atom_type: int
    attach_to: int
    order: int


@dataclass(frozen=True)
class AddBond:
    """Bond two existing, currently unbonded atoms with `order`."""

    first: int
    second: int
    order: int


Action = Union[DontChange, AddAtom, AddBond]

DONT_CHANGE = DontChange()


class Molecule:
    """Immutable molecular graph.

    Parameters
    ----------
    alphabet : Alphabet
        Atom-type table the `atoms` entries index into.
    atoms : array-like of int, shape (n,)
        Alphabet index of each atom.
    bonds : array-like of int, shape (n, n)
        Symmetric bond-order matrix with zero diagonal.
    """

    __slots__ = ("alphabet", "atoms", "bonds", "_key")

    def __init__(self, alphabet: Alphabet, atoms, bonds, _validate: bool = True):
        atoms = np.asarray(atoms, dtype=np.int64)
        bonds = np.asarray(bonds, dtype=np.int64)
        if _validate:
            problems = validate_graph(alphabet, atoms, bonds)
            if problems:
                raise ValueError("invalid molecule: " + "; ".join(problems))
        atoms.setflags(write=False)
        bonds.setflags(write=False)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "bonds", bonds)
        object.__setattr__(self, "_key", None)

    def __setattr__(self, name, value):
        raise AttributeError("Molecule is immutable")

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    def spec(self, i: int):
        """AtomSpec of atom i."""
        return self.alphabet[int(self.atoms[i])]

    def degree(self, i: int) -> int:
        """Total bond order at atom i (non-hydrogen)."""
        return int(self.bonds[i].sum())

    def degrees(self) -> np.ndarray:
        return self.bonds.sum(axis=1)

    def neighbors(self, i: int) -> np.ndarray:
        return np.nonzero(self.bonds[i])[0]

    @staticmethod
    def single_atom(alphabet: Alphabet, atom_type: int) -> "Molecule":
        return Molecule(alphabet, [atom_type], [[0]], _validate=False)

    def __eq__(self, other):
        return (
            isinstance(other, Molecule)
            and self.alphabet == other.alphabet
            and np.array_equal(self.atoms, other.atoms)
            and np.array_equal(self.bonds, other.bonds)
        )

    def __hash__(self):
        return hash((self.atoms.tobytes(), self.bonds.tobytes()))

    def __repr__(self):
        symbols = ",".join(self.alphabet[int(t)].symbol for t in self.atoms)
        return f"Molecule([{symbols}], {int(np.count_nonzero(self.bonds)) // 2} bonds)"


def valence_slack(m: Molecule, i: int) -> int:
    """Remaining bond capacity of atom i, i.e. its implicit hydrogen count."""
    return m.spec(i).valence - m.degree(i)


def validate_graph(alphabet: Alphabet, atoms: np.ndarray, bonds: np.ndarray) -> list[str]:
    """Check all molecule invariants directly from the definitions.

    Returns a list of human-readable violations, empty when the graph is a
    valid molecule. Kept free of any masking-engine logic so it can serve as
    an independent validator in tests.
    """
    problems = []
    n = len(atoms)
    if bonds.shape != (n, n):
        return [f"bond matrix shape {bonds.shape} does not match {n} atoms"]
    if n == 0:
        return ["molecule must have at least one atom"]
    if np.any(atoms < 0) or np.any(atoms >= len(alphabet)):
        problems.append("atom type index out of alphabet range")
        return problems
    if np.any(bonds < 0):
        problems.append("negative bond order")
    if np.any(np.diag(bonds) != 0):
        problems.append("nonzero diagonal (self-bond)")
    if not np.array_equal(bonds, bonds.T):
        problems.append("bond matrix not symmetric")
    for i in range(n):
        total = int(bonds[i].sum())
        valence = alphabet[int(atoms[i])].valence
        if total > valence:
            problems.append(
                f"atom {i} ({alphabet[int(atoms[i])].symbol}) exceeds valence: {total} > {valence}"
            )
    if n >= 2:
        # connectivity via BFS over nonzero bonds
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in np.nonzero(bonds[u])[0]:
                v = int(v)
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != n:
            problems.append("graph is disconnected")
    return problems


def apply_action(m: Molecule, action: Action, constraints=None) -> Molecule:
    """Apply one edit action and return the resulting molecule.

    The action must already have passed the feasibility mask; this function
    re-checks the cheap validity conditions (valence, duplicate bonds, index
    ranges) and raises :class:`InfeasibleAction` on violation, which signals
    a caller bug. When `constraints` is given, structural constraints and
    frozen atoms are re-checked as well.
    """
    if isinstance(action, DontChange):
        return m

    n = m.n_atoms
    if isinstance(action, AddAtom):
        j, l, o = action.atom_type, action.attach_to, action.order
        if not (0 <= j < len(m.alphabet)) or not (0 <= l < n):
            raise InfeasibleAction(f"index out of range: {action}")
        if o < 1 or o > m.alphabet.max_bond_order:
            raise InfeasibleAction(f"bond order out of range: {action}")
        if valence_slack(m, l) < o:
            raise InfeasibleAction(f"attach atom {l} lacks capacity for order {o}")
        if m.alphabet[j].valence < o:
            raise InfeasibleAction(f"new atom type {j} lacks capacity for order {o}")
        atoms = np.append(m.atoms, j)
        bonds = np.zeros((n + 1, n + 1), dtype=np.int64)
        bonds[:n, :n] = m.bonds
        bonds[n, l] = bonds[l, n] = o
        touched = (l, n)
    elif isinstance(action, AddBond):
        j, l, o = action.first, action.second, action.order
        if not (0 <= j < n) or not (0 <= l < n) or j == l:
            raise InfeasibleAction(f"bad atom pair: {action}")
        if o < 1 or o > m.alphabet.max_bond_order:
            raise InfeasibleAction(f"bond order out of range: {action}")
        if m.bonds[j, l] != 0:
            raise InfeasibleAction(f"atoms {j},{l} already bonded")
        if valence_slack(m, j) < o or valence_slack(m, l) < o:
            raise InfeasibleAction(f"valence exceeded by {action}")
        atoms = m.atoms.copy()
        bonds = m.bonds.copy()
        bonds[j, l] = bonds[l, j] = o
        touched = (j, l)
    else:
        raise TypeError(f"unknown action {action!r}")

    result = Molecule(m.alphabet, atoms, bonds, _validate=False)
    if constraints is not None:
        from .constraints import check_action_constraints

        violation = check_action_constraints(result, constraints, touched)
        if violation is not None:
            raise InfeasibleAction(violation)
    return result
