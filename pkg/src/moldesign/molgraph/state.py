"""Mutable molecule-under-construction with the feasible-action engine.

A design proceeds in sub-action levels:

* level 0 -- stop, pick a new atom type (AddAtom), or pick an existing
  atom (AddBond first endpoint);
* level 1 -- pick the second atom;
* level 2 -- pick the bond order, which mutates the graph.

Level-0 choices are encoded as ``0`` (stop), ``1 + t`` (new atom of type t),
``k + 1 + j`` (existing atom j). Level-1 choices are atom indices, level-2
choices are bond orders starting at 1.

Feasibility uses full lookahead: a choice is offered only if at least one
complete, constraint-satisfying action extends it. Stopping is always
feasible. All checks agree with brute-force enumeration over syntactic
actions followed by validation (see tests).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..alphabet import Alphabet
from ..errors import InfeasibleAction
from . import rings
from .constraints import Constraints, rule_forbids
from .molecule import Molecule


def to_logit_index(level: int, choice: int) -> int:
    """Map a sub-action choice to its position in that level's logits vector.
    Levels 0/1 align directly; level-2 orders are 1-based, logits 0-based."""
    return choice - 1 if level == 2 else choice


def from_logit_index(level: int, index: int) -> int:
    return index + 1 if level == 2 else index


@dataclass(frozen=True)
class ActionLevelState:
    """Cursor within one decomposed action."""

    level: int
    new_atom_type: Optional[int] = None
    first_atom: Optional[int] = None
    second_atom: Optional[int] = None

    def __post_init__(self):
        if self.level not in (0, 1, 2):
            raise ValueError("level must be 0, 1 or 2")
        if self.level >= 1 and (self.new_atom_type is None) == (self.first_atom is None):
            raise ValueError("levels 1/2 need exactly one of new_atom_type / first_atom")
        if (self.level == 2) != (self.second_atom is not None):
            raise ValueError("second_atom must be set exactly at level 2")


class DesignState:
    """Incremental graph builder shared by rollouts, search, and training."""

    __slots__ = (
        "alphabet", "constraints", "k", "y", "max_atoms", "type_valence",
        "atoms", "symbols", "valence", "slack", "bond", "adj", "frozen",
        "level", "pending_type", "first_atom", "second_atom", "done",
        "_pat", "_ring", "_allowed_rings", "_version", "_apsp", "_cache",
    )

    def __init__(self, alphabet: Alphabet, constraints: Constraints, atoms, bond_matrix):
        self.alphabet = alphabet
        self.constraints = constraints
        self.k = len(alphabet)
        self.y = alphabet.max_bond_order
        self.max_atoms = constraints.max_atoms
        self.type_valence = alphabet.valences()

        self.atoms = list(atoms)
        self.symbols = [alphabet[t].symbol for t in self.atoms]
        self.valence = [self.type_valence[t] for t in self.atoms]
        self.bond = [list(row) for row in bond_matrix]
        self.adj = [set(j for j, o in enumerate(row) if o) for row in self.bond]
        self.slack = [self.valence[i] - sum(self.bond[i]) for i in range(len(self.atoms))]
        self.frozen = constraints.frozen_atoms

        self.level = 0
        self.pending_type = None
        self.first_atom = None
        self.second_atom = None
        self.done = False

        self._pat = bool(constraints.forbidden_patterns)
        self._allowed_rings = constraints.allowed_ring_sizes
        self._ring = self._allowed_rings is not None
        self._version = 0
        self._apsp = None
        self._cache = {}

    # --- constructors / conversions ---

    @classmethod
    def from_molecule(cls, m: Molecule, constraints: Constraints) -> "DesignState":
        return cls(m.alphabet, constraints, [int(t) for t in m.atoms], m.bonds.tolist())

    def to_molecule(self) -> Molecule:
        n = len(self.atoms)
        bonds = np.zeros((n, n), dtype=np.int64)
        for i, row in enumerate(self.bond):
            bonds[i] = row
        return Molecule(self.alphabet, np.array(self.atoms, dtype=np.int64), bonds, _validate=False)

    def clone(self) -> "DesignState":
        new = object.__new__(DesignState)
        new.alphabet = self.alphabet
        new.constraints = self.constraints
        new.k = self.k
        new.y = self.y
        new.max_atoms = self.max_atoms
        new.type_valence = self.type_valence
        new.atoms = self.atoms.copy()
        new.symbols = self.symbols.copy()
        new.valence = self.valence.copy()
        new.slack = self.slack.copy()
        new.bond = [row.copy() for row in self.bond]
        new.adj = [s.copy() for s in self.adj]
        new.frozen = self.frozen
        new.level = self.level
        new.pending_type = self.pending_type
        new.first_atom = self.first_atom
        new.second_atom = self.second_atom
        new.done = self.done
        new._pat = self._pat
        new._ring = self._ring
        new._allowed_rings = self._allowed_rings
        new._version = self._version
        new._apsp = self._apsp
        new._cache = self._cache  # shared until either side mutates
        return new

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    def level_state(self) -> ActionLevelState:
        return ActionLevelState(
            level=self.level,
            new_atom_type=self.pending_type,
            first_atom=self.first_atom,
            second_atom=self.second_atom,
        )

    def set_level_state(self, state: ActionLevelState) -> None:
        self.level = state.level
        self.pending_type = state.new_atom_type
        self.first_atom = state.first_atom
        self.second_atom = state.second_atom

    # --- feasibility ---

    def feasible_actions(self) -> list:
        if self.done:
            return []
        if self.level == 0:
            return self._feasible0()
        if self.level == 1:
            return self._feasible1()
        return self._feasible2()

    def _free_atoms(self) -> list:
        slack = self.slack
        if self.frozen:
            return [i for i in range(len(slack)) if slack[i] > 0 and i not in self.frozen]
        return [i for i in range(len(slack)) if slack[i] > 0]

    def _feasible0(self) -> list:
        out = [0]
        n = len(self.atoms)
        free = self._free_atoms()
        if n < self.max_atoms and free:
            if not self._pat:
                out.extend(range(1, self.k + 1))
            else:
                for t in range(self.k):
                    if any(self._attach_orders(t, l) for l in free):
                        out.append(1 + t)
        if len(free) >= 2:
            base = self.k + 1
            free_set = set(free)
            simple = not (self._ring or self._pat)
            for j in free:
                adj_j = self.adj[j]
                if simple:
                    others = len(free) - 1 - sum(1 for v in adj_j if v in free_set)
                    if others > 0:
                        out.append(base + j)
                else:
                    for l in free:
                        if l == j or l in adj_j:
                            continue
                        if self._bond_orders(j, l):
                            out.append(base + j)
                            break
        return out

    def _feasible1(self) -> list:
        free = self._free_atoms()
        if self.pending_type is not None:
            if len(self.atoms) >= self.max_atoms:
                return []  # out-of-contract cursor: level 0 enforces the cap
            if not self._pat:
                return free
            t = self.pending_type
            return [l for l in free if self._attach_orders(t, l)]
        j = self.first_atom
        # unreachable through the level-0 mask, but guard the public API
        if self.slack[j] < 1 or j in self.frozen:
            return []
        adj_j = self.adj[j]
        if not (self._ring or self._pat):
            return [l for l in free if l != j and l not in adj_j]
        return [l for l in free if l != j and l not in adj_j and self._bond_orders(j, l)]

    def _feasible2(self) -> list:
        l = self.second_atom
        if l in self.frozen:
            return []
        if self.pending_type is not None:
            if len(self.atoms) >= self.max_atoms:
                return []
            t = self.pending_type
            if not self._pat:
                return list(range(1, min(self.slack[l], self.type_valence[t], self.y) + 1))
            return list(self._attach_orders(t, l))
        j = self.first_atom
        if j == l or j in self.frozen or self.bond[j][l] != 0:
            return []
        if not (self._ring or self._pat):
            return list(range(1, min(self.slack[j], self.slack[l], self.y) + 1))
        return list(self._bond_orders(j, l))

    # --- completion checks (cached per graph version) ---

    def _attach_orders(self, t: int, l: int) -> tuple:
        """Valid bond orders for attaching a fresh atom of type t to atom l."""
        key = (0, t, l, self._version)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        hi = min(self.slack[l], self.type_valence[t], self.y)
        if hi < 1:
            orders = ()
        elif not self._pat:
            orders = tuple(range(1, hi + 1))
        else:
            sym_t = self.alphabet[t].symbol
            sym_l = self.symbols[l]
            pairs_l = self._neighbor_pairs(l)
            orders = tuple(
                o for o in range(1, hi + 1)
                if self._centers_ok((
                    (self.symbols[l], pairs_l + [(sym_t, o)], self.slack[l] - o),
                    (sym_t, [(sym_l, o)], self.type_valence[t] - o),
                ))
            )
        self._cache[key] = orders
        return orders

    def _bond_orders(self, j: int, l: int) -> tuple:
        """Valid bond orders for a new bond between existing atoms j and l."""
        if j > l:
            j, l = l, j
        key = (1, j, l, self._version)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self._ring and not self._ring_ok(j, l):
            orders = ()
        else:
            hi = min(self.slack[j], self.slack[l], self.y)
            if hi < 1:
                orders = ()
            elif not self._pat:
                orders = tuple(range(1, hi + 1))
            else:
                pairs_j = self._neighbor_pairs(j)
                pairs_l = self._neighbor_pairs(l)
                sym_j, sym_l = self.symbols[j], self.symbols[l]
                orders = tuple(
                    o for o in range(1, hi + 1)
                    if self._centers_ok((
                        (sym_j, pairs_j + [(sym_l, o)], self.slack[j] - o),
                        (sym_l, pairs_l + [(sym_j, o)], self.slack[l] - o),
                    ))
                )
        self._cache[key] = orders
        return orders

    def _neighbor_pairs(self, i: int) -> list:
        row = self.bond[i]
        return [(self.symbols[v], row[v]) for v in self.adj[i]]

    def _centers_ok(self, centers) -> bool:
        for symbol, pairs, slack in centers:
            for rule in self.constraints.forbidden_patterns:
                if rule_forbids(rule, symbol, pairs, slack):
                    return False
        return True

    def _distances(self):
        if self._apsp is None:
            self._apsp = rings.all_pairs_distances(len(self.atoms), self.adj)
        return self._apsp

    def _ring_ok(self, j: int, l: int) -> bool:
        key = (2, j, l, self._version)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        allowed = self._allowed_rings
        # Any decomposition of the augmented graph contains a ring of size
        # d(j,l)+1, so a disallowed size there is an exact rejection.
        d = self._distances()[j][l]
        if (d + 1) not in allowed:
            ok = False
        else:
            self.adj[j].add(l)
            self.adj[l].add(j)
            try:
                ok = all(s in allowed for s in rings.ring_sizes(len(self.atoms), self.adj))
            finally:
                self.adj[j].discard(l)
                self.adj[l].discard(j)
        self._cache[key] = ok
        return ok

    # --- transitions ---

    def step(self, choice: int, check: bool = False) -> None:
        """Apply one sub-action. With check=True the choice is validated
        against the feasible set first."""
        if self.done:
            raise InfeasibleAction("design already complete")
        if check and choice not in self.feasible_actions():
            raise InfeasibleAction(
                f"choice {choice} infeasible at level {self.level} (n={self.n_atoms})"
            )
        if self.level == 0:
            if choice == 0:
                self.done = True
            elif choice <= self.k:
                self.pending_type = choice - 1
                self.level = 1
            else:
                self.first_atom = choice - self.k - 1
                self.level = 1
        elif self.level == 1:
            self.second_atom = choice
            self.level = 2
        else:
            order = choice
            if self.pending_type is not None:
                self._add_atom(self.pending_type, self.second_atom, order)
            else:
                self._add_bond(self.first_atom, self.second_atom, order)
            self.level = 0
            self.pending_type = None
            self.first_atom = None
            self.second_atom = None

    def replay(self, subactions, check: bool = False) -> "DesignState":
        for choice in subactions:
            self.step(choice, check=check)
        return self

    def _add_atom(self, t: int, l: int, o: int) -> None:
        n = len(self.atoms)
        self.atoms.append(t)
        self.symbols.append(self.alphabet[t].symbol)
        v = self.type_valence[t]
        self.valence.append(v)
        self.slack.append(v - o)
        self.slack[l] -= o
        for row in self.bond:
            row.append(0)
        new_row = [0] * (n + 1)
        new_row[l] = o
        self.bond.append(new_row)
        self.bond[l][n] = o
        self.adj.append({l})
        self.adj[l].add(n)
        self._bump()

    def _add_bond(self, j: int, l: int, o: int) -> None:
        self.bond[j][l] = self.bond[l][j] = o
        self.adj[j].add(l)
        self.adj[l].add(j)
        self.slack[j] -= o
        self.slack[l] -= o
        self._bump()

    def _bump(self) -> None:
        self._version += 1
        self._apsp = None
        if self._cache:
            self._cache = {}

    # --- policy input ---

    def network_view(self) -> dict:
        """Arrays the policy network consumes. A pending new atom (chosen at
        level 0, not yet bonded) is appended as an extra node carrying the
        level-0 selection flag; q-logits cover only the first n_real atoms."""
        n = len(self.atoms)
        types = list(self.atoms)
        degrees = [self.valence[i] - self.slack[i] for i in range(n)]
        sel0 = None
        if self.pending_type is not None:
            types = types + [self.pending_type]
            degrees = degrees + [0]
            sel0 = n
        elif self.first_atom is not None:
            sel0 = self.first_atom
        return {
            "types": types,
            "degrees": degrees,
            "bond": [row[:] for row in self.bond],  # snapshot: views outlive the state
            "n_real": n,
            "level": self.level,
            "sel0": sel0,
            "sel1": self.second_atom,
        }
