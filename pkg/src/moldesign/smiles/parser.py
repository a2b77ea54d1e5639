"""SMILES parsing for the supported dialect.

Supported: organic-subset atoms of the active alphabet, bracket atoms with
@/@@ chirality, explicit H counts and +/- charges, bond tokens ``- = #``,
branches, ring closures (``1``-``9`` and ``%nn``), and aromatic lowercase
input (``c n o s p`` plus ``[nH]``), which is kekulized to alternating
integer bond orders on parse. Rejected: dot-disconnection, isotopes,
directional bonds (``/ \\``), wedge stereo beyond @/@@, atom classes, and
wildcard atoms. Explicit bracket H counts are asserted against the implicit
hydrogen count of the final graph.
"""

from __future__ import annotations

import numpy as np

from ..alphabet import Alphabet
from ..errors import (
    KekulizationFailure,
    SmilesSyntaxError,
    UnsupportedAtom,
    ValenceViolation,
)
from ..molgraph import Molecule

ORGANIC_SUBSET = ("Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I")
AROMATIC_TOKENS = {"c": "C", "n": "N", "o": "O", "s": "S", "p": "P"}
BOND_ORDERS = {"-": 1, "=": 2, "#": 3}
AROMATIC_BOND = -1  # placeholder order until kekulization


class _Atom:
    __slots__ = ("element", "aromatic", "charge", "chiral", "hcount", "pos")

    def __init__(self, element, aromatic, charge, chiral, hcount, pos):
        self.element = element
        self.aromatic = aromatic
        self.charge = charge
        self.chiral = chiral
        self.hcount = hcount  # None: unspecified (organic subset)
        self.pos = pos


def _parse_bracket(s: str, start: int):
    """Parse a bracket atom starting at s[start] == '['. Returns (_Atom, end)."""
    i = start + 1
    n = len(s)
    if i < n and s[i].isdigit():
        raise SmilesSyntaxError("isotopes are not supported", i)
    element = None
    aromatic = False
    if i < n and s[i].isupper():
        element = s[i]
        i += 1
        if i < n and s[i].islower():
            element += s[i]
            i += 1
    elif i < n and s[i] in AROMATIC_TOKENS:
        element = AROMATIC_TOKENS[s[i]]
        aromatic = True
        i += 1
    else:
        raise SmilesSyntaxError("expected element symbol in bracket", i)
    chiral = "none"
    if s.startswith("@@", i):
        chiral = "ccw"
        i += 2
    elif s.startswith("@", i):
        chiral = "cw"
        i += 1
    hcount = 0
    if i < n and s[i] == "H":
        i += 1
        hcount = 1
        digits = ""
        while i < n and s[i].isdigit():
            digits += s[i]
            i += 1
        if digits:
            hcount = int(digits)
    charge = 0
    if i < n and s[i] in "+-":
        sign = 1 if s[i] == "+" else -1
        i += 1
        if i < n and s[i].isdigit():
            charge = sign * int(s[i])
            i += 1
        else:
            magnitude = 1
            while i < n and s[i] == ("+" if sign > 0 else "-"):
                magnitude += 1
                i += 1
            charge = sign * magnitude
    if i >= n or s[i] != "]":
        raise SmilesSyntaxError("unterminated or malformed bracket atom", i if i < n else n - 1)
    return _Atom(element, aromatic, charge, chiral, hcount, start), i + 1


def _kekulize(atoms, bond_orders):
    """Replace aromatic placeholder bonds with alternating single/double."""
    aromatic_atoms = [i for i, a in enumerate(atoms) if a.aromatic]
    arom_edges = {e for e, o in bond_orders.items() if o == AROMATIC_BOND}
    for (u, v) in arom_edges:
        if not (atoms[u].aromatic and atoms[v].aromatic):
            raise KekulizationFailure(
                f"aromatic bond to non-aromatic atom at position {atoms[v].pos}"
            )

    def needs_double(a: _Atom) -> bool:
        if a.charge != 0:
            raise KekulizationFailure(
                f"charged aromatic atom at position {a.pos} is outside the dialect"
            )
        if a.element == "C":
            return True
        if a.element == "N" or a.element == "P":
            return (a.hcount or 0) == 0
        if a.element in ("O", "S"):
            return False
        raise KekulizationFailure(f"cannot kekulize aromatic {a.element} at position {a.pos}")

    needy = [i for i in aromatic_atoms if needs_double(atoms[i])]
    neighbors = {i: [] for i in needy}
    needy_set = set(needy)
    for (u, v) in arom_edges:
        if u in needy_set and v in needy_set:
            neighbors[u].append(v)
            neighbors[v].append(u)

    matched = {}

    def match_all():
        unmatched = [i for i in needy if i not in matched]
        if not unmatched:
            return True
        pivot = min(unmatched, key=lambda i: sum(1 for j in neighbors[i] if j not in matched))
        for j in neighbors[pivot]:
            if j not in matched:
                matched[pivot] = j
                matched[j] = pivot
                if match_all():
                    return True
                del matched[pivot]
                del matched[j]
        return False

    if not match_all():
        pos = atoms[needy[0]].pos if needy else 0
        raise KekulizationFailure(f"no alternating bond assignment exists (near position {pos})")

    for (u, v) in arom_edges:
        bond_orders[(u, v)] = 2 if matched.get(u) == v else 1


def parse(s: str, alphabet: Alphabet) -> Molecule:
    """Parse a SMILES string into a molecule over `alphabet`."""
    if not s:
        raise SmilesSyntaxError("empty SMILES string", 0)
    atoms: list[_Atom] = []
    bond_orders: dict = {}
    ring_partial: dict = {}
    stack: list[int] = []
    prev = None
    pending_bond = None  # explicit order for the next bond
    pending_pos = 0
    i = 0
    n = len(s)

    def add_bond(u, v, order, pos):
        if u == v:
            raise SmilesSyntaxError("atom bonded to itself", pos)
        e = (u, v) if u < v else (v, u)
        if e in bond_orders:
            raise SmilesSyntaxError("duplicate bond between atoms", pos)
        if order is None:
            order = AROMATIC_BOND if (atoms[u].aromatic and atoms[v].aromatic) else 1
        bond_orders[e] = order

    def add_atom(atom: _Atom):
        nonlocal prev, pending_bond
        atoms.append(atom)
        idx = len(atoms) - 1
        if prev is not None:
            add_bond(prev, idx, pending_bond, atom.pos)
        elif pending_bond is not None:
            raise SmilesSyntaxError("bond with no preceding atom", pending_pos)
        prev = idx
        pending_bond = None

    while i < n:
        ch = s[i]
        if ch == "[":
            atom, i = _parse_bracket(s, i)
            add_atom(atom)
        elif s[i : i + 2] in ("Cl", "Br"):
            add_atom(_Atom(s[i : i + 2], False, 0, "none", None, i))
            i += 2
        elif ch in "BCNOPSFI":
            add_atom(_Atom(ch, False, 0, "none", None, i))
            i += 1
        elif ch in AROMATIC_TOKENS:
            add_atom(_Atom(AROMATIC_TOKENS[ch], True, 0, "none", None, i))
            i += 1
        elif ch in BOND_ORDERS:
            if pending_bond is not None:
                raise SmilesSyntaxError("two bond symbols in a row", i)
            pending_bond = BOND_ORDERS[ch]
            pending_pos = i
            i += 1
        elif ch == "(":
            if prev is None:
                raise SmilesSyntaxError("branch with no preceding atom", i)
            stack.append(prev)
            i += 1
        elif ch == ")":
            if not stack:
                raise SmilesSyntaxError("unmatched ')'", i)
            prev = stack.pop()
            i += 1
        elif ch.isdigit() or ch == "%":
            if prev is None:
                raise SmilesSyntaxError("ring closure with no preceding atom", i)
            if ch == "%":
                if i + 2 >= n or not (s[i + 1].isdigit() and s[i + 2].isdigit()):
                    raise SmilesSyntaxError("'%' must be followed by two digits", i)
                number = int(s[i + 1 : i + 3])
                i += 3
            else:
                number = int(ch)
                i += 1
            if number in ring_partial:
                other, other_order = ring_partial.pop(number)
                order = pending_bond
                if order is not None and other_order is not None and order != other_order:
                    raise SmilesSyntaxError(
                        f"conflicting orders on ring closure {number}", i - 1
                    )
                add_bond(other, prev, order if order is not None else other_order, i - 1)
            else:
                ring_partial[number] = (prev, pending_bond)
            pending_bond = None
        elif ch == ".":
            raise SmilesSyntaxError("disconnected structures ('.') are not supported", i)
        elif ch in "/\\":
            raise SmilesSyntaxError("directional bonds are not supported", i)
        else:
            raise SmilesSyntaxError(f"unexpected character {ch!r}", i)

    if stack:
        raise SmilesSyntaxError("unclosed branch", n - 1)
    if ring_partial:
        number = sorted(ring_partial)[0]
        raise SmilesSyntaxError(f"unclosed ring bond {number}", n - 1)
    if pending_bond is not None:
        raise SmilesSyntaxError("dangling bond symbol", pending_pos)

    _kekulize(atoms, bond_orders)

    type_indices = []
    for a in atoms:
        idx = alphabet.find(a.element, a.charge, a.chiral)
        if idx is None:
            raise UnsupportedAtom(
                f"atom {a.element}{'%+d' % a.charge if a.charge else ''} "
                f"(chirality {a.chiral}) at position {a.pos} is not in the alphabet"
            )
        type_indices.append(idx)

    count = len(atoms)
    matrix = np.zeros((count, count), dtype=np.int64)
    for (u, v), order in bond_orders.items():
        matrix[u, v] = matrix[v, u] = order

    for i_atom, a in enumerate(atoms):
        spec = alphabet[type_indices[i_atom]]
        slack = spec.valence - int(matrix[i_atom].sum())
        if slack < 0:
            raise ValenceViolation(
                f"atom at position {a.pos} carries {int(matrix[i_atom].sum())} bonds, "
                f"valence is {spec.valence}"
            )
        if a.hcount is not None and a.hcount != slack:
            raise ValenceViolation(
                f"bracket atom at position {a.pos} declares {a.hcount} hydrogens "
                f"but the graph implies {slack}"
            )

    return Molecule(alphabet, type_indices, matrix)
