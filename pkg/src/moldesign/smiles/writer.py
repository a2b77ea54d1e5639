"""SMILES output. Atoms are emitted in canonical order, so the string is a
deterministic function of the molecular graph: isomorphic molecules write
identically. Charged or chiral atoms are bracketed with their hydrogen
count spelled out; everything else uses the organic subset."""

from __future__ import annotations

from ..errors import SmilesError
from ..molgraph import Molecule, canonical_order
from .parser import ORGANIC_SUBSET

_BOND_TOKEN = {1: "", 2: "=", 3: "#"}


def _atom_token(m: Molecule, i: int) -> str:
    spec = m.spec(i)
    hydrogens = spec.valence - m.degree(i)
    if spec.formal_charge == 0 and spec.chiral_tag == "none" and spec.element in ORGANIC_SUBSET:
        return spec.element
    token = spec.element
    if spec.chiral_tag == "cw":
        token += "@"
    elif spec.chiral_tag == "ccw":
        token += "@@"
    if hydrogens == 1:
        token += "H"
    elif hydrogens > 1:
        token += f"H{hydrogens}"
    if spec.formal_charge == 1:
        token += "+"
    elif spec.formal_charge == -1:
        token += "-"
    elif spec.formal_charge:
        token += f"{spec.formal_charge:+d}"
    return f"[{token}]"


def write(m: Molecule) -> str:
    """Serialize a molecule; parse(write(m)) is isomorphic to m."""
    n = m.n_atoms
    order = canonical_order(m)
    pos = {atom: p for p, atom in enumerate(order)}

    for i in range(n):
        row = m.bonds[i]
        if row.max(initial=0) > 3:
            raise SmilesError(f"bond order {int(row.max())} has no SMILES token")

    # classify edges with a DFS over canonical positions
    root = order[0]
    parent = {root: None}
    children: dict = {i: [] for i in range(n)}
    ring_edges = set()
    visited = {root}
    stack = [root]
    while stack:
        u = stack.pop()
        for v in sorted((int(x) for x in m.neighbors(u)), key=lambda x: pos[x], reverse=True):
            if v not in visited:
                visited.add(v)
                parent[v] = u
                children[u].append(v)
                stack.append(v)
            elif v != parent[u]:
                ring_edges.add((u, v) if u < v else (v, u))
    for u in children:
        children[u].sort(key=lambda v: pos[v])

    free_digits = list(range(1, 100))
    active: dict = {}  # open ring edge -> digit
    out = []

    def digit_token(d: int) -> str:
        return str(d) if d < 10 else f"%{d:02d}"

    def emit(u: int) -> None:
        token = ""
        if parent[u] is not None:
            token += _BOND_TOKEN[int(m.bonds[parent[u], u])]
        token += _atom_token(m, u)
        for v in sorted((int(x) for x in m.neighbors(u)), key=lambda x: pos[x]):
            e = (u, v) if u < v else (v, u)
            if e not in ring_edges:
                continue
            if e in active:
                d = active.pop(e)
                token += digit_token(d)
                free_digits.append(d)
                free_digits.sort()
            else:
                if not free_digits:
                    raise SmilesError("too many simultaneously open rings")
                d = free_digits.pop(0)
                active[e] = d
                token += _BOND_TOKEN[int(m.bonds[u, v])] + digit_token(d)
        out.append(token)
        kids = children[u]
        for idx, v in enumerate(kids):
            if idx < len(kids) - 1:
                out.append("(")
                emit(v)
                out.append(")")
            else:
                emit(v)

    emit(root)
    return "".join(out)
