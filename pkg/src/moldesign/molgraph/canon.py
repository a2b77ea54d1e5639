"""Isomorphism-invariant canonical keys for molecules.

Atoms are colored by type and refined iteratively by neighbor (order, color)
multisets. Remaining symmetry is broken exhaustively: the smallest
non-singleton color class is individualized vertex by vertex and the minimal
serialization over all resulting discrete colorings is the key. Two molecules
over the same alphabet get equal keys iff their bond-order graphs are
isomorphic with matching atom types.
"""

from __future__ import annotations

from .molecule import Molecule


def _refine(n, adj, bond, colors):
    while True:
        sigs = [
            (colors[i], tuple(sorted((bond[i][j], colors[j]) for j in adj[i])))
            for i in range(n)
        ]
        rank = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [rank[s] for s in sigs]
        if new == colors:
            return colors
        colors = new


def _serialize(n, atoms, bond, order):
    # order[p] = original index placed at position p
    out = bytearray()
    out.append(n)
    for i in order:
        out.append(atoms[i])
    for p in range(n):
        row = bond[order[p]]
        for q in range(p + 1, n):
            out.append(row[order[q]])
    return bytes(out)


def _search(n, atoms, adj, bond, colors):
    """Minimal (serialization, vertex order) over all symmetry-broken orderings."""
    classes = {}
    for i, c in enumerate(colors):
        classes.setdefault(c, []).append(i)
    split = None
    for c in sorted(classes):
        if len(classes[c]) > 1:
            split = classes[c]
            break
    if split is None:
        order = sorted(range(n), key=lambda i: colors[i])
        return _serialize(n, atoms, bond, order), order
    best = None
    for v in split:
        branched = [c * 2 for c in colors]
        branched[v] += 1  # color unique to v, splitting its class
        candidate = _search(n, atoms, adj, bond, _refine(n, adj, bond, branched))
        if best is None or candidate[0] < best[0]:
            best = candidate
    return best


def _canonicalize(m: Molecule):
    n = m.n_atoms
    atoms = [int(t) for t in m.atoms]
    bond = m.bonds.tolist()
    adj = [[j for j, o in enumerate(row) if o] for row in bond]
    colors = _refine(n, adj, bond, list(atoms))
    return _search(n, atoms, adj, bond, colors)


def canonical_key(m: Molecule) -> bytes:
    """Byte string equal for isomorphic molecules, distinct otherwise."""
    cached = m._key
    if cached is not None:
        return cached
    key, _ = _canonicalize(m)
    object.__setattr__(m, "_key", key)
    return key


def canonical_order(m: Molecule) -> list:
    """A vertex order realizing the canonical serialization (position -> index)."""
    key, order = _canonicalize(m)
    if m._key is None:
        object.__setattr__(m, "_key", key)
    return order


def isomorphic(a: Molecule, b: Molecule) -> bool:
    if a.n_atoms != b.n_atoms:
        return False
    return canonical_key(a) == canonical_key(b)
