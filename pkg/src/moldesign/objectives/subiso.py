"""Subgraph-isomorphic embedding counting for small patterns.

A pattern is a molecule (optionally with per-atom minimum implicit-hydrogen
requirements); embeddings are counted modulo pattern automorphisms by
deduplicating the matched node/edge images.
"""

from __future__ import annotations

from ..molgraph import Molecule, valence_slack


def count_embeddings(m: Molecule, pattern: Molecule, min_slack=None) -> int:
    """Number of distinct images of `pattern` in `m`.

    Matching requires equal atom types, equal bond orders on pattern edges,
    and, when `min_slack` is given, at least that much free valence on each
    matched atom. Matches are subgraph embeddings, not induced ones: bonds
    of `m` between matched atoms that the pattern leaves unbonded are fine.
    """
    np_, nm = pattern.n_atoms, m.n_atoms
    if np_ > nm:
        return 0
    if np_ > 8:
        raise ValueError("patterns are limited to 8 atoms")
    min_slack = min_slack or [0] * np_

    slack = [valence_slack(m, i) for i in range(nm)]
    images = set()
    assignment = [-1] * np_
    used = [False] * nm

    pat_neighbors = [
        [(int(j), int(pattern.bonds[i, j])) for j in pattern.neighbors(i)]
        for i in range(np_)
    ]

    def compatible(p, v):
        if int(pattern.atoms[p]) != int(m.atoms[v]):
            return False
        if slack[v] < min_slack[p]:
            return False
        for q, order in pat_neighbors[p]:
            w = assignment[q]
            if w >= 0 and int(m.bonds[v, w]) != order:
                return False
        return True

    def extend(p):
        if p == np_:
            nodes = frozenset(assignment)
            edges = frozenset(
                (min(assignment[i], assignment[j]), max(assignment[i], assignment[j]))
                for i in range(np_)
                for j, _ in pat_neighbors[i]
                if i < j
            )
            images.add((nodes, edges))
            return
        for v in range(nm):
            if not used[v] and compatible(p, v):
                assignment[p] = v
                used[v] = True
                extend(p + 1)
                assignment[p] = -1
                used[v] = False

    extend(0)
    return len(images)
