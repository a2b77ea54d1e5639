"""Smallest-set-of-smallest-rings decomposition.

Candidate cycles are the shortest cycles through each edge; a basis is picked
greedily by increasing length with GF(2) independence over edge vectors. The
selection is deterministic: candidates are ordered by (length, edge tuple).
For the small, sparse graphs this package builds, the per-edge candidates are
sufficient in practice; a Horton-style fallback covers the remainder.
"""

from __future__ import annotations

from collections import deque


def bfs_distances(n: int, adj: list[set[int]], src: int) -> list[int]:
    """Hop distances from `src`; unreachable nodes get -1."""
    dist = [-1] * n
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = du
                queue.append(v)
    return dist


def all_pairs_distances(n: int, adj: list[set[int]]) -> list[list[int]]:
    return [bfs_distances(n, adj, s) for s in range(n)]


def _shortest_path_avoiding_edge(n, adj, u, v):
    """Shortest u->v path (vertex list) that does not use the edge (u, v).
    Neighbors are visited in index order so ties resolve canonically: the
    result depends on the graph, not on set construction history."""
    prev = [-1] * n
    prev[u] = u
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in sorted(adj[x]):
            if x == u and y == v:
                continue
            if prev[y] < 0:
                prev[y] = x
                if y == v:
                    path = [v]
                    while path[-1] != u:
                        path.append(prev[path[-1]])
                    path.reverse()
                    return path
                queue.append(y)
    return None


def _cycle_edge_set(cycle: list[int]) -> frozenset:
    edges = []
    for i, u in enumerate(cycle):
        v = cycle[(i + 1) % len(cycle)]
        edges.append((u, v) if u < v else (v, u))
    return frozenset(edges)


def _two_core(n: int, adj: list[set[int]]):
    """Iteratively strip degree-<=1 vertices. Cycles, and simple paths between
    vertices that lie on cycles, never enter the stripped appendages, so the
    decomposition over the core equals the one over the full graph."""
    degree = [len(a) for a in adj]
    removed = [False] * n
    stack = [v for v in range(n) if degree[v] <= 1]
    while stack:
        v = stack.pop()
        if removed[v]:
            continue
        removed[v] = True
        for u in adj[v]:
            if not removed[u]:
                degree[u] -= 1
                if degree[u] <= 1:
                    stack.append(u)
    core_adj = [
        set() if removed[v] else {u for u in adj[v] if not removed[u]}
        for v in range(n)
    ]
    return core_adj, removed


def sssr(n: int, adj: list[set[int]]) -> list[list[int]]:
    """Ring decomposition as vertex lists, sorted by (size, vertex tuple)."""
    m = sum(len(a) for a in adj) // 2
    n_components = 0
    seen = [False] * n
    for s in range(n):
        if not seen[s]:
            n_components += 1
            seen[s] = True
            stack = [s]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
    dim = m - n + n_components
    if dim <= 0:
        return []

    adj, _removed = _two_core(n, adj)
    edges = sorted((u, v) for u in range(n) for v in adj[u] if u < v)

    candidates = {}
    for (u, v) in edges:
        path = _shortest_path_avoiding_edge(n, adj, u, v)
        if path is not None:
            key = _cycle_edge_set(path)
            if key not in candidates:
                candidates[key] = path
    ordered = sorted(candidates.values(), key=lambda c: (len(c), tuple(c)))

    edge_bit = {e: 1 << i for i, e in enumerate(edges)}
    pivots: dict[int, int] = {}
    chosen: list[list[int]] = []

    def try_add(cycle):
        vec = 0
        for e in _cycle_edge_set(cycle):
            vec ^= edge_bit[e]
        while vec:
            h = vec.bit_length() - 1
            if h in pivots:
                vec ^= pivots[h]
            else:
                pivots[h] = vec
                chosen.append(cycle)
                return True
        return False

    for cycle in ordered:
        if try_add(cycle) and len(chosen) == dim:
            break

    if len(chosen) < dim:
        # Horton fallback: shortest path trees through every vertex
        extra = {}
        for r in range(n):
            if not adj[r]:
                continue
            prev = [-1] * n
            prev[r] = r
            queue = deque([r])
            while queue:
                x = queue.popleft()
                for y in sorted(adj[x]):
                    if prev[y] < 0:
                        prev[y] = x
                        queue.append(y)

            paths = {r: [r]}

            def path_to(t):
                p = paths.get(t)
                if p is None:
                    p = path_to(prev[t]) + []
                    p.insert(0, t)
                    paths[t] = p
                return p

            for (u, v) in edges:
                if prev[u] < 0 or prev[v] < 0:
                    continue
                pu, pv = path_to(u), path_to(v)
                if set(pu) & set(pv) != {r}:
                    continue
                cycle = pu[::-1] + pv[:-1]  # r..u then v..(node before r)
                if len(cycle) < 3:
                    continue
                key = _cycle_edge_set(cycle)
                if len(key) != len(cycle):
                    continue  # degenerate: reuses an edge
                if key not in candidates and key not in extra:
                    extra[key] = cycle
        for cycle in sorted(extra.values(), key=lambda c: (len(c), tuple(c))):
            if try_add(cycle) and len(chosen) == dim:
                break

    return sorted(chosen, key=lambda c: (len(c), tuple(sorted(c))))


def ring_sizes(n: int, adj: list[set[int]]) -> list[int]:
    return sorted(len(c) for c in sssr(n, adj))
