"""Shared oracle helpers.

Deliberately naive reimplementations (BFS flood fill, dense checks) used
to validate the fast library paths. Kept independent of the kernels they
check: no union-find, no bitmask tricks.
"""

from __future__ import annotations

import numpy as np


def bfs_labels(
    n: int,
    edges: np.ndarray,
    open_sites: np.ndarray,
    open_bonds: np.ndarray,
) -> np.ndarray:
    """Component labels of the open subgraph; a cluster is labeled by its
    smallest open vertex, closed sites get -1."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for idx in range(len(edges)):
        u, v = int(edges[idx, 0]), int(edges[idx, 1])
        if open_bonds[idx] and open_sites[u] and open_sites[v]:
            adj[u].append(v)
            adj[v].append(u)
    labels = np.full(n, -1, dtype=np.int64)
    for s in range(n):
        if not open_sites[s] or labels[s] >= 0:
            continue
        labels[s] = s
        queue = [s]
        while queue:
            cur = queue.pop()
            for nxt in adj[cur]:
                if labels[nxt] < 0:
                    labels[nxt] = s
                    queue.append(nxt)
    return labels


def random_open_masks(graph, p_site: float, p_bond: float, rng: np.random.Generator):
    """Bernoulli site and bond masks drawn from a plain numpy generator,
    independent of the package's stream layout."""
    open_sites = rng.random(graph.n_vertices) < p_site
    open_bonds = rng.random(graph.n_edges) < p_bond
    return open_sites, open_bonds


def adj_sets(edges) -> dict[int, set[int]]:
    out: dict[int, set[int]] = {}
    for u, v in np.asarray(edges).tolist():
        out.setdefault(u, set()).add(v)
        out.setdefault(v, set()).add(u)
    return out


def crossing_exists_bfs(graph, open_sites, open_bonds, axis: int) -> bool:
    """Direct flood fill from the low face of the axis to the high face."""
    from percrenorm.lattice import face

    labels = bfs_labels(graph.n_vertices, graph.edges, open_sites, open_bonds)
    low = face(graph, axis, "low").vertex_ids
    high = face(graph, axis, "high").vertex_ids
    lo_labels = {int(l) for l in labels[low] if l >= 0}
    return any(int(l) in lo_labels for l in labels[high] if l >= 0)
