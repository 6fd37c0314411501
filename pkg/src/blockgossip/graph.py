"""Undirected graphs: generators, incidence/Laplacian matrices, structure queries.

Nodes are integers ``0..n-1``.  Edges are pairs ``(i, j)`` with ``i < j`` and
every edge has a stable id equal to its position in the edge sequence, so the
rows of the incidence matrix are reproducible.  All generators emit edges in
ascending ``(i, j)`` order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from . import linalg

EdgeSubset = frozenset[int]


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph with stable edge ids.

    node_count: number of nodes ``n`` (nodes are ``0..n-1``).
    edges: sequence of unique pairs ``(i, j)`` with ``0 <= i < j < n``;
        the position of a pair is its edge id.
    """

    node_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise ValueError("node_count must be >= 1")
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        object.__setattr__(self, "edges", edges)
        seen: set[tuple[int, int]] = set()
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop ({i}, {j}) not allowed")
            if not (0 <= i < j < self.node_count):
                raise ValueError(f"edge ({i}, {j}) out of range or not i < j")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def adjacency_lists(self) -> list[list[int]]:
        """Sorted neighbor lists, one per node."""
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        for lst in adj:
            lst.sort()
        return adj

    def edge_id_map(self) -> dict[tuple[int, int], int]:
        """Map from ``(i, j)`` (with ``i < j``) to edge id."""
        return {edge: l for l, edge in enumerate(self.edges)}


def generate_erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p): each of the n(n-1)/2 pairs kept independently
    with probability p.  Identical (n, p, seed) gives identical graphs."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(n, k=1)
    mask = rng.random(rows.size) < p
    edges = tuple((int(i), int(j)) for i, j in zip(rows[mask], cols[mask]))
    return Graph(n, edges)


def generate_square_lattice(rows: int, cols: int) -> Graph:
    """Grid graph with rows*cols nodes, node (r, c) -> index r*cols + c."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    edges: list[tuple[int, int]] = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, tuple(edges))


def generate_complete(n: int) -> Graph:
    """Complete graph K_n with n(n-1)/2 edges."""
    if n < 1:
        raise ValueError("n must be >= 1")
    edges = tuple((i, j) for i in range(n) for j in range(i + 1, n))
    return Graph(n, edges)


def generate_path(n: int) -> Graph:
    """Path graph P_n with n-1 edges (0-1, 1-2, ...)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def incidence_matrix(g: Graph) -> np.ndarray:
    """Edge-node incidence matrix, shape (m, n), dtype int64.

    Row l for edge (i, j) carries +1 at column i and -1 at column j (the
    smaller endpoint gets the +1; a fixed orientation keeps rows reproducible).
    """
    q = np.zeros((g.edge_count, g.node_count), dtype=np.int64)
    for l, (i, j) in enumerate(g.edges):
        q[l, i] = 1
        q[l, j] = -1
    return q


def laplacian(g: Graph) -> np.ndarray:
    """Graph Laplacian L = D - A, dtype int64; equals Q^T Q entrywise."""
    lap = np.zeros((g.node_count, g.node_count), dtype=np.int64)
    for i, j in g.edges:
        lap[i, i] += 1
        lap[j, j] += 1
        lap[i, j] -= 1
        lap[j, i] -= 1
    return lap


def _check_subset(g: Graph, subset: Iterable[int]) -> list[int]:
    ids = sorted(int(l) for l in subset)
    for l in ids:
        if not 0 <= l < g.edge_count:
            raise ValueError(f"edge id {l} out of range [0, {g.edge_count})")
    return ids


def connected_components(g: Graph, subset: Iterable[int]) -> list[set[int]]:
    """Connected components of the edge-induced subgraph.

    Only nodes touched by a subset edge appear; components are ordered by
    their smallest node.
    """
    ids = _check_subset(g, subset)
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for l in ids:
        i, j = g.edges[l]
        parent.setdefault(i, i)
        parent.setdefault(j, j)
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    comps: dict[int, set[int]] = {}
    for node in parent:
        comps.setdefault(find(node), set()).add(node)
    return [comps[root] for root in sorted(comps)]


def spanning_forest(g: Graph, subset: Iterable[int]) -> EdgeSubset:
    """Depth-first spanning forest of the edge-induced subgraph.

    Each component is spanned by the DFS tree rooted at its smallest node,
    visiting smallest neighbors first, so the result is deterministic and the
    node partition is unchanged.  Depth-first trees keep the spectral cap of
    the reduced block tight: on a clique they are Hamiltonian paths, whose
    Laplacian tops out below 4, whereas breadth-first or arbitrary trees can
    degenerate into stars with the largest possible eigenvalue.
    """
    ids = _check_subset(g, subset)
    adj: dict[int, list[tuple[int, int]]] = {}
    for l in ids:
        i, j = g.edges[l]
        adj.setdefault(i, []).append((j, l))
        adj.setdefault(j, []).append((i, l))
    for lst in adj.values():
        lst.sort()
    visited: set[int] = set()
    kept: list[int] = []
    for start in sorted(adj):
        if start in visited:
            continue
        visited.add(start)
        stack = [(start, iter(adj[start]))]
        while stack:
            _, neighbors = stack[-1]
            for node, l in neighbors:
                if node not in visited:
                    visited.add(node)
                    kept.append(l)
                    stack.append((node, iter(adj[node])))
                    break
            else:
                stack.pop()
    return frozenset(kept)


def is_connected(g: Graph) -> bool:
    """True iff every pair of nodes is joined by a path (K_1 counts)."""
    if g.node_count == 1:
        return True
    if g.edge_count == 0:
        return False
    comps = connected_components(g, range(g.edge_count))
    return len(comps) == 1 and len(comps[0]) == g.node_count


def algebraic_connectivity(g: Graph) -> float:
    """Smallest nonzero Laplacian eigenvalue of a connected graph.

    Raises ValueError for disconnected graphs (the consensus protocol cannot
    mix across components) and for graphs with no nonzero eigenvalue (K_1).
    """
    if not is_connected(g):
        raise ValueError("algebraic connectivity requires a connected graph")
    if g.edge_count == 0:
        raise ValueError("graph has no edges; no nonzero Laplacian eigenvalue")
    eigs = linalg.symmetric_eigenvalues(laplacian(g).astype(float))
    return linalg.min_nonzero(eigs, float(np.abs(eigs).max()))


def save_graph(g: Graph, path: str | Path) -> None:
    """Write the plain-text edge list: header ``n m`` then one ``i j`` line
    per edge in id order."""
    lines = [f"{g.node_count} {g.edge_count}"]
    lines.extend(f"{i} {j}" for i, j in g.edges)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_graph(path: str | Path) -> Graph:
    """Read the edge-list format written by :func:`save_graph`."""
    tokens = Path(path).read_text(encoding="utf-8").split()
    if len(tokens) < 2:
        raise ValueError(f"{path}: missing 'n m' header")
    n, m = int(tokens[0]), int(tokens[1])
    if len(tokens) != 2 + 2 * m:
        raise ValueError(f"{path}: expected {m} edges, found {(len(tokens) - 2) // 2}")
    it = iter(tokens[2:])
    edges = tuple((int(a), int(b)) for a, b in zip(it, it))
    return Graph(n, edges)
