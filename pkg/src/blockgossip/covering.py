"""Row coverings of a graph's incidence matrix and their spectral constants.

A covering is a collection of edge-id blocks that together touch every edge.
Blocks may overlap (a partition is the special case with multiplicity one).
The constants extracted here drive every convergence bound in the package:
the per-block extreme eigenvalues of ``Q_tau Q_tau^T``, the block count, the
edge multiplicities, and the largest block size.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .graph import EdgeSubset, Graph, is_connected, spanning_forest


@dataclass(frozen=True)
class RowCovering:
    """Blocks of edge ids over a graph with ``edge_count`` edges.

    Construction does not enforce coverage; call :func:`validate`.  That
    keeps intermediate objects (e.g. spanning-forest reductions, which may
    drop edges) representable.
    """

    blocks: tuple[EdgeSubset, ...]
    edge_count: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(frozenset(b) for b in self.blocks))

    @property
    def block_count(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class CoveringConstants:
    """Spectral and combinatorial summary of a covering.

    alpha: min over blocks of the smallest nonzero eigenvalue of Q_tau Q_tau^T.
    beta: max over blocks of the largest eigenvalue of Q_tau Q_tau^T.
    min_multiplicity / max_multiplicity: fewest / most blocks any single edge
        appears in (1 <= min <= max <= block_count).
    max_block_size: largest number of edges in a block.
    """

    block_count: int
    alpha: float
    beta: float
    min_multiplicity: int
    max_multiplicity: int
    max_block_size: int


def validate(cov: RowCovering) -> None:
    """Raise ValueError unless every edge is covered and no block is empty."""
    for idx, block in enumerate(cov.blocks):
        if not block:
            raise ValueError(f"block {idx} is empty")
        for l in block:
            if not 0 <= l < cov.edge_count:
                raise ValueError(f"block {idx} has edge id {l} out of range [0, {cov.edge_count})")
    covered = np.zeros(cov.edge_count, dtype=bool)
    for block in cov.blocks:
        covered[list(block)] = True
    missing = np.flatnonzero(~covered)
    if missing.size:
        raise ValueError(f"edge {int(missing[0])} is not covered by any block")


def _block_laplacian(g: Graph, block: EdgeSubset) -> np.ndarray:
    """Laplacian of the edge-induced subgraph, on its touched nodes only."""
    touched = sorted({node for l in block for node in g.edges[l]})
    local = {node: idx for idx, node in enumerate(touched)}
    k = len(touched)
    lap = np.zeros((k, k), dtype=np.int64)
    for l in block:
        i, j = g.edges[l]
        a, b = local[i], local[j]
        lap[a, a] += 1
        lap[b, b] += 1
        lap[a, b] -= 1
        lap[b, a] -= 1
    return lap


def block_spectrum(g: Graph, block: EdgeSubset) -> np.ndarray:
    """Eigenvalues of the block Laplacian, ascending.

    ``Q_tau Q_tau^T`` has the same nonzero spectrum, so the extremes computed
    here are exactly the per-block covering constants.
    """
    return linalg.symmetric_eigenvalues(_block_laplacian(g, block).astype(float))


def multiplicities(cov: RowCovering) -> np.ndarray:
    """Number of blocks each edge appears in."""
    counts = np.zeros(cov.edge_count, dtype=np.int64)
    for block in cov.blocks:
        counts[list(block)] += 1
    return counts


def constants(cov: RowCovering, g: Graph) -> CoveringConstants:
    """Compute the covering constants for ``cov`` over ``g``'s incidence rows."""
    if cov.edge_count != g.edge_count:
        raise ValueError("covering edge count does not match graph")
    validate(cov)
    alpha = np.inf
    beta = 0.0
    for block in cov.blocks:
        eigs = block_spectrum(g, block)
        scale = float(np.abs(eigs).max())
        alpha = min(alpha, linalg.min_nonzero(eigs, scale))
        beta = max(beta, float(eigs[-1]))
    counts = multiplicities(cov)
    return CoveringConstants(
        block_count=cov.block_count,
        alpha=float(alpha),
        beta=beta,
        min_multiplicity=int(counts.min()),
        max_multiplicity=int(counts.max()),
        max_block_size=max(len(b) for b in cov.blocks),
    )


def greedy_ies_cover(g: Graph) -> RowCovering:
    """Partition the edges into independent edge sets (matchings).

    Repeatedly sweeps the remaining edges in ascending id order, greedily
    collecting a maximal matching, until no edges remain.  Every block is a
    matching, so each block's Gram matrix is exactly 2I.
    """
    if g.edge_count == 0:
        raise ValueError("graph has no edges")
    remaining = list(range(g.edge_count))
    blocks: list[frozenset[int]] = []
    while remaining:
        used_nodes: set[int] = set()
        block: list[int] = []
        leftover: list[int] = []
        for l in remaining:
            i, j = g.edges[l]
            if i in used_nodes or j in used_nodes:
                leftover.append(l)
            else:
                used_nodes.add(i)
                used_nodes.add(j)
                block.append(l)
        blocks.append(frozenset(block))
        remaining = leftover
    return RowCovering(tuple(blocks), g.edge_count)


def greedy_clique_cover(g: Graph) -> RowCovering:
    """Partition the edges into blocks whose edge-induced subgraphs are cliques.

    Each block is seeded at the lowest-id uncovered edge and grown by
    repeatedly adding the lowest-id node joined to every current member by an
    uncovered edge; the block then takes all pairwise edges of the grown node
    set.  A greedy heuristic, not exact maximum clique.
    """
    if g.edge_count == 0:
        raise ValueError("graph has no edges")
    edge_ids = g.edge_id_map()
    # adjacency restricted to not-yet-covered edges
    adj: list[set[int]] = [set() for _ in range(g.node_count)]
    for i, j in g.edges:
        adj[i].add(j)
        adj[j].add(i)
    blocks: list[frozenset[int]] = []
    for l in range(g.edge_count):
        i, j = g.edges[l]
        if j not in adj[i]:
            continue  # already covered
        members = [i, j]
        candidates = adj[i] & adj[j]
        while candidates:
            v = min(candidates)
            members.append(v)
            candidates &= adj[v]
        block: list[int] = []
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                u, v = members[a], members[b]
                block.append(edge_ids[(min(u, v), max(u, v))])
                adj[u].discard(v)
                adj[v].discard(u)
        blocks.append(frozenset(block))
    return RowCovering(tuple(blocks), g.edge_count)


def _patch_uncovered(blocks: list[frozenset[int]], edge_count: int) -> None:
    """Append a singleton block for every edge no block touches."""
    covered = np.zeros(edge_count, dtype=bool)
    for block in blocks:
        covered[list(block)] = True
    for l in np.flatnonzero(~covered):
        blocks.append(frozenset({int(l)}))


def random_path_cover(g: Graph, length: int, count: int, seed: int) -> RowCovering:
    """Blocks of self-avoiding random walks of up to ``length`` edges.

    Each walk starts at a uniformly random node and extends one uniformly
    random unvisited neighbor at a time; a walk that gets stuck early simply
    yields a shorter path block.  Singleton blocks are appended for any edge
    left uncovered, so the result always validates.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if count < 1:
        raise ValueError("count must be >= 1")
    if not is_connected(g) or g.edge_count == 0:
        raise ValueError("random path cover requires a connected graph with edges")
    rng = np.random.default_rng(seed)
    adj = g.adjacency_lists()
    edge_ids = g.edge_id_map()
    blocks: list[frozenset[int]] = []
    for _ in range(count):
        current = int(rng.integers(g.node_count))
        visited = {current}
        walk: list[int] = []
        for _ in range(length):
            options = [v for v in adj[current] if v not in visited]
            if not options:
                break
            nxt = options[int(rng.integers(len(options)))]
            walk.append(edge_ids[(min(current, nxt), max(current, nxt))])
            visited.add(nxt)
            current = nxt
        if walk:
            blocks.append(frozenset(walk))
    _patch_uncovered(blocks, g.edge_count)
    return RowCovering(tuple(blocks), g.edge_count)


def random_block_cover(g: Graph, size: int, count: int, seed: int) -> RowCovering:
    """Blocks of ``size`` distinct uniformly sampled edges, plus singleton
    patches for anything left uncovered."""
    if not 1 <= size <= g.edge_count:
        raise ValueError(f"size must lie in [1, {g.edge_count}]")
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    blocks: list[frozenset[int]] = []
    for _ in range(count):
        chosen = rng.choice(g.edge_count, size=size, replace=False)
        blocks.append(frozenset(int(l) for l in chosen))
    _patch_uncovered(blocks, g.edge_count)
    return RowCovering(tuple(blocks), g.edge_count)


def merge_disjoint(blocks: Sequence[Iterable[int]], g: Graph) -> EdgeSubset:
    """Union of blocks whose touched node sets are pairwise disjoint.

    The union's largest Gram eigenvalue is the max of the constituents'
    (the union Laplacian is the direct sum of the parts).
    """
    seen_nodes: set[int] = set()
    union: set[int] = set()
    for block in blocks:
        touched = {node for l in block for node in g.edges[l]}
        overlap = seen_nodes & touched
        if overlap:
            raise ValueError(f"blocks share node {min(overlap)}; they must be node-disjoint")
        seen_nodes |= touched
        union |= {int(l) for l in block}
    return frozenset(union)


def reduce_to_spanning_forests(cov: RowCovering, g: Graph) -> RowCovering:
    """Replace each block with its spanning forest.

    The gossip update is unchanged but the spectral cap beta can only drop.
    The result may no longer cover every edge: it exists for constants and
    equivalence checks, not for running as a covering (do not re-validate).
    """
    return RowCovering(tuple(spanning_forest(g, b) for b in cov.blocks), cov.edge_count)


def save_covering(cov: RowCovering, path: str | Path) -> None:
    """Write the plain-text format: header ``m d`` then one line of sorted
    edge ids per block."""
    lines = [f"{cov.edge_count} {cov.block_count}"]
    lines.extend(" ".join(str(l) for l in sorted(block)) for block in cov.blocks)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_covering(path: str | Path) -> RowCovering:
    """Read the format written by :func:`save_covering`."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: missing 'm d' header")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"{path}: malformed header {lines[0]!r}")
    m, d = int(header[0]), int(header[1])
    if len(lines) < 1 + d:
        raise ValueError(f"{path}: expected {d} block lines, found {len(lines) - 1}")
    blocks = tuple(frozenset(int(tok) for tok in lines[1 + idx].split()) for idx in range(d))
    return RowCovering(blocks, m)
