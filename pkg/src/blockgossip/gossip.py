"""Block gossip protocols for average consensus on graphs.

Each iteration activates one edge block; every connected component of the
activated subgraph averages its members' values.  Three communication
models are supported:

* ``Consistent`` — exact component averaging.
* ``ConstantEdgeError`` — a fixed per-edge miscommunication vector ``m``;
  the update becomes the block projection toward ``Q_tau c = m_tau``.
* ``VaryingEdgeError`` — fresh mean-zero Gaussian miscommunication drawn
  per iteration from a dedicated seeded stream.

The consistent update uses plain arithmetic averaging; the noisy updates
must use the projection form because averaging has no dependence on ``m``.
Both agree exactly when ``m = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from . import linalg
from .covering import CoveringConstants, RowCovering, validate
from .graph import Graph, algebraic_connectivity, connected_components, is_connected
from .kaczmarz import theoretical_horizon, theoretical_rate


@dataclass(frozen=True)
class ConsensusProblem:
    """A connected graph plus the nodes' initial secret values."""

    graph: Graph
    initial_values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.initial_values, dtype=float)
        if values.ndim != 1 or values.size != self.graph.node_count:
            raise ValueError(f"need one value per node, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("initial values contain non-finite entries")
        if not is_connected(self.graph):
            raise ValueError("consensus requires a connected graph")
        object.__setattr__(self, "initial_values", values)


@dataclass(frozen=True)
class Consistent:
    """Noise-free communication."""


@dataclass(frozen=True, eq=False)
class ConstantEdgeError:
    """Fixed per-edge miscommunication vector, one entry per edge."""

    m: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", np.asarray(self.m, dtype=float))


@dataclass(frozen=True, eq=False)
class VaryingEdgeError:
    """I.i.d. mean-zero Gaussian per-edge miscommunication, redrawn each
    iteration; ``std`` is a scalar or a per-edge array of standard
    deviations and ``seed`` feeds the dedicated noise stream."""

    std: float | np.ndarray
    seed: int


NoiseModel = Union[Consistent, ConstantEdgeError, VaryingEdgeError]


@dataclass
class GossipTrajectory:
    """Recorded run: per-iteration distance to consensus, the sampled block
    index per step, and (optionally) the full node-value history."""

    errors: np.ndarray
    block_ids: np.ndarray
    values: np.ndarray | None = None


def consensus_target(problem: ConsensusProblem) -> np.ndarray:
    """The constant vector every node should reach: mean of the secrets."""
    return np.full(problem.graph.node_count, problem.initial_values.mean())


class _BlockKernel:
    """Precomputed update machinery for one block.

    Component layout (for averaging) is always built; the projection pieces
    (local incidence and its pseudoinverse) are built lazily since only the
    noisy models need them.
    """

    __slots__ = ("graph", "block", "rows", "order", "offsets", "sizes", "touched", "_incidence", "_pinv")

    def __init__(self, graph: Graph, block: Iterable[int]):
        self.graph = graph
        self.block = frozenset(int(l) for l in block)
        if not self.block:
            raise ValueError("block is empty")
        self.rows = np.array(sorted(self.block), dtype=np.intp)
        comps = connected_components(graph, self.block)
        parts = [np.array(sorted(comp), dtype=np.intp) for comp in comps]
        self.order = np.concatenate(parts)
        self.sizes = np.array([p.size for p in parts], dtype=np.intp)
        self.offsets = np.concatenate(([0], np.cumsum(self.sizes)[:-1]))
        self.touched = np.sort(self.order)
        self._incidence = None
        self._pinv = None

    def average(self, values: np.ndarray) -> np.ndarray:
        """Exact component averaging; components already at a common value
        are left bit-for-bit untouched (the mean of equal numbers is that
        number), which makes consensus an exact fixed point."""
        vals = values[self.order]
        first = vals[self.offsets]
        constant = np.logical_and.reduceat(vals == np.repeat(first, self.sizes), self.offsets)
        means = np.where(constant, first, np.add.reduceat(vals, self.offsets) / self.sizes)
        out = values.copy()
        out[self.order] = np.repeat(means, self.sizes)
        return out

    def _projection_pieces(self) -> tuple[np.ndarray, np.ndarray]:
        if self._pinv is None:
            local = {int(node): idx for idx, node in enumerate(self.touched)}
            inc = np.zeros((self.rows.size, self.touched.size))
            for row, l in enumerate(self.rows):
                i, j = self.graph.edges[l]
                inc[row, local[i]] = 1.0
                inc[row, local[j]] = -1.0
            self._incidence = inc
            self._pinv = linalg.pseudo_inverse(inc)
        return self._incidence, self._pinv

    def project(self, values: np.ndarray, m: np.ndarray) -> np.ndarray:
        """Kaczmarz-style update toward ``Q_tau c = m_tau``."""
        inc, pinv = self._projection_pieces()
        residual = m[self.rows] - inc @ values[self.touched]
        out = values.copy()
        out[self.touched] += pinv @ residual
        return out


def gossip_step(values: np.ndarray, g: Graph, block: Iterable[int]) -> np.ndarray:
    """One consistent gossip step: every component of the activated subgraph
    averages; untouched nodes keep their values."""
    return _BlockKernel(g, block).average(np.asarray(values, dtype=float))


def gossip_step_noisy(
    values: np.ndarray, g: Graph, block: Iterable[int], m: np.ndarray
) -> np.ndarray:
    """One noisy gossip step toward ``Q_tau c = m_tau``; equals
    :func:`gossip_step` when ``m`` is zero."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 1 or m.size != g.edge_count:
        raise ValueError(f"need one miscommunication entry per edge, got shape {m.shape}")
    return _BlockKernel(g, block).project(np.asarray(values, dtype=float), m)


def _resolve_std(noise: VaryingEdgeError, edge_count: int) -> np.ndarray:
    std = np.broadcast_to(np.asarray(noise.std, dtype=float), (edge_count,))
    if np.any(std < 0):
        raise ValueError("standard deviations must be nonnegative")
    return np.array(std)


def run(
    problem: ConsensusProblem,
    covering: RowCovering,
    noise: NoiseModel,
    iters: int,
    seed: int,
    record_values: bool = False,
    block_sequence: Sequence[int] | None = None,
) -> GossipTrajectory:
    """Run block gossip for ``iters`` iterations, blocks drawn uniformly.

    Errors ``||c_k - c*||`` are recorded every iteration (index 0 is the
    initial state).  ``record_values`` additionally keeps the full node-value
    history.  ``block_sequence`` overrides the random block draws so runs can
    be paired against a Kaczmarz run or another protocol.

    The iteration tracks each node's deviation from the consensus value
    rather than the raw value.  Both updates commute exactly with the shift
    (incidence rows annihilate constant vectors), and the deviation form
    resolves the geometric decay far below the absolute rounding scale of
    the raw values.  Recorded node values and errors always come from the
    materialized float64 node values ``c_bar + delta``.
    """
    g = problem.graph
    if covering.edge_count != g.edge_count:
        raise ValueError("covering edge count does not match graph")
    if iters < 0:
        raise ValueError("iters must be >= 0")
    validate(covering)
    kernels: list[_BlockKernel | None] = [None] * covering.block_count
    c_bar = problem.initial_values.mean()
    delta = problem.initial_values - c_bar
    errors = np.empty(iters + 1)
    block_ids = np.empty(iters, dtype=np.intp)
    values = np.empty((iters + 1, g.node_count)) if record_values else None

    def materialized_deviation() -> np.ndarray:
        return (c_bar + delta) - c_bar

    errors[0] = np.linalg.norm(materialized_deviation())
    if values is not None:
        values[0] = c_bar + delta

    if isinstance(noise, ConstantEdgeError):
        m_fixed = noise.m
        if m_fixed.ndim != 1 or m_fixed.size != g.edge_count:
            raise ValueError(f"noise vector shape {m_fixed.shape} does not match {g.edge_count} edges")
    elif isinstance(noise, VaryingEdgeError):
        std = _resolve_std(noise, g.edge_count)
        noise_rng = np.random.default_rng(noise.seed)
    elif not isinstance(noise, Consistent):
        raise TypeError(f"unknown noise model {noise!r}")

    rng = np.random.default_rng(seed)
    for k in range(iters):
        if block_sequence is not None:
            idx = int(block_sequence[k])
        else:
            idx = int(rng.integers(covering.block_count))
        kernel = kernels[idx]
        if kernel is None:
            kernel = kernels[idx] = _BlockKernel(g, covering.blocks[idx])
        if isinstance(noise, Consistent):
            delta = kernel.average(delta)
        elif isinstance(noise, ConstantEdgeError):
            delta = kernel.project(delta, m_fixed)
        else:
            delta = kernel.project(delta, noise_rng.normal(0.0, std))
        block_ids[k] = idx
        errors[k + 1] = np.linalg.norm(materialized_deviation())
        if values is not None:
            values[k + 1] = c_bar + delta
    return GossipTrajectory(errors=errors, block_ids=block_ids, values=values)


def gossip_rate_bound(consts: CoveringConstants, g: Graph) -> float:
    """Per-iteration contraction bound ``1 - r * ac(G) / (beta * d)`` on the
    expected squared consensus error; ``ac`` is the algebraic connectivity."""
    return theoretical_rate(consts, algebraic_connectivity(g))


def gossip_rate_caps(consts: CoveringConstants, g: Graph) -> dict[str, float]:
    """Specialized rate caps by block structure.

    Keys: ``ies`` (blocks are matchings), ``path`` and ``clique`` (largest
    block of M edges, via the spanning-path spectrum), ``connected``
    (arbitrary connected blocks, via the spanning-tree size bound).  Each cap
    only applies to coverings whose blocks all have that structure.
    """
    ac = algebraic_connectivity(g)
    r = consts.min_multiplicity
    d = consts.block_count
    m_edges = consts.max_block_size
    path_beta = 2.0 - 2.0 * np.cos(m_edges * np.pi / (m_edges + 1))
    path_cap = 1.0 - r * ac / (path_beta * d)
    return {
        "ies": 1.0 - r * ac / (2.0 * d),
        "path": path_cap,
        "clique": path_cap,
        "connected": 1.0 - r * ac / (m_edges * d),
    }


def noise_energy(noise: NoiseModel, edge_count: int) -> float:
    """Residual energy entering the horizon: ``||m||^2`` for a constant
    error, ``tr(Sigma)`` for varying error, 0 when consistent."""
    if isinstance(noise, Consistent):
        return 0.0
    if isinstance(noise, ConstantEdgeError):
        return float(noise.m @ noise.m)
    if isinstance(noise, VaryingEdgeError):
        std = _resolve_std(noise, edge_count)
        return float(np.sum(std * std))
    raise TypeError(f"unknown noise model {noise!r}")


def gossip_horizon_bound(consts: CoveringConstants, g: Graph, noise: NoiseModel) -> float:
    """Squared-error convergence horizon for the given noise model; zero for
    consistent communication."""
    ac = algebraic_connectivity(g)
    energy = noise_energy(noise, g.edge_count)
    if energy == 0.0:
        return 0.0
    return theoretical_horizon(consts, ac, energy)
