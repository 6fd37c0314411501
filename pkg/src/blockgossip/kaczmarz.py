"""Block randomized Kaczmarz solver for rectangular least-squares systems.

Handles rank-deficient and inconsistent systems: each step projects the
iterate onto the solution set of a randomly chosen row block via the
minimum-norm block solve ``x + pinv(A_tau) (b_tau - A_tau x)``.  The
convergence target is ``x* = (I - pinv(A) A) x0 + pinv(A) (b + e)`` with
``e`` the minimum-norm residual, the point the iterates actually approach.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .covering import CoveringConstants, RowCovering, validate


@dataclass(frozen=True)
class LinearSystem:
    """Dense least-squares problem ``min ||A x - b||^2``."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 2:
            raise ValueError(f"A must be a matrix, got shape {a.shape}")
        if b.ndim != 1 or b.size != a.shape[0]:
            raise ValueError(f"b length {b.shape} does not match {a.shape[0]} rows")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("system contains non-finite entries")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "b", b)

    @property
    def row_count(self) -> int:
        return self.A.shape[0]


@dataclass
class BKState:
    """Solver iterate: current point, iteration counter, optional generator."""

    x: np.ndarray
    iteration: int = 0
    rng: np.random.Generator | None = None


@dataclass
class BKTrajectory:
    """Recorded run: iterates, distance to the target, target, block draws."""

    xs: np.ndarray
    errors: np.ndarray
    x_star: np.ndarray
    block_ids: np.ndarray


def bk_step(
    state: BKState,
    system: LinearSystem,
    block: Sequence[int] | frozenset[int],
    rhs_override: np.ndarray | None = None,
) -> BKState:
    """One block projection ``x + pinv(A_tau) (b_tau - A_tau x)``.

    ``rhs_override`` replaces the system's right-hand side for this step
    (per-iteration noisy measurements).  The solve is restricted to the
    columns the block actually touches; the minimum-norm update is zero on
    every other coordinate.
    """
    rows = np.array(sorted(int(l) for l in block), dtype=np.intp)
    if rows.size == 0:
        raise ValueError("block is empty")
    if rows[0] < 0 or rows[-1] >= system.row_count:
        raise ValueError(f"block row id out of range [0, {system.row_count})")
    if rhs_override is not None:
        rhs = np.asarray(rhs_override, dtype=float)
        if rhs.shape != system.b.shape:
            raise ValueError(f"rhs_override shape {rhs.shape} != {system.b.shape}")
    else:
        rhs = system.b
    a_block = system.A[rows]
    residual = rhs[rows] - a_block @ state.x
    cols = np.flatnonzero(np.any(a_block != 0.0, axis=0))
    x_new = np.array(state.x, dtype=float, copy=True)
    if cols.size:
        x_new[cols] += linalg.min_norm_lstsq(a_block[:, cols], residual)
    return BKState(x=x_new, iteration=state.iteration + 1, rng=state.rng)


def solution_point(system: LinearSystem, x0: np.ndarray) -> np.ndarray:
    """Convergence target ``(I - pinv(A) A) x0 + pinv(A) (b + e*)``.

    With ``e*`` the minimum-norm residual this simplifies to
    ``x0 - pinv(A) (A x0 - b)``.
    """
    x0 = np.asarray(x0, dtype=float)
    return x0 - linalg.min_norm_lstsq(system.A, system.A @ x0 - system.b)


class _BlockSolver:
    """Per-block pieces of the projection, cached for repeated steps."""

    __slots__ = ("rows", "cols", "a_block", "pinv")

    def __init__(self, system: LinearSystem, block: frozenset[int]):
        self.rows = np.array(sorted(block), dtype=np.intp)
        a_block = system.A[self.rows]
        self.cols = np.flatnonzero(np.any(a_block != 0.0, axis=0))
        self.a_block = a_block[:, self.cols]
        self.pinv = linalg.pseudo_inverse(self.a_block)

    def apply(self, x: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        residual = rhs[self.rows] - self.a_block @ x[self.cols]
        out = x.copy()
        out[self.cols] += self.pinv @ residual
        return out


def bk_run(
    system: LinearSystem,
    covering: RowCovering,
    x0: np.ndarray,
    iters: int,
    seed: int,
    noise: Callable[[int], np.ndarray] | None = None,
    block_sequence: Sequence[int] | None = None,
) -> BKTrajectory:
    """Run the block Kaczmarz method with blocks drawn uniformly.

    ``noise``, when given, is called once per iteration with the iteration
    index and must return a full-length right-hand side to use for that step
    (own any randomness via a closure; the block-draw stream stays intact).
    ``block_sequence`` overrides the random draws, for paired comparisons.
    """
    if covering.edge_count != system.row_count:
        raise ValueError("covering row count does not match system")
    validate(covering)
    x = np.asarray(x0, dtype=float).copy()
    if x.ndim != 1 or x.size != system.A.shape[1]:
        raise ValueError(f"x0 length {x.shape} does not match {system.A.shape[1]} columns")
    x_star = solution_point(system, x)
    solvers: list[_BlockSolver | None] = [None] * covering.block_count
    rng = np.random.default_rng(seed)
    xs = np.empty((iters + 1, x.size))
    errors = np.empty(iters + 1)
    block_ids = np.empty(iters, dtype=np.intp)
    xs[0] = x
    errors[0] = np.linalg.norm(x - x_star)
    for k in range(iters):
        if block_sequence is not None:
            idx = int(block_sequence[k])
        else:
            idx = int(rng.integers(covering.block_count))
        solver = solvers[idx]
        if solver is None:
            solver = solvers[idx] = _BlockSolver(system, covering.blocks[idx])
        rhs = system.b if noise is None else np.asarray(noise(k), dtype=float)
        x = solver.apply(x, rhs)
        block_ids[k] = idx
        xs[k + 1] = x
        errors[k + 1] = np.linalg.norm(x - x_star)
    return BKTrajectory(xs=xs, errors=errors, x_star=x_star, block_ids=block_ids)


def theoretical_rate(consts: CoveringConstants, sigma_min_plus_sq: float) -> float:
    """Per-iteration contraction factor ``1 - r * sigma^2 / (beta * d)``.

    ``sigma_min_plus_sq`` is the squared smallest nonzero singular value of
    the full matrix.  A result materially outside [0, 1) means the inputs
    are mutually inconsistent (the covering constants cannot belong to that
    matrix), so it is rejected rather than clamped; eigensolver-level
    negatives (above -1e-12, e.g. an exact one-step covering) round to 0.
    """
    if sigma_min_plus_sq <= 0:
        raise ValueError("sigma_min_plus_sq must be positive")
    rate = 1.0 - consts.min_multiplicity * sigma_min_plus_sq / (consts.beta * consts.block_count)
    if not -1e-12 <= rate < 1.0:
        raise ValueError(f"rate {rate} outside [0, 1); inconsistent covering/spectrum inputs")
    return max(rate, 0.0)


def theoretical_horizon(
    consts: CoveringConstants, sigma_min_plus_sq: float, residual_sq_or_trace: float
) -> float:
    """Squared-error floor ``beta * R / (alpha * r * sigma^2)`` times the
    residual energy (``||e||^2`` for a fixed residual, ``tr(Sigma)`` for
    i.i.d. per-iteration noise)."""
    if sigma_min_plus_sq <= 0:
        raise ValueError("sigma_min_plus_sq must be positive")
    if residual_sq_or_trace < 0:
        raise ValueError("residual energy must be nonnegative")
    numerator = consts.beta * consts.max_multiplicity
    denominator = consts.alpha * consts.min_multiplicity * sigma_min_plus_sq
    return numerator / denominator * residual_sq_or_trace
