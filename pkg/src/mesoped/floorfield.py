"""Navigation fields from value iteration over the permitted-move graph.

Every cell gets a sparse reward row over its permitted moves plus a self
loop; moves into a sink earn the sink's reward, everything else earns zero.
Synchronous sweeps of Q(i, j) = R(i, j) + gamma * max_k Q(j, k), with moves
into sinks treated as terminal, converge to a fixed point whose diagonal
Q(i, i) is the per-cell navigation value: agents climb it toward the sinks.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np

from .layout import Cell, LayoutGrid, ORTHOGONAL, DIR_VECTORS, moves_of

DEFAULT_GAMMA = 0.8
DEFAULT_BASE_REWARD = 100.0
DEFAULT_EPSILON = 1e-9


class Stuck(Exception):
    """Greedy descent reached a local maximum: the field is not a valid guide."""


class NotConvergedWarning(UserWarning):
    """Value iteration hit its sweep bound before the change fell below epsilon."""


@dataclass(frozen=True)
class RewardsMatrix:
    """CSR-encoded sparse rewards over (rows*cols) x (rows*cols) states.

    Row i lists the states reachable in one move from i plus the self loop;
    sink rows hold only their self loop, which makes sinks absorbing.
    """

    shape: tuple[int, int]
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    sink_mask: np.ndarray
    diag_pos: np.ndarray
    base_reward: float

    @property
    def n(self) -> int:
        return self.shape[0] * self.shape[1]

    def value(self, i: int, j: int) -> float | None:
        """Entry (i, j), or None when the move is not permitted."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        pos = lo + np.searchsorted(self.indices[lo:hi], j)
        if pos < hi and self.indices[pos] == j:
            return float(self.data[pos])
        return None


@dataclass(frozen=True)
class QMatrix:
    """Converged (or bounded-out) action values on the rewards sparsity pattern."""

    shape: tuple[int, int]
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    rewards: np.ndarray
    sink_mask: np.ndarray
    diag_pos: np.ndarray
    base_reward: float
    gamma: float
    epsilon: float
    converged: bool
    sweeps: int

    def value(self, i: int, j: int) -> float | None:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        pos = lo + np.searchsorted(self.indices[lo:hi], j)
        if pos < hi and self.indices[pos] == j:
            return float(self.data[pos])
        return None


@dataclass(frozen=True)
class FloorField:
    """Per-cell navigation values plus the parameters that produced them."""

    values: np.ndarray
    gamma: float
    base_reward: float
    epsilon: float
    sink_weights: tuple[tuple[Cell, float], ...]

    def value(self, cell: Cell) -> float:
        return float(self.values[cell])


def build_rewards(grid: LayoutGrid, base_reward: float = DEFAULT_BASE_REWARD) -> RewardsMatrix:
    """Sparse rewards: entry (i, j) exists iff j is reachable from i or j == i."""
    cols = grid.cols
    n = grid.rows * cols
    sink_w = {grid.index(cell): w for cell, w in grid.sinks}
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices: list[int] = []
    data: list[float] = []
    diag_pos = np.zeros(n, dtype=np.int64)
    for r in range(grid.rows):
        for c in range(cols):
            i = r * cols + c
            if i in sink_w:
                row = [i]
            else:
                row = sorted(
                    (r + DIR_VECTORS[d][0]) * cols + (c + DIR_VECTORS[d][1])
                    for d in moves_of(grid, (r, c))
                )
                row.append(i)
                row.sort()
            for j in row:
                if j == i:
                    diag_pos[i] = len(indices)
                indices.append(j)
                data.append(base_reward * sink_w[j] if j in sink_w else 0.0)
            indptr[i + 1] = len(indices)
    sink_mask = np.zeros(n, dtype=bool)
    for i in sink_w:
        sink_mask[i] = True
    return RewardsMatrix(
        shape=(grid.rows, grid.cols),
        indptr=indptr,
        indices=np.asarray(indices, dtype=np.int64),
        data=np.asarray(data, dtype=np.float64),
        sink_mask=sink_mask,
        diag_pos=diag_pos,
        base_reward=base_reward,
    )


def solve_q(rewards: RewardsMatrix, gamma: float = DEFAULT_GAMMA,
            epsilon: float = DEFAULT_EPSILON, max_sweeps: int | None = None) -> QMatrix:
    """Deterministic synchronous value iteration until the max change < epsilon.

    Moves whose destination is a sink use the reward alone (the walk ends
    there), so sink rows stay frozen at R and values stay bounded by
    base_reward times the largest sink weight.
    """
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    n = rewards.n
    if max_sweeps is None:
        max_sweeps = 10 * n
    q = rewards.data.copy()
    dst = rewards.indices
    bootstrap = ~rewards.sink_mask[dst]
    bootstrap_dst = dst[bootstrap]
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        v = np.maximum.reduceat(q, rewards.indptr[:-1])
        new = rewards.data.copy()
        new[bootstrap] += gamma * v[bootstrap_dst]
        delta = float(np.max(np.abs(new - q))) if n else 0.0
        q = new
        if delta < epsilon:
            converged = True
            break
    return QMatrix(
        shape=rewards.shape,
        indptr=rewards.indptr,
        indices=rewards.indices,
        data=q,
        rewards=rewards.data,
        sink_mask=rewards.sink_mask,
        diag_pos=rewards.diag_pos,
        base_reward=rewards.base_reward,
        gamma=gamma,
        epsilon=epsilon,
        converged=converged,
        sweeps=sweeps,
    )


def extract_field(q: QMatrix, grid: LayoutGrid) -> FloorField:
    """Diagonal of Q as a rows x cols field; warns when Q did not converge."""
    if not q.converged:
        warnings.warn(
            f"value iteration stopped after {q.sweeps} sweeps without converging",
            NotConvergedWarning,
            stacklevel=2,
        )
    values = q.data[q.diag_pos].reshape(q.shape).copy()
    return FloorField(
        values=values,
        gamma=q.gamma,
        base_reward=q.base_reward,
        epsilon=q.epsilon,
        sink_weights=grid.sinks,
    )


def compute_field(grid: LayoutGrid, gamma: float = DEFAULT_GAMMA,
                  base_reward: float = DEFAULT_BASE_REWARD,
                  epsilon: float = DEFAULT_EPSILON,
                  max_sweeps: int | None = None) -> FloorField:
    """Convenience wrapper: rewards, solve, extract in one call."""
    return extract_field(solve_q(build_rewards(grid, base_reward), gamma, epsilon, max_sweeps), grid)


def distance_field(grid: LayoutGrid) -> np.ndarray:
    """Hop distance to the nearest sink over permitted moves; inf if unreachable.

    Breadth-first from all sinks at once. Move permission is symmetric on a
    consistent grid, so expanding outward with each cell's own move list is
    equivalent to searching move-reversed edges.
    """
    dist = np.full((grid.rows, grid.cols), np.inf)
    queue: deque[Cell] = deque()
    for cell, _ in grid.sinks:
        dist[cell] = 0.0
        queue.append(cell)
    while queue:
        r, c = queue.popleft()
        d = dist[r, c] + 1.0
        for name in moves_of(grid, (r, c)):
            dr, dc = DIR_VECTORS[name]
            nxt = (r + dr, c + dc)
            if d < dist[nxt]:
                dist[nxt] = d
                queue.append(nxt)
    return dist


def greedy_descent(field: FloorField, grid: LayoutGrid, start: Cell) -> list[Cell]:
    """Follow the steepest field increase from `start` to a sink.

    Ties prefer orthogonal moves, then first in compass order; this mirrors
    the engine's preference except that the engine randomizes the final tie.
    Raises Stuck at a local maximum or when no sink is reached within
    rows*cols moves.
    """
    if not grid.in_bounds(start):
        raise Stuck(f"start {start} outside grid")
    sinks = grid.sink_set
    path = [start]
    cell = start
    for _ in range(grid.rows * grid.cols):
        if cell in sinks:
            return path
        best_name = None
        best_cell = None
        best_val = -np.inf
        r, c = cell
        for name in moves_of(grid, cell):
            dr, dc = DIR_VECTORS[name]
            nxt = (r + dr, c + dc)
            val = float(field.values[nxt])
            if val > best_val or (val == best_val
                                  and name in ORTHOGONAL
                                  and best_name not in ORTHOGONAL):
                best_name, best_cell, best_val = name, nxt, val
        if best_cell is None or best_val <= field.values[cell]:
            raise Stuck(f"no ascent from {cell}")
        cell = best_cell
        path.append(cell)
    raise Stuck(f"no sink within {grid.rows * grid.cols} moves from {start}")


def field_to_csv(field: FloorField) -> str:
    """Full-precision CSV, one line per grid row."""
    lines = [",".join(repr(float(v)) for v in row) for row in field.values]
    return "\n".join(lines) + "\n"
