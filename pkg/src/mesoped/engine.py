"""Discrete-time movement engine with density-coupled speeds and entry odds.

Agents dwell in a cell until the clock covers the cell diameter at the
density-dependent walking speed, then hop to the permitted neighbor with the
highest product of entry probability and navigation value. All decisions in
a step happen at the step's end-of-interval clock; an agent standing on a
sink is absorbed at the start of the following step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .layout import (Cell, DIR_VECTORS, LayoutGrid, ORTHOGONAL,
                     TOP, RIGHT, BOTTOM, LEFT, moves_of, side_open)
from .floorfield import FloorField

# Mean of the inscribed and circumscribed circle diameters of a square cell.
DIAMETER_FACTOR = (1.0 + math.sqrt(2.0)) / 2.0

EVENT_SPAWN = "spawn"
EVENT_MOVE = "move"
EVENT_STAY = "stay"
EVENT_EXIT = "exit"

Event = tuple[int, float, int, str, int, int]


class OutOfRange(Exception):
    """Speed-density lookup outside the table's density range."""


@dataclass(frozen=True)
class SpeedDensityTable:
    """Lookup rows of (density, speed m/s, entry probability).

    Densities count the agents already in the cell being evaluated. Both
    columns must be non-increasing and the final row must have entry
    probability zero, so a cell fills up before it jams solid.
    """

    entries: tuple[tuple[int, float, float], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("speed-density table is empty")
        for k, (d, u, p) in enumerate(self.entries):
            if d != k:
                raise ValueError(f"densities must run 0..{len(self.entries) - 1}, got {d}")
            if u < 0:
                raise ValueError(f"negative speed {u} at density {d}")
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"entry probability {p} at density {d} outside [0, 1]")
        speeds = [u for _, u, _ in self.entries]
        probs = [p for _, _, p in self.entries]
        if any(a < b for a, b in zip(speeds, speeds[1:])):
            raise ValueError("speed must be non-increasing in density")
        if any(a < b for a, b in zip(probs, probs[1:])):
            raise ValueError("entry probability must be non-increasing in density")
        if probs[-1] != 0.0:
            raise ValueError("entry probability must be 0 at the final row")
        if probs[0] <= 0.0:
            raise ValueError("entry probability at density 0 must be positive")

    @cached_property
    def _speeds(self) -> tuple[float, ...]:
        return tuple(u for _, u, _ in self.entries)

    @cached_property
    def _probs(self) -> tuple[float, ...]:
        return tuple(p for _, _, p in self.entries)

    @cached_property
    def capacity(self) -> int:
        """Max occupancy a cell can reach: last enterable density plus one."""
        return max(d for d, _, p in self.entries if p > 0.0) + 1

    def speed(self, density: int) -> float:
        if not 0 <= density < len(self.entries):
            raise OutOfRange(f"density {density} outside table range")
        return self._speeds[density]

    def entry_probability(self, density: int) -> float:
        if not 0 <= density < len(self.entries):
            raise OutOfRange(f"density {density} outside table range")
        return self._probs[density]


MESO_TABLE = SpeedDensityTable((
    (0, 1.44, 1.0),
    (1, 1.12, 0.8),
    (2, 0.84, 0.6),
    (3, 0.56, 0.4),
    (4, 0.28, 0.2),
    (5, 0.00, 0.0),
))

# Half-meter cells hold a single agent; blocking, not slowdown, carries the
# congestion effect.
MICRO_TABLE = SpeedDensityTable((
    (0, 1.44, 1.0),
    (1, 0.00, 0.0),
))


@dataclass(frozen=True)
class CellGeometry:
    cell_size_m: float

    @property
    def diameter_m(self) -> float:
        """Distance an agent covers to pass through one cell."""
        return self.cell_size_m * DIAMETER_FACTOR


@dataclass(frozen=True)
class SpawnEntry:
    cell: Cell
    count: int
    release_step: int = 0


@dataclass
class Agent:
    id: int
    cell: Cell
    t_in: float
    spawn_time: float
    distance_m: float = 0.0
    exit: tuple[Cell, float] | None = None


class SimulationState:
    """Mutable per-run state: clock, roster, density, pending spawns, events."""

    def __init__(self, grid: LayoutGrid, rng: np.random.Generator,
                 schedule: tuple[SpawnEntry, ...]) -> None:
        self.clock = 0.0
        self.step_index = 0
        self.rng = rng
        self.density = [0] * (grid.rows * grid.cols)
        self.agents: dict[int, Agent] = {}
        self.exited: list[Agent] = []
        self.events: list[Event] = []
        self.next_id = 0
        self.spawned = 0
        # mutable [cell, remaining, release_step] work list
        self.pending = [[e.cell, e.count, e.release_step] for e in schedule]

    @property
    def pending_count(self) -> int:
        return sum(rem for _, rem, _ in self.pending)

    def density_at(self, grid: LayoutGrid, cell: Cell) -> int:
        return self.density[grid.index(cell)]


def dwell_elapsed(agent: Agent, state: SimulationState, grid: LayoutGrid,
                  geom: CellGeometry, table: SpeedDensityTable) -> bool:
    """True when the agent has finished crossing its cell and may move.

    The walking speed comes from the count of other occupants of the agent's
    cell; a zero speed means the agent can never finish this step.
    """
    others = state.density[grid.index(agent.cell)] - 1
    u = table.speed(others)
    if u <= 0.0:
        return False
    return state.clock >= agent.t_in + geom.diameter_m / u


def entry_probability(table: SpeedDensityTable, density: int) -> float:
    return table.entry_probability(density)


def score_candidates(agent: Agent, state: SimulationState, grid: LayoutGrid,
                     field: FloorField, table: SpeedDensityTable) -> list[tuple[str, float]]:
    """Entry probability times navigation value for each permitted direction.

    Densities reflect moves already executed earlier in the same step, so a
    cell filled moments ago scores zero for everyone after.
    """
    r, c = agent.cell
    scores = []
    for name in moves_of(grid, agent.cell):
        dr, dc = DIR_VECTORS[name]
        nxt = (r + dr, c + dc)
        p = table.entry_probability(state.density[grid.index(nxt)])
        scores.append((name, p * float(field.values[nxt])))
    return scores


def choose_move(scores: list[tuple[str, float]], rng: np.random.Generator) -> str | None:
    """Argmax direction, or None to stay when nothing scores above zero.

    Exact ties prefer orthogonal moves over diagonal ones; remaining ties are
    broken uniformly with the run's generator.
    """
    if not scores:
        return None
    best = max(s for _, s in scores)
    if best <= 0.0:
        return None
    top = [name for name, s in scores if s == best]
    ortho = [name for name in top if name in ORTHOGONAL]
    pool = ortho if ortho else top
    if len(pool) == 1:
        return pool[0]
    return pool[int(rng.integers(len(pool)))]


def _spawn_pass(state: SimulationState, grid: LayoutGrid, table: SpeedDensityTable) -> None:
    capacity = table.capacity
    for entry in state.pending:
        cell, remaining, release = entry
        if release > state.step_index or remaining == 0:
            continue
        idx = grid.index(cell)
        while entry[1] > 0 and state.density[idx] < capacity:
            agent = Agent(id=state.next_id, cell=cell,
                          t_in=state.clock, spawn_time=state.clock)
            state.next_id += 1
            state.spawned += 1
            state.agents[agent.id] = agent
            state.density[idx] += 1
            entry[1] -= 1
            state.events.append((state.step_index, state.clock, agent.id,
                                 EVENT_SPAWN, cell[0], cell[1]))


def step(state: SimulationState, grid: LayoutGrid, field: FloorField,
         table: SpeedDensityTable, geom: CellGeometry, dt: float) -> SimulationState:
    """Advance one interval: spawn, absorb sink-standing agents, move the rest."""
    state.step_index += 1
    state.clock = state.step_index * dt
    clock = state.clock

    _spawn_pass(state, grid, table)

    sinks = grid.sink_set
    arrived = [aid for aid, a in state.agents.items() if a.cell in sinks]
    for aid in sorted(arrived):
        agent = state.agents.pop(aid)
        agent.exit = (agent.cell, clock)
        state.density[grid.index(agent.cell)] -= 1
        state.exited.append(agent)
        state.events.append((state.step_index, clock, aid,
                             EVENT_EXIT, agent.cell[0], agent.cell[1]))

    ids = sorted(state.agents)
    if len(ids) > 1:
        ids = [ids[i] for i in state.rng.permutation(len(ids))]
    size = grid.cell_size_m
    diag_size = size * math.sqrt(2.0)
    for aid in ids:
        agent = state.agents[aid]
        if not dwell_elapsed(agent, state, grid, geom, table):
            continue
        scores = score_candidates(agent, state, grid, field, table)
        name = choose_move(scores, state.rng)
        if name is None:
            state.events.append((state.step_index, clock, aid,
                                 EVENT_STAY, agent.cell[0], agent.cell[1]))
            continue
        dr, dc = DIR_VECTORS[name]
        old = agent.cell
        new = (old[0] + dr, old[1] + dc)
        state.density[grid.index(old)] -= 1
        state.density[grid.index(new)] += 1
        agent.cell = new
        agent.t_in = clock
        agent.distance_m += diag_size if dr and dc else size
        state.events.append((state.step_index, clock, aid, EVENT_MOVE, new[0], new[1]))
    return state


class Simulation:
    """Owns one run: layout, field, table, schedule, state, and the event log."""

    def __init__(self, grid: LayoutGrid, field: FloorField,
                 table: SpeedDensityTable, schedule: tuple[SpawnEntry, ...] = (),
                 dt: float = 0.5, seed: int | None = 0,
                 rng: np.random.Generator | None = None) -> None:
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        for entry in schedule:
            if entry.cell not in grid.source_set:
                raise ValueError(f"spawn cell {entry.cell} is not a layout source")
            if entry.count < 0 or entry.release_step < 0:
                raise ValueError(f"bad spawn entry {entry}")
        self.grid = grid
        self.field = field
        self.table = table
        self.geometry = CellGeometry(grid.cell_size_m)
        self.dt = dt
        if rng is None:
            rng = np.random.default_rng(seed)
        self.state = SimulationState(grid, rng, schedule)
        # release step 0 is "present when the clock starts"
        _spawn_pass(self.state, grid, table)

    def step(self) -> SimulationState:
        return step(self.state, self.grid, self.field, self.table, self.geometry, self.dt)

    def run(self, max_steps: int, on_step=None):
        """Step until everyone has exited or `max_steps` intervals elapse."""
        if on_step is not None:
            on_step(self)
        for _ in range(max_steps):
            if not self.state.agents and self.state.pending_count == 0:
                break
            self.step()
            if on_step is not None:
                on_step(self)
        return self.state

    @property
    def events(self) -> list[Event]:
        return self.state.events

    @property
    def completed(self) -> bool:
        return not self.state.agents and self.state.pending_count == 0

    @property
    def schedule_overflow(self) -> bool:
        """True when scheduled spawns never fit within the steps run so far."""
        return self.state.pending_count > 0


def events_to_csv(events: list[Event]) -> str:
    lines = ["step,clock_s,agent_id,event,row,col"]
    for step_i, clock, aid, kind, r, c in events:
        lines.append(f"{step_i},{clock!r},{aid},{kind},{r},{c}")
    return "\n".join(lines) + "\n"


def render_snapshot(grid: LayoutGrid, density: list[int]) -> str:
    """ASCII picture of walls and per-cell occupancy digits."""
    rows, cols = grid.rows, grid.cols
    canvas = []
    for r in range(rows):
        top_line = []
        mid_line = []
        for c in range(cols):
            code = grid.walls[r][c]
            top_line.append("+")
            top_line.append("  " if side_open(code, TOP) else "--")
            mid_line.append(" " if side_open(code, LEFT) else "|")
            occ = density[r * cols + c]
            mid_line.append(f"{min(occ, 9)} " if occ else " .")
        top_line.append("+")
        last = grid.walls[r][cols - 1]
        mid_line.append(" " if side_open(last, RIGHT) else "|")
        canvas.append("".join(top_line))
        canvas.append("".join(mid_line))
    bottom = []
    for c in range(cols):
        code = grid.walls[rows - 1][c]
        bottom.append("+")
        bottom.append("  " if side_open(code, BOTTOM) else "--")
    bottom.append("+")
    canvas.append("".join(bottom))
    return "\n".join(canvas) + "\n"
