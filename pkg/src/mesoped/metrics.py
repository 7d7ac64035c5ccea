"""Run metrics recomputed from event logs, plus population sweeps.

Working from the log rather than live engine state means any stored run can
be re-audited without replaying it.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from statistics import fmean

import numpy as np

from .engine import (EVENT_EXIT, EVENT_MOVE, EVENT_SPAWN, Event)
from .layout import Cell


@dataclass(frozen=True)
class RunMetrics:
    """Aggregates for one run; averages cover exited agents only."""

    n_agents: int
    avg_travel_time_s: float | None
    avg_distance_m: float | None
    per_exit_counts: dict[Cell, int]
    completed: bool

    @property
    def n_exited(self) -> int:
        return sum(self.per_exit_counts.values())


def summarize(events: list[Event], cell_size_m: float) -> RunMetrics:
    """Travel times, walked distances, and exit usage from one event log.

    A run with agents still inside is flagged incomplete and summarized over
    the agents that made it out.
    """
    diag = cell_size_m * math.sqrt(2.0)
    spawn_clock: dict[int, float] = {}
    position: dict[int, Cell] = {}
    distance: dict[int, float] = {}
    travel: list[float] = []
    dist_done: list[float] = []
    exits: Counter[Cell] = Counter()
    for _, clock, aid, kind, r, c in events:
        if kind == EVENT_SPAWN:
            spawn_clock[aid] = clock
            position[aid] = (r, c)
            distance[aid] = 0.0
        elif kind == EVENT_MOVE:
            pr, pc = position[aid]
            distance[aid] += diag if (r != pr and c != pc) else cell_size_m
            position[aid] = (r, c)
        elif kind == EVENT_EXIT:
            travel.append(clock - spawn_clock[aid])
            dist_done.append(distance[aid])
            exits[(r, c)] += 1
    n_agents = len(spawn_clock)
    n_exited = len(travel)
    return RunMetrics(
        n_agents=n_agents,
        avg_travel_time_s=fmean(travel) if travel else None,
        avg_distance_m=fmean(dist_done) if dist_done else None,
        per_exit_counts=dict(exits),
        completed=n_exited == n_agents,
    )


@dataclass(frozen=True)
class SweepPoint:
    """Seed-averaged metrics at one population size."""

    population: int
    avg_travel_time_s: float | None
    avg_distance_m: float | None
    per_exit_counts: dict[Cell, float]
    completed: bool
    n_runs: int


def run_seed_sequence(base_seed: int, population: int, run: int) -> np.random.SeedSequence:
    """Distinct, reproducible stream per (scenario seed, population, run)."""
    return np.random.SeedSequence([base_seed, population, run])


def sweep(config, populations: list[int], seeds_per_point: int) -> list[SweepPoint]:
    """Average metrics across seeded repeats for each population size.

    The layout and navigation field are built once; only the spawn schedule
    and the generator change between runs.
    """
    from .scenario import build_runtime, make_simulation

    runtime = build_runtime(config)
    points = []
    for population in populations:
        metrics = []
        for run_i in range(seeds_per_point):
            rng = np.random.Generator(np.random.PCG64(
                run_seed_sequence(config.seed, population, run_i)))
            sim = make_simulation(runtime, config, population=population, rng=rng)
            sim.run(config.max_steps)
            metrics.append(summarize(sim.events, runtime.grid.cell_size_m))
        travels = [m.avg_travel_time_s for m in metrics if m.avg_travel_time_s is not None]
        dists = [m.avg_distance_m for m in metrics if m.avg_distance_m is not None]
        counts: dict[Cell, float] = {}
        for cell, _ in runtime.grid.sinks:
            counts[cell] = fmean([m.per_exit_counts.get(cell, 0) for m in metrics])
        points.append(SweepPoint(
            population=population,
            avg_travel_time_s=fmean(travels) if travels else None,
            avg_distance_m=fmean(dists) if dists else None,
            per_exit_counts=counts,
            completed=all(m.completed for m in metrics),
            n_runs=len(metrics),
        ))
    return points


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def metrics_csv(rows: list[tuple[int, RunMetrics | SweepPoint]], sinks: list[Cell]) -> str:
    """Shared CSV shape for single runs and sweeps: one line per population."""
    header = ["population", "avg_travel_time_s", "avg_distance_m"]
    header += [f"exit_{r}_{c}_count" for r, c in sinks]
    header.append("completed")
    lines = [",".join(header)]
    for population, m in rows:
        cells = [str(population), _fmt(m.avg_travel_time_s), _fmt(m.avg_distance_m)]
        for cell in sinks:
            count = m.per_exit_counts.get(cell, 0)
            cells.append(repr(float(count)) if isinstance(count, float) else str(count))
        cells.append("true" if m.completed else "false")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def comparison_csv(populations: list[int], meso: list[SweepPoint],
                   micro: list[SweepPoint]) -> str:
    header = ("population,meso_avg_travel_time_s,meso_avg_distance_m,meso_completed,"
              "micro_avg_travel_time_s,micro_avg_distance_m,micro_completed")
    lines = [header]
    for population, a, b in zip(populations, meso, micro):
        lines.append(",".join([
            str(population),
            _fmt(a.avg_travel_time_s), _fmt(a.avg_distance_m),
            "true" if a.completed else "false",
            _fmt(b.avg_travel_time_s), _fmt(b.avg_distance_m),
            "true" if b.completed else "false",
        ]))
    return "\n".join(lines) + "\n"
