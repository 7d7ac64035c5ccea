"""Command-line front end: run scenarios, export fields, sweep populations.

Exit codes: 0 on a completed run, 2 on configuration or usage errors, 3 when
agents or scheduled spawns were still waiting at the step limit.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .engine import events_to_csv, render_snapshot
from .floorfield import field_to_csv
from .layout import LayoutError
from .metrics import comparison_csv, metrics_csv, summarize, sweep
from .scenario import (ConfigError, ScenarioConfig, build_runtime,
                       load_scenario, make_simulation)

OUT_ENV = "MESOPED_OUT"


class DimensionMismatch(Exception):
    """Paired meso/micro layouts do not describe the same floor plan."""


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_ENV, "out"))


def check_refinement(meso_grid, micro_grid) -> None:
    """The micro grid must be the meso grid at twice the resolution."""
    if micro_grid.rows != 2 * meso_grid.rows or micro_grid.cols != 2 * meso_grid.cols:
        raise DimensionMismatch(
            f"micro grid {micro_grid.rows}x{micro_grid.cols} is not twice the "
            f"meso grid {meso_grid.rows}x{meso_grid.cols}")
    if abs(micro_grid.cell_size_m * 2 - meso_grid.cell_size_m) > 1e-12:
        raise DimensionMismatch(
            f"micro cell size {micro_grid.cell_size_m} is not half the meso "
            f"cell size {meso_grid.cell_size_m}")


def compare(meso_config: ScenarioConfig, micro_config: ScenarioConfig,
            populations: list[int], seeds_per_point: int):
    """Paired population sweeps of geometrically matched meso/micro scenarios."""
    meso_runtime = build_runtime(meso_config)
    micro_runtime = build_runtime(micro_config)
    check_refinement(meso_runtime.grid, micro_runtime.grid)
    meso_points = sweep(meso_config, populations, seeds_per_point)
    micro_points = sweep(micro_config, populations, seeds_per_point)
    return meso_points, micro_points


def parse_populations(spec: str) -> list[int]:
    """Population specs: '25', '1,5,10', or '1..50'."""
    spec = spec.strip()
    try:
        if ".." in spec:
            lo_s, hi_s = spec.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if lo < 0 or hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"bad population spec {spec!r}; use N, A,B,C, or LO..HI") from None


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def cmd_run(args) -> int:
    config = load_scenario(args.scenario)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    max_steps = config.max_steps if args.steps is None else args.steps
    runtime = build_runtime(config)
    sim = make_simulation(runtime, config)

    snapshots: list[str] = []

    def on_step(s) -> None:
        snapshots.append(f"# step {s.state.step_index} clock {s.state.clock!r}\n"
                         + render_snapshot(s.grid, s.state.density))

    sim.run(max_steps, on_step=on_step if args.snapshots else None)

    out_dir = Path(args.out) if args.out else default_out_dir() / f"{config.name}-seed{config.seed if args.seed is None else args.seed}"
    m = summarize(sim.events, runtime.grid.cell_size_m)
    sinks = [cell for cell, _ in runtime.grid.sinks]
    _write(out_dir / "events.csv", events_to_csv(sim.events))
    _write(out_dir / "metrics.csv", metrics_csv([(m.n_agents, m)], sinks))
    _write(out_dir / "field.csv", field_to_csv(runtime.field))
    if args.snapshots:
        _write(out_dir / "snapshots.txt", "\n".join(snapshots))

    print(f"{config.name}: spawned {sim.state.spawned}, exited {len(sim.state.exited)}, "
          f"steps {sim.state.step_index}, clock {sim.state.clock:g} s -> {out_dir}")
    if sim.schedule_overflow:
        print(f"warning: {sim.state.pending_count} scheduled agents never spawned "
              "within the step limit", file=sys.stderr)
    if not sim.completed:
        return 3
    return 0


def cmd_export_field(args) -> int:
    config = load_scenario(args.scenario)
    runtime = build_runtime(config)
    out = Path(args.out)
    _write(out, field_to_csv(runtime.field))
    print(f"{config.name}: field {runtime.grid.rows}x{runtime.grid.cols} -> {out}")
    return 0


def cmd_sweep(args) -> int:
    config = load_scenario(args.scenario)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    populations = parse_populations(args.pop)
    points = sweep(config, populations, args.seeds)
    runtime_sinks = [cell for cell, _ in build_runtime(config).grid.sinks]
    out_dir = Path(args.out) if args.out else default_out_dir() / f"{config.name}-sweep"
    _write(out_dir / "metrics.csv", metrics_csv([(p.population, p) for p in points], runtime_sinks))
    print(f"{config.name}: {len(points)} population points x {args.seeds} seeds -> {out_dir}")
    return 0 if all(p.completed for p in points) else 3


def cmd_compare(args) -> int:
    meso_config = load_scenario(args.meso)
    micro_config = load_scenario(args.micro)
    populations = parse_populations(args.pop)
    meso_points, micro_points = compare(meso_config, micro_config, populations, args.seeds)
    out_dir = Path(args.out) if args.out else default_out_dir() / f"{meso_config.name}-vs-{micro_config.name}"
    _write(out_dir / "comparison.csv", comparison_csv(populations, meso_points, micro_points))
    print(f"{meso_config.name} vs {micro_config.name}: {len(populations)} population "
          f"points x {args.seeds} seeds -> {out_dir}")
    ok = all(p.completed for p in meso_points) and all(p.completed for p in micro_points)
    return 0 if ok else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mesoped",
        description="Mesoscopic pedestrian simulator with value-iteration navigation fields.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write its artifacts")
    p_run.add_argument("scenario", help="scenario file path or bundled scenario name")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--steps", type=int, default=None, help="override max steps")
    p_run.add_argument("--snapshots", action="store_true", help="write per-step density pictures")
    p_run.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or ./out)")
    p_run.set_defaults(func=cmd_run)

    p_field = sub.add_parser("export-field", help="write the navigation field as CSV")
    p_field.add_argument("scenario")
    p_field.add_argument("--out", required=True)
    p_field.set_defaults(func=cmd_export_field)

    p_sweep = sub.add_parser("sweep", help="average metrics over populations and seeds")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("--pop", required=True, help="population spec: N, A,B,C, or LO..HI")
    p_sweep.add_argument("--seeds", type=int, default=10, help="runs per population")
    p_sweep.add_argument("--seed", type=int, default=None, help="override base seed")
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_cmp = sub.add_parser("compare", help="paired meso/micro population sweep")
    p_cmp.add_argument("meso")
    p_cmp.add_argument("micro")
    p_cmp.add_argument("--pop", required=True)
    p_cmp.add_argument("--seeds", type=int, default=10)
    p_cmp.add_argument("--out", default=None)
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, LayoutError, DimensionMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
