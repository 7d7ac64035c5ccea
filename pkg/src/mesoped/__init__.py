"""Mesoscopic pedestrian simulator: value-iteration navigation fields over
edge-walled grids, plus a density-coupled discrete-time movement engine."""

from .layout import (
    BoundaryError, ConsistencyError, EmptyError, LayoutError, LayoutGrid,
    OutOfBounds, ParseError, ProtectedCell, decode_wall_code, encode_wall_code,
    moves_of, obstacle, parse_layout, serialize_layout, validate_grid,
)
from .floorfield import (
    FloorField, NotConvergedWarning, QMatrix, RewardsMatrix, Stuck,
    build_rewards, compute_field, distance_field, extract_field,
    field_to_csv, greedy_descent, solve_q,
)
from .engine import (
    Agent, CellGeometry, MESO_TABLE, MICRO_TABLE, OutOfRange, Simulation,
    SimulationState, SpawnEntry, SpeedDensityTable, choose_move, dwell_elapsed,
    entry_probability, events_to_csv, render_snapshot, score_candidates, step,
)
from .metrics import RunMetrics, SweepPoint, summarize, sweep
from .scenario import (
    ConfigError, ScenarioConfig, Runtime, build_runtime, bundled_scenarios,
    load_scenario, make_simulation, simulate,
)
from .cli import DimensionMismatch, compare

__version__ = "0.1.0"
