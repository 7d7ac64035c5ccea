"""Grid layouts with edge-coded walls, spawn sources, and weighted exit sinks.

Cells are unit squares on a row/column lattice with row 0 at the top. Each
cell carries a 4-bit wall code for its four sides; adjacent cells duplicate
the shared edge, and validation rejects grids where the two copies disagree
instead of repairing them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

Cell = tuple[int, int]

# Wall bits, most significant first: a set bit means the side is closed.
TOP, RIGHT, BOTTOM, LEFT = 8, 4, 2, 1
SIDES = (TOP, RIGHT, BOTTOM, LEFT)
SIDE_NAMES = {TOP: "top", RIGHT: "right", BOTTOM: "bottom", LEFT: "left"}

DIRECTIONS = ("N", "NE", "E", "SE", "S", "SW", "W", "NW")
ORTHOGONAL = frozenset(("N", "E", "S", "W"))
DIR_VECTORS = {
    "N": (-1, 0), "NE": (-1, 1), "E": (0, 1), "SE": (1, 1),
    "S": (1, 0), "SW": (1, -1), "W": (0, -1), "NW": (-1, -1),
}
OPPOSITE = {"N": "S", "S": "N", "E": "W", "W": "E",
            "NE": "SW", "SW": "NE", "NW": "SE", "SE": "NW"}

_SIDE_OF = {"N": TOP, "E": RIGHT, "S": BOTTOM, "W": LEFT}
# Diagonal moves pass a cell corner: both flanking sides must be open at the
# source and at the destination, which together cover all four edges meeting
# at that corner (no corner cutting).
_DIAG_SIDES = {
    "NE": ((TOP, RIGHT), (BOTTOM, LEFT)),
    "SE": ((BOTTOM, RIGHT), (TOP, LEFT)),
    "SW": ((BOTTOM, LEFT), (TOP, RIGHT)),
    "NW": ((TOP, LEFT), (BOTTOM, RIGHT)),
}


class LayoutError(Exception):
    """Base class for layout construction and parsing failures."""


class ParseError(LayoutError):
    pass


class ConsistencyError(LayoutError):
    """Shared edge encoded differently by its two adjacent cells."""


class BoundaryError(LayoutError):
    """Open perimeter side on a cell that is not a sink."""


class EmptyError(LayoutError):
    """Layout defines no sinks or no sources."""


class OutOfBounds(LayoutError):
    pass


class ProtectedCell(LayoutError):
    """Attempt to overwrite a source or sink cell."""


def encode_wall_code(top: bool, right: bool, bottom: bool, left: bool) -> int:
    """Pack four closed-side flags into a wall code in [0, 15]."""
    return (TOP if top else 0) | (RIGHT if right else 0) | \
        (BOTTOM if bottom else 0) | (LEFT if left else 0)


def decode_wall_code(code: int) -> tuple[bool, bool, bool, bool]:
    """Unpack a wall code into (top, right, bottom, left) closed flags."""
    if not 0 <= code <= 15:
        raise ParseError(f"wall code {code} outside [0, 15]")
    return bool(code & TOP), bool(code & RIGHT), bool(code & BOTTOM), bool(code & LEFT)


def side_open(code: int, side: int) -> bool:
    return not code & side


@dataclass(frozen=True)
class LayoutGrid:
    """Immutable layout: wall codes plus sink weights and source cells.

    Construction does not validate; `parse_layout` and `obstacle` run
    `validate_grid` on every grid they hand out.
    """

    rows: int
    cols: int
    cell_size_m: float
    walls: tuple[tuple[int, ...], ...]
    sinks: tuple[tuple[Cell, float], ...]
    sources: tuple[Cell, ...]

    def in_bounds(self, cell: Cell) -> bool:
        r, c = cell
        return 0 <= r < self.rows and 0 <= c < self.cols

    def wall_code(self, cell: Cell) -> int:
        if not self.in_bounds(cell):
            raise OutOfBounds(f"cell {cell} outside {self.rows}x{self.cols} grid")
        return self.walls[cell[0]][cell[1]]

    def index(self, cell: Cell) -> int:
        return cell[0] * self.cols + cell[1]

    @cached_property
    def sink_weights(self) -> dict[Cell, float]:
        return dict(self.sinks)

    @cached_property
    def sink_set(self) -> frozenset[Cell]:
        return frozenset(cell for cell, _ in self.sinks)

    @cached_property
    def source_set(self) -> frozenset[Cell]:
        return frozenset(self.sources)

    @cached_property
    def _move_lists(self) -> tuple[tuple[tuple[str, ...], ...], ...]:
        return tuple(
            tuple(_permitted_moves(self, (r, c)) for c in range(self.cols))
            for r in range(self.rows)
        )


def _permitted_moves(grid: LayoutGrid, cell: Cell) -> tuple[str, ...]:
    r, c = cell
    code = grid.walls[r][c]
    out = []
    for d in DIRECTIONS:
        dr, dc = DIR_VECTORS[d]
        nr, nc = r + dr, c + dc
        if not (0 <= nr < grid.rows and 0 <= nc < grid.cols):
            continue
        if d in _SIDE_OF:
            if side_open(code, _SIDE_OF[d]):
                out.append(d)
        else:
            (s1, s2), (t1, t2) = _DIAG_SIDES[d]
            dest = grid.walls[nr][nc]
            if side_open(code, s1) and side_open(code, s2) \
                    and side_open(dest, t1) and side_open(dest, t2):
                out.append(d)
    return tuple(out)


def moves_of(grid: LayoutGrid, cell: Cell) -> tuple[str, ...]:
    """Permitted move directions out of `cell`, in fixed compass order."""
    if not grid.in_bounds(cell):
        raise OutOfBounds(f"cell {cell} outside {grid.rows}x{grid.cols} grid")
    return grid._move_lists[cell[0]][cell[1]]


def find_edge_conflicts(walls) -> list[tuple[Cell, Cell]]:
    """Cell pairs whose shared edge is encoded open on one side, closed on the other."""
    rows, cols = len(walls), len(walls[0])
    bad = []
    for r in range(rows):
        for c in range(cols):
            code = walls[r][c]
            if c + 1 < cols and bool(code & RIGHT) != bool(walls[r][c + 1] & LEFT):
                bad.append(((r, c), (r, c + 1)))
            if r + 1 < rows and bool(code & BOTTOM) != bool(walls[r + 1][c] & TOP):
                bad.append(((r, c), (r + 1, c)))
    return bad


def validate_grid(grid: LayoutGrid) -> None:
    """Raise on edge conflicts, missing sinks/sources, or an open perimeter."""
    conflicts = find_edge_conflicts(grid.walls)
    if conflicts:
        (a, b) = conflicts[0]
        raise ConsistencyError(f"shared edge between {a} and {b} disagrees")
    if not grid.sinks:
        raise EmptyError("layout has no sinks")
    if not grid.sources:
        raise EmptyError("layout has no sources")
    sinks = grid.sink_set
    for r in range(grid.rows):
        for c in range(grid.cols):
            if (r, c) in sinks:
                continue
            code = grid.walls[r][c]
            for side, on_edge in ((TOP, r == 0), (BOTTOM, r == grid.rows - 1),
                                  (LEFT, c == 0), (RIGHT, c == grid.cols - 1)):
                if on_edge and side_open(code, side):
                    raise BoundaryError(
                        f"open {SIDE_NAMES[side]} side on perimeter cell ({r}, {c}) "
                        "which is not a sink")
    for cell, w in grid.sinks:
        if w <= 0:
            raise ParseError(f"sink {cell} has non-positive weight {w}")
    overlap = sinks & grid.source_set
    if overlap:
        raise ParseError(f"cell {sorted(overlap)[0]} is both source and sink")


def parse_layout(text: str) -> LayoutGrid:
    """Parse the plain-text layout format and return a validated grid.

    Line 1 holds `rows cols cell_size_m`, followed by `rows` lines of wall
    codes, then `sink r c weight` and `source r c` directives. Everything
    after a `#` is a comment; blank lines are skipped.
    """
    lines = [(i + 1, ln.split("#", 1)[0].strip())
             for i, ln in enumerate(text.splitlines())]
    lines = [(no, ln) for no, ln in lines if ln]
    if not lines:
        raise ParseError("empty layout file")

    no, header = lines[0]
    parts = header.split()
    if len(parts) != 3:
        raise ParseError(f"line {no}: header must be 'rows cols cell_size_m'")
    try:
        rows, cols = int(parts[0]), int(parts[1])
        cell_size = float(parts[2])
    except ValueError as exc:
        raise ParseError(f"line {no}: bad header value: {exc}") from None
    if rows < 1 or cols < 1 or cell_size <= 0:
        raise ParseError(f"line {no}: rows, cols, cell size must be positive")

    if len(lines) - 1 < rows:
        raise ParseError(f"expected {rows} wall-code lines, found {len(lines) - 1}")
    walls = []
    for no, ln in lines[1:1 + rows]:
        tokens = ln.split()
        if len(tokens) != cols:
            raise ParseError(f"line {no}: expected {cols} wall codes, found {len(tokens)}")
        row = []
        for tok in tokens:
            try:
                code = int(tok)
            except ValueError:
                raise ParseError(f"line {no}: wall code {tok!r} is not an integer") from None
            if not 0 <= code <= 15:
                raise ParseError(f"line {no}: wall code {code} outside [0, 15]")
            row.append(code)
        walls.append(tuple(row))

    sinks: list[tuple[Cell, float]] = []
    sources: list[Cell] = []
    seen_sinks: set[Cell] = set()
    seen_sources: set[Cell] = set()
    for no, ln in lines[1 + rows:]:
        tokens = ln.split()
        kind = tokens[0]
        try:
            if kind == "sink":
                if len(tokens) != 4:
                    raise ValueError("expected 'sink r c weight'")
                cell = (int(tokens[1]), int(tokens[2]))
                weight = float(tokens[3])
                if weight <= 0:
                    raise ValueError(f"sink weight must be positive, got {weight}")
                if cell in seen_sinks:
                    raise ValueError(f"duplicate sink {cell}")
                seen_sinks.add(cell)
                sinks.append((cell, weight))
            elif kind == "source":
                if len(tokens) != 3:
                    raise ValueError("expected 'source r c'")
                cell = (int(tokens[1]), int(tokens[2]))
                if cell in seen_sources:
                    raise ValueError(f"duplicate source {cell}")
                seen_sources.add(cell)
                sources.append(cell)
            else:
                raise ValueError(f"unknown directive {kind!r}")
        except ValueError as exc:
            raise ParseError(f"line {no}: {exc}") from None
        if not (0 <= cell[0] < rows and 0 <= cell[1] < cols):
            raise ParseError(f"line {no}: cell {cell} outside {rows}x{cols} grid")

    grid = LayoutGrid(rows=rows, cols=cols, cell_size_m=cell_size,
                      walls=tuple(walls), sinks=tuple(sinks), sources=tuple(sources))
    validate_grid(grid)
    return grid


def serialize_layout(grid: LayoutGrid) -> str:
    """Canonical text form; `parse_layout(serialize_layout(g))` round-trips."""
    out = [f"{grid.rows} {grid.cols} {grid.cell_size_m!r}"]
    for row in grid.walls:
        out.append(" ".join(str(code) for code in row))
    for (r, c), w in grid.sinks:
        out.append(f"sink {r} {c} {w!r}")
    for r, c in grid.sources:
        out.append(f"source {r} {c}")
    return "\n".join(out) + "\n"


def obstacle(grid: LayoutGrid, cell: Cell) -> LayoutGrid:
    """Return a copy with `cell` fully walled and neighbor edges mirrored."""
    if not grid.in_bounds(cell):
        raise OutOfBounds(f"cell {cell} outside {grid.rows}x{grid.cols} grid")
    if cell in grid.sink_set or cell in grid.source_set:
        raise ProtectedCell(f"cell {cell} is a source or sink")
    walls = [list(row) for row in grid.walls]
    r, c = cell
    walls[r][c] = 15
    for d in ("N", "E", "S", "W"):
        dr, dc = DIR_VECTORS[d]
        nr, nc = r + dr, c + dc
        if 0 <= nr < grid.rows and 0 <= nc < grid.cols:
            walls[nr][nc] |= _SIDE_OF[OPPOSITE[d]]
    new = replace(grid, walls=tuple(tuple(row) for row in walls))
    validate_grid(new)
    return new
