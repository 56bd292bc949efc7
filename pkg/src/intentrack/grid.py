"""Discrete grid world: cells, successor sets, step costs and distance fields.

The target moves on a bounded integer lattice with optional blocked cells.
All "lowest cost" quantities are exact shortest-path lengths on the same
lattice graph the target moves on (unit cost for orthogonal moves, sqrt(2)
for diagonals, scaled by ``cell_size``), so the per-step progress cost used
by the kinematics is non-negative by the graph triangle inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _sp_dijkstra

SQRT2 = math.sqrt(2.0)

# Neighbour offsets (dx, dy) in row-major order. The stay move, when enabled,
# always occupies slot 0 so successor ordering is reproducible everywhere.
OFFSETS_4 = ((0, -1), (-1, 0), (1, 0), (0, 1))
OFFSETS_8 = ((-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1))


class GridError(ValueError):
    """Invalid map, cell, or adjacency query."""


class Cell(NamedTuple):
    x: int
    y: int
    index: int

    def coords(self) -> tuple[int, int]:
        return (self.x, self.y)


@dataclass(frozen=True, eq=False)
class SuccessorTable:
    """Compact per-cell successor arrays, stay first then row-major moves.

    Rows are front-packed: slots ``0..degree[i]-1`` are valid, the rest are
    padding (``succ == -1``, ``cost == +inf``).
    """

    succ: np.ndarray    # (n_cells, max_degree) int32
    cost: np.ndarray    # (n_cells, max_degree) float64
    valid: np.ndarray   # (n_cells, max_degree) bool
    degree: np.ndarray  # (n_cells,) int32

    @property
    def max_degree(self) -> int:
        return self.succ.shape[1]

    def slot_of(self, base_index: int, succ_index: int) -> int:
        """Slot of ``succ_index`` in ``base_index``'s row, or -1 if absent."""
        row = self.succ[base_index]
        hits = np.nonzero(row == succ_index)[0]
        return int(hits[0]) if hits.size else -1


@dataclass(frozen=True, eq=False)
class GridMap:
    width: int
    height: int
    cell_size: float = 1.0
    blocked: np.ndarray | None = None
    connectivity: int = 8
    allow_stay: bool = True

    def __post_init__(self):
        if self.width < 2 or self.height < 2:
            raise GridError("grid must be at least 2x2")
        if self.connectivity not in (4, 8):
            raise GridError("connectivity must be 4 or 8")
        if not (self.cell_size > 0 and math.isfinite(self.cell_size)):
            raise GridError("cell_size must be positive and finite")
        blocked = self.blocked
        if blocked is None:
            blocked = np.zeros((self.height, self.width), dtype=bool)
        else:
            blocked = np.array(blocked, dtype=bool)
            if blocked.shape != (self.height, self.width):
                raise GridError(
                    f"blocked mask must have shape {(self.height, self.width)}"
                )
        blocked.setflags(write=False)
        object.__setattr__(self, "blocked", blocked)

    # -- basic geometry -------------------------------------------------

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def cell(self, x: int, y: int) -> Cell:
        if not self.in_bounds(int(x), int(y)):
            raise GridError(f"cell ({x}, {y}) out of bounds")
        x, y = int(x), int(y)
        return Cell(x, y, y * self.width + x)

    def cell_at(self, index: int) -> Cell:
        index = int(index)
        if not 0 <= index < self.n_cells:
            raise GridError(f"cell index {index} out of range")
        return Cell(index % self.width, index // self.width, index)

    def is_blocked(self, cell: Cell) -> bool:
        return bool(self.blocked[cell.y, cell.x])

    def world(self, cell: Cell) -> np.ndarray:
        """World-frame position of a cell: (x, y) * cell_size."""
        return np.array([cell.x, cell.y], dtype=float) * self.cell_size

    def cache_key(self) -> tuple:
        return (
            self.width,
            self.height,
            self.cell_size,
            self.connectivity,
            self.allow_stay,
            self.blocked.tobytes(),
        )

    @classmethod
    def from_spec(
        cls,
        width: int,
        height: int,
        cell_size: float = 1.0,
        obstacles: Iterable[Sequence[int]] = (),
        connectivity: int = 8,
        allow_stay: bool = True,
    ) -> "GridMap":
        """Build a map from the JSON-style spec.

        Obstacles are ``[x, y]`` single cells or ``[x0, y0, x1, y1]``
        inclusive rectangles.
        """
        blocked = np.zeros((height, width), dtype=bool)
        for obs in obstacles or ():
            vals = [int(v) for v in obs]
            if len(vals) == 2:
                x, y = vals
                if not (0 <= x < width and 0 <= y < height):
                    raise GridError(f"obstacle {obs} out of bounds")
                blocked[y, x] = True
            elif len(vals) == 4:
                x0, y0, x1, y1 = vals
                x0, x1 = sorted((x0, x1))
                y0, y1 = sorted((y0, y1))
                if x0 < 0 or y0 < 0 or x1 >= width or y1 >= height:
                    raise GridError(f"obstacle rectangle {obs} out of bounds")
                blocked[y0 : y1 + 1, x0 : x1 + 1] = True
            else:
                raise GridError(f"obstacle {obs} must be [x,y] or [x0,y0,x1,y1]")
        return cls(width, height, cell_size, blocked, connectivity, allow_stay)

    def obstacle_list(self) -> list[list[int]]:
        ys, xs = np.nonzero(self.blocked)
        return [[int(x), int(y)] for x, y in zip(xs, ys)]

    # -- derived structure ----------------------------------------------

    @cached_property
    def table(self) -> SuccessorTable:
        offsets = OFFSETS_8 if self.connectivity == 8 else OFFSETS_4
        w, h, n = self.width, self.height, self.n_cells
        open_ = ~self.blocked
        X, Y = np.meshgrid(np.arange(w), np.arange(h))

        ok_list: list[np.ndarray] = []
        tgt_list: list[np.ndarray] = []
        costs: list[float] = []
        if self.allow_stay:
            ok_list.append(open_)
            tgt_list.append(Y * w + X)
            costs.append(0.0)
        for dx, dy in offsets:
            tx, ty = X + dx, Y + dy
            inb = (0 <= tx) & (tx < w) & (0 <= ty) & (ty < h)
            txc = np.clip(tx, 0, w - 1)
            tyc = np.clip(ty, 0, h - 1)
            ok = inb & open_ & open_[tyc, txc]
            if dx != 0 and dy != 0:
                # no corner cutting: a diagonal needs an open orthogonal cell
                ok &= open_[Y, txc] | open_[tyc, X]
            ok_list.append(ok)
            tgt_list.append(tyc * w + txc)
            costs.append(self.cell_size * (SQRT2 if dx and dy else 1.0))

        okm = np.stack([o.ravel() for o in ok_list])          # (K, n)
        tgtm = np.stack([t.ravel() for t in tgt_list])        # (K, n)
        costv = np.asarray(costs)
        degree = okm.sum(axis=0).astype(np.int32)
        if (degree[open_.ravel()] < 1).any():
            raise GridError("map has an unblocked cell with no successor")
        max_deg = int(degree.max()) if degree.size else 0

        succ = np.full((n, max_deg), -1, dtype=np.int32)
        cost = np.full((n, max_deg), np.inf)
        valid = np.zeros((n, max_deg), dtype=bool)
        pos = okm.cumsum(axis=0) - 1
        k_idx, cell_idx = np.nonzero(okm)
        p = pos[k_idx, cell_idx]
        succ[cell_idx, p] = tgtm[k_idx, cell_idx]
        cost[cell_idx, p] = costv[k_idx]
        valid[cell_idx, p] = True
        for arr in (succ, cost, valid, degree):
            arr.setflags(write=False)
        return SuccessorTable(succ, cost, valid, degree)

    @cached_property
    def _graph(self) -> csr_matrix:
        t = self.table
        mask = t.valid & (t.cost > 0)  # drop the zero-cost stay loop
        rows = np.repeat(np.arange(self.n_cells), t.max_degree)[mask.ravel()]
        cols = t.succ[mask].astype(np.int64)
        data = t.cost[mask]
        return csr_matrix((data, (rows, cols)), shape=(self.n_cells, self.n_cells))


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Exact shortest-path cost from every cell to one goal (inf if cut off)."""

    goal: Cell
    dist: np.ndarray  # (n_cells,) float64


def _check_cell(grid: GridMap, cell: Cell, what: str = "cell") -> Cell:
    if not grid.in_bounds(cell.x, cell.y) or cell.index != cell.y * grid.width + cell.x:
        raise GridError(f"{what} {cell} is not a valid cell of this map")
    if grid.is_blocked(cell):
        raise GridError(f"{what} {cell.coords()} is blocked")
    return cell


def successors(grid: GridMap, cell: Cell) -> list[Cell]:
    """Reachable one-step successors of ``cell``, in canonical order."""
    _check_cell(grid, cell)
    t = grid.table
    row = t.succ[cell.index]
    return [grid.cell_at(i) for i in row[: t.degree[cell.index]]]


def step_cost(grid: GridMap, a: Cell, b: Cell) -> float:
    """Length of the move a -> b; raises if b is not a successor of a."""
    _check_cell(grid, a)
    slot = grid.table.slot_of(a.index, b.index)
    if slot < 0:
        raise GridError(f"{b.coords()} is not a successor of {a.coords()}")
    return float(grid.table.cost[a.index, slot])


def distance_field(grid: GridMap, goal: Cell) -> DistanceField:
    """Shortest-path cost from every cell to ``goal`` over the lattice graph."""
    _check_cell(grid, goal, "goal")
    dist = _sp_dijkstra(grid._graph, directed=True, indices=goal.index)
    dist.setflags(write=False)
    return DistanceField(goal, dist)


def distance_matrix(grid: GridMap, goals: Sequence[Cell]) -> np.ndarray:
    """Stacked distance fields, one row per goal."""
    for g in goals:
        _check_cell(grid, g, "goal")
    idx = [g.index for g in goals]
    dist = _sp_dijkstra(grid._graph, directed=True, indices=idx)
    dist = np.atleast_2d(dist)
    dist.setflags(write=False)
    return dist


def shortest_grid_path(grid: GridMap, start: Cell, end: Cell) -> list[Cell]:
    """A minimum-cost lattice path from start to end, inclusive of both."""
    _check_cell(grid, start)
    _check_cell(grid, end)
    if start.index == end.index:
        return [start]
    dist, pred = _sp_dijkstra(
        grid._graph, directed=True, indices=end.index, return_predecessors=True
    )
    if not np.isfinite(dist[start.index]):
        raise GridError(f"no path from {start.coords()} to {end.coords()}")
    path = [start]
    cur = start.index
    while cur != end.index:
        cur = int(pred[cur])
        path.append(grid.cell_at(cur))
    return path
