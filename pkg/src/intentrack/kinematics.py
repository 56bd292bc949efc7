"""Goal-directed stochastic step kernel.

A move is scored by how much ground it loses relative to a shortest path to
the goal (``progress_cost``); successor probabilities are
softmax(-alpha * progress_cost), so ``alpha = 0`` is a uniform walk over the
reachable successors and large ``alpha`` is near-greedy shortest-path
following. Weights are shifted by the row minimum before exponentiation to
stay well-conditioned at large alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Cell, DistanceField, GridError, GridMap, SuccessorTable

# progress costs below this are treated as shortest-path float noise
_NEG_TOL = -1e-6


class KinematicsError(ValueError):
    """Step-kernel evaluation failed (unreachable goal, empty support, ...)."""


@dataclass(frozen=True, eq=False)
class StepDistribution:
    """One-step successor distribution from ``base`` under a fixed goal."""

    base: Cell
    support: tuple[Cell, ...]
    probs: np.ndarray
    goal_id: int | None = None

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise KinematicsError("support and probs length mismatch")


def progress_cost(grid: GridMap, field: DistanceField, c: Cell, c_next: Cell) -> float:
    """step_cost(c, c_next) + dist(c_next) - dist(c).

    Zero exactly on shortest-path moves (staying counts); +inf when the
    successor cannot reach the goal, which callers turn into zero mass.
    """
    slot = grid.table.slot_of(c.index, c_next.index)
    if slot < 0:
        raise GridError(f"{c_next.coords()} is not a successor of {c.coords()}")
    d_here = field.dist[c.index]
    if not np.isfinite(d_here):
        raise KinematicsError(f"base cell {c.coords()} cannot reach the goal")
    d_next = field.dist[c_next.index]
    if not np.isfinite(d_next):
        return math.inf
    v = float(grid.table.cost[c.index, slot] + d_next - d_here)
    if v < 0.0:
        if v < _NEG_TOL:
            raise KinematicsError(f"negative progress cost {v}")
        v = 0.0
    return v


def progress_cost_rows(
    table: SuccessorTable, dist: np.ndarray, cells: np.ndarray
) -> np.ndarray:
    """Progress costs for each cell's successor row under one distance field.

    Returns (k, S); padding slots and unreachable successors carry +inf, as
    do whole rows whose base cell cannot reach the goal.
    """
    cells = np.asarray(cells, dtype=np.int64)
    succ = table.succ[cells]
    valid = table.valid[cells]
    safe = np.where(valid, succ, 0)
    d_next = dist[safe]
    d_here = dist[cells]
    with np.errstate(invalid="ignore"):
        raw = table.cost[cells] + d_next - d_here[..., None]
    ok = valid & np.isfinite(d_next) & np.isfinite(d_here)[..., None]
    out = np.where(ok, raw, np.inf)
    if out.min(initial=np.inf) < _NEG_TOL:
        raise KinematicsError("negative progress cost from inconsistent field")
    return np.maximum(out, 0.0)


def progress_cost_grid(
    table: SuccessorTable, fields: np.ndarray, cell_index: int
) -> np.ndarray:
    """Per-goal progress-cost rows for one base cell: (N, S)."""
    succ = table.succ[cell_index]
    valid = table.valid[cell_index]
    safe = np.where(valid, succ, 0)
    d_next = fields[:, safe]                       # (N, S)
    d_here = fields[:, cell_index]                 # (N,)
    with np.errstate(invalid="ignore"):
        raw = table.cost[cell_index][None, :] + d_next - d_here[:, None]
    ok = valid[None, :] & np.isfinite(d_next) & np.isfinite(d_here)[:, None]
    out = np.where(ok, raw, np.inf)
    if out.min(initial=np.inf) < _NEG_TOL:
        raise KinematicsError("negative progress cost from inconsistent field")
    return np.maximum(out, 0.0)


def progress_cost_gather(
    table: SuccessorTable, fields: np.ndarray, goal_ids: np.ndarray, cells: np.ndarray
) -> np.ndarray:
    """Progress-cost rows for samples at ``cells`` chasing ``goal_ids``: (M, S)."""
    cells = np.asarray(cells, dtype=np.int64)
    goal_ids = np.asarray(goal_ids, dtype=np.int64)
    succ = table.succ[cells]
    valid = table.valid[cells]
    safe = np.where(valid, succ, 0)
    d_next = fields[goal_ids[:, None], safe]
    d_here = fields[goal_ids, cells]
    with np.errstate(invalid="ignore"):
        raw = table.cost[cells] + d_next - d_here[:, None]
    ok = valid & np.isfinite(d_next) & np.isfinite(d_here)[:, None]
    out = np.where(ok, raw, np.inf)
    if out.min(initial=np.inf) < _NEG_TOL:
        raise KinematicsError("negative progress cost from inconsistent field")
    return np.maximum(out, 0.0)


def boltzmann_probs(dbar: np.ndarray, alpha) -> np.ndarray:
    """softmax(-alpha * dbar) over the last axis, +inf entries get zero mass.

    ``alpha`` broadcasts against the leading axes of ``dbar``. Rows without
    any finite entry come back all-zero; callers decide whether that is an
    error.
    """
    d = np.asarray(dbar, dtype=float)
    a = np.asarray(alpha, dtype=float)[..., None]
    finite = np.isfinite(d)
    dmin = np.min(np.where(finite, d, np.inf), axis=-1, keepdims=True)
    with np.errstate(invalid="ignore"):
        shift = np.where(finite, d - dmin, 0.0)
    w = np.exp(-a * shift)
    w = np.where(finite, w, 0.0)
    tot = w.sum(axis=-1, keepdims=True)
    safe_tot = np.where(tot > 0, tot, 1.0)
    return np.where(tot > 0, w / safe_tot, 0.0)


def step_distribution(
    grid: GridMap,
    field: DistanceField,
    c: Cell,
    alpha: float,
    goal_id: int | None = None,
) -> StepDistribution:
    """The full one-step kernel at ``c`` for the given goal field and alpha."""
    alpha = float(alpha)
    if not (alpha >= 0 and math.isfinite(alpha)):
        raise KinematicsError("alpha must be a finite non-negative number")
    if not np.isfinite(field.dist[c.index]):
        raise KinematicsError(f"cell {c.coords()} cannot reach goal {field.goal.coords()}")
    deg = int(grid.table.degree[c.index])
    if deg == 0:
        raise GridError(f"cell {c.coords()} has no successors")
    d = progress_cost_rows(grid.table, field.dist, np.asarray([c.index]))[0]
    p = boltzmann_probs(d, alpha)
    if p.sum() <= 0:
        raise KinematicsError("no reachable successor")
    support = tuple(grid.cell_at(i) for i in grid.table.succ[c.index, :deg])
    probs = np.array(p[:deg])
    probs.setflags(write=False)
    return StepDistribution(c, support, probs, goal_id)


def sample_step(rng: np.random.Generator, dist: StepDistribution) -> Cell:
    """Inverse-CDF draw from a step distribution."""
    cum = np.cumsum(dist.probs)
    cum /= cum[-1]
    u = rng.random()
    i = int(np.searchsorted(cum, u, side="right"))
    return dist.support[min(i, len(dist.support) - 1)]
