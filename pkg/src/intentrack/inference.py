"""Joint recursive estimation of a moving target's destination and its
path-following temperature.

The belief couples a categorical posterior over candidate goals with one
discretized temperature density per goal. Each observed move first pushes
the goal posterior through the goal-switching chain, re-mixes the per-goal
temperature weights accordingly, then applies a Bayes update with the step
kernel marginalized over the temperature grid.

The four method variants are configurations of this one engine:

    B   fixed goal model (identity switching) and fixed temperature
    A   fixed goal model, adaptive temperature
    G   goal switching, fixed temperature
    P   goal switching and adaptive temperature
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .grid import Cell, GridError, GridMap, SuccessorTable, distance_matrix, shortest_grid_path
from .kinematics import boltzmann_probs, progress_cost_grid

VARIANTS = ("B", "A", "G", "P")

# below this prior mass the conditional temperature mixture is ill-defined;
# fall back to the unconditional mixture (the row is weighted by ~0 anyway)
PRIOR_FLOOR = 1e-300


class InferenceError(ValueError):
    """Invalid inference configuration or input."""


class ObservationGapError(InferenceError):
    """Observed state is not one step from the previous one."""


@dataclass(frozen=True)
class GoalSet:
    """Ordered candidate destinations."""

    cells: tuple[Cell, ...]

    def __post_init__(self):
        if len(self.cells) < 2:
            raise InferenceError("need at least two candidate goals")
        if len({c.index for c in self.cells}) != len(self.cells):
            raise InferenceError("candidate goals must be distinct")

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def __getitem__(self, i: int) -> Cell:
        return self.cells[i]

    def index_of(self, cell: Cell) -> int:
        for i, c in enumerate(self.cells):
            if c.index == cell.index:
                return i
        raise InferenceError(f"{cell.coords()} is not a candidate goal")

    @classmethod
    def from_coords(cls, grid: GridMap, coords: Iterable[Sequence[int]]) -> "GoalSet":
        cells = []
        for xy in coords:
            cell = grid.cell(int(xy[0]), int(xy[1]))
            if grid.is_blocked(cell):
                raise InferenceError(f"goal {tuple(xy)} is blocked")
            cells.append(cell)
        return cls(tuple(cells))


def goal_transition_matrix(n_goals: int, p_stay: float) -> np.ndarray:
    """Row-stochastic switching matrix: keep the goal with ``p_stay``,
    otherwise jump uniformly to one of the others."""
    if not (0.0 < p_stay <= 1.0):
        raise InferenceError("p_stay must be in (0, 1]")
    if n_goals < 2:
        raise InferenceError("need at least two goals")
    off = (1.0 - p_stay) / (n_goals - 1)
    H = np.full((n_goals, n_goals), off)
    np.fill_diagonal(H, p_stay)
    return H


@dataclass(frozen=True, eq=False)
class AlphaGrid:
    """Support points for the discretized temperature density."""

    points: np.ndarray
    log_spaced: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 1:
            raise InferenceError("alpha grid must be a 1-D array")
        if not np.all(np.isfinite(pts)) or np.any(pts < 0):
            raise InferenceError("alpha grid points must be finite and >= 0")
        if pts.size > 1 and not np.all(np.diff(pts) > 0):
            raise InferenceError("alpha grid points must be strictly increasing")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size

    @classmethod
    def log_spaced_grid(cls, lo: float, hi: float, n: int) -> "AlphaGrid":
        if not (0 < lo < hi) or n < 2:
            raise InferenceError("need 0 < lo < hi and n >= 2")
        return cls(np.geomspace(lo, hi, n), log_spaced=True)

    @classmethod
    def degenerate(cls, value: float) -> "AlphaGrid":
        return cls(np.asarray([float(value)]))


@dataclass(frozen=True)
class MethodConfig:
    """Variant selector plus priors, switching and temperature-grid settings."""

    variant: str = "P"
    fixed_alpha: float = 20.0
    prior_shape: float = 3.0
    prior_scale: float = 3.0
    p_stay: float = 0.9975
    grid_lo: float = 0.05
    grid_hi: float = 200.0
    grid_points: int = 128
    grid_log: bool = True
    estimator: str = "expectation"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InferenceError(f"variant must be one of {VARIANTS}")
        if self.estimator not in ("expectation", "mode"):
            raise InferenceError("estimator must be 'expectation' or 'mode'")
        if not (self.fixed_alpha >= 0 and math.isfinite(self.fixed_alpha)):
            raise InferenceError("fixed_alpha must be finite and >= 0")
        if self.prior_shape <= 0 or self.prior_scale <= 0:
            raise InferenceError("gamma prior parameters must be positive")
        if not (0.0 < self.p_stay <= 1.0):
            raise InferenceError("p_stay must be in (0, 1]")

    @property
    def adaptive_alpha(self) -> bool:
        return self.variant in ("A", "P")

    @property
    def adaptive_goal(self) -> bool:
        return self.variant in ("G", "P")

    def alpha_grid(self) -> AlphaGrid:
        if not self.adaptive_alpha:
            return AlphaGrid.degenerate(self.fixed_alpha)
        if self.grid_log:
            return AlphaGrid.log_spaced_grid(self.grid_lo, self.grid_hi, self.grid_points)
        return AlphaGrid(np.linspace(self.grid_lo, self.grid_hi, self.grid_points))

    def transition_matrix(self, n_goals: int) -> np.ndarray:
        if not self.adaptive_goal:
            return np.eye(n_goals)
        return goal_transition_matrix(n_goals, self.p_stay)

    def initial_alpha_weights(self, grid: AlphaGrid) -> np.ndarray:
        if len(grid) == 1:
            return np.ones(1)
        return gamma_grid_weights(grid.points, self.prior_shape, self.prior_scale)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "fixed_alpha": self.fixed_alpha,
            "p_stay": self.p_stay,
            "alpha_grid": {
                "lo": self.grid_lo,
                "hi": self.grid_hi,
                "points": self.grid_points,
                "log": self.grid_log,
            },
            "prior": {"shape": self.prior_shape, "scale": self.prior_scale},
            "estimator": self.estimator,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MethodConfig":
        grid = d.get("alpha_grid", {})
        prior = d.get("prior", {})
        return cls(
            variant=d.get("variant", "P"),
            fixed_alpha=float(d.get("fixed_alpha", 20.0)),
            p_stay=float(d.get("p_stay", 0.9975)),
            grid_lo=float(grid.get("lo", 0.05)),
            grid_hi=float(grid.get("hi", 200.0)),
            grid_points=int(grid.get("points", 128)),
            grid_log=bool(grid.get("log", True)),
            prior_shape=float(prior.get("shape", 3.0)),
            prior_scale=float(prior.get("scale", 3.0)),
            estimator=d.get("estimator", "expectation"),
        )


def gamma_grid_weights(points: np.ndarray, shape: float, scale: float) -> np.ndarray:
    """Gamma(shape, scale) density evaluated at grid points, renormalized."""
    pts = np.asarray(points, dtype=float)
    with np.errstate(divide="ignore"):
        logw = (shape - 1.0) * np.log(pts) - pts / scale
    logw = logw - logw.max()
    w = np.exp(logw)
    return w / w.sum()


@dataclass(frozen=True, eq=False)
class IntentModel:
    """Immutable bundle of everything the update and prediction steps need."""

    grid: GridMap
    goals: GoalSet
    config: MethodConfig
    transition: np.ndarray       # (N, N) goal-switching matrix
    alpha_points: np.ndarray     # (G,)
    prior_alpha_w: np.ndarray    # (G,)
    fields: np.ndarray           # (N, n_cells) distance to each goal

    @property
    def n_goals(self) -> int:
        return len(self.goals)

    @property
    def n_alpha(self) -> int:
        return self.alpha_points.size

    @property
    def table(self) -> SuccessorTable:
        return self.grid.table

    @classmethod
    def build(
        cls,
        grid: GridMap,
        goals: GoalSet,
        config: MethodConfig,
        fields: np.ndarray | None = None,
    ) -> "IntentModel":
        if fields is None:
            fields = distance_matrix(grid, list(goals))
        if fields.shape != (len(goals), grid.n_cells):
            raise InferenceError("distance fields do not match the goal set")
        agrid = config.alpha_grid()
        H = config.transition_matrix(len(goals))
        H.setflags(write=False)
        w0 = config.initial_alpha_weights(agrid)
        w0.setflags(write=False)
        return cls(grid, goals, config, H, agrid.points, w0, fields)


@dataclass(frozen=True, eq=False)
class Belief:
    """Posterior state after ``step`` observations.

    ``goal_post[i]`` is the probability that goal i is the current
    destination; ``alpha_w[i]`` is the discretized temperature density
    conditional on goal i. ``collapsed`` flags a reset after an observation
    with zero likelihood under every goal.
    """

    goal_post: np.ndarray   # (N,)
    alpha_w: np.ndarray     # (N, G)
    last_state: Cell
    step: int = 0
    collapsed: bool = False


def init_belief(model: IntentModel, x0: Cell) -> Belief:
    """Uniform goal prior and the configured temperature prior per goal."""
    n = model.n_goals
    gp = np.full(n, 1.0 / n)
    aw = np.tile(model.prior_alpha_w, (n, 1))
    for arr in (gp, aw):
        arr.setflags(write=False)
    return Belief(gp, aw, x0, step=0)


def evolve_goal_prior(belief: Belief, transition: np.ndarray) -> np.ndarray:
    """One-step evolution of the goal posterior through the switching chain."""
    prior = transition.T @ belief.goal_post
    return prior


def evolve_alpha_weights(
    belief: Belief, transition: np.ndarray, prior: np.ndarray
) -> np.ndarray:
    """Re-mix per-goal temperature weights to match the evolved goal prior."""
    flow = transition * belief.goal_post[:, None]     # flow[j, i]: mass j -> i
    mixed = flow.T @ belief.alpha_w                   # (N, G)
    low = prior < PRIOR_FLOOR
    out = np.empty_like(mixed)
    np.divide(mixed, np.where(low, 1.0, prior)[:, None], out=out)
    if low.any():
        out[low] = belief.goal_post @ belief.alpha_w
    return out


def transition_likelihoods(model: IntentModel, x_prev: Cell, x_new: Cell) -> np.ndarray:
    """P(x_new | x_prev, goal i, alpha_g) for every goal and grid point: (N, G)."""
    slot = model.table.slot_of(x_prev.index, x_new.index)
    if slot < 0:
        raise ObservationGapError(
            f"{x_new.coords()} is not one step from {x_prev.coords()}"
        )
    d = progress_cost_grid(model.table, model.fields, x_prev.index)   # (N, S)
    probs = boltzmann_probs(d[:, None, :], model.alpha_points[None, :])  # (N, G, S)
    return probs[:, :, slot]


def observation_likelihood(
    model: IntentModel,
    x_prev: Cell,
    x_new: Cell,
    goal_id: int,
    alpha_weights: np.ndarray,
) -> tuple[float, np.ndarray]:
    """Marginal likelihood of the move under one goal, plus the per-grid-point
    kernel values (reused by the temperature update)."""
    per_point = transition_likelihoods(model, x_prev, x_new)[goal_id]
    w = np.asarray(alpha_weights, dtype=float)
    if w.shape != per_point.shape:
        raise InferenceError("alpha_weights shape does not match the grid")
    return float(w @ per_point), per_point


def update(model: IntentModel, belief: Belief, x_new: Cell) -> Belief:
    """Recursive belief update for one observed state.

    A stationary observation carries no kernel information (staying is always
    a zero-progress-cost move), so it only advances the step counter.
    """
    if model.grid.is_blocked(x_new):
        raise InferenceError(f"observed cell {x_new.coords()} is blocked")
    if x_new.index == belief.last_state.index:
        return replace(belief, step=belief.step + 1)

    prior = evolve_goal_prior(belief, model.transition)
    evolved_w = evolve_alpha_weights(belief, model.transition, prior)
    per_point = transition_likelihoods(model, belief.last_state, x_new)  # (N, G)
    lik = (evolved_w * per_point).sum(axis=1)                            # (N,)

    joint = prior * lik
    total = joint.sum()
    if not np.isfinite(total) or total <= 0.0:
        goal_post = prior / prior.sum()
        new_w = evolved_w
        collapsed = True
    else:
        goal_post = joint / total
        num = evolved_w * per_point
        row = num.sum(axis=1)
        ok = row > 0
        new_w = np.where(ok[:, None], num / np.where(ok, row, 1.0)[:, None], evolved_w)
        collapsed = False
    for arr in (goal_post, new_w):
        arr.setflags(write=False)
    return Belief(goal_post, new_w, x_new, belief.step + 1, collapsed)


def ingest(model: IntentModel, belief: Belief, x_new: Cell, bridge_gaps: bool = False) -> Belief:
    """Feed one observation; optionally bridge dropped frames by updating
    once per cell along a shortest lattice path between the two states."""
    try:
        return update(model, belief, x_new)
    except ObservationGapError:
        if not bridge_gaps:
            raise
        path = shortest_grid_path(model.grid, belief.last_state, x_new)
        for cell in path[1:]:
            belief = update(model, belief, cell)
        return belief


def estimate_alpha(
    model: IntentModel, belief: Belief, goal_id: int, estimator: str | None = None
) -> float:
    """Temperature point estimate for one goal (posterior mean or mode)."""
    how = estimator or model.config.estimator
    w = belief.alpha_w[goal_id]
    if how == "expectation":
        return float(w @ model.alpha_points)
    if how == "mode":
        return float(model.alpha_points[int(np.argmax(w))])
    raise InferenceError("estimator must be 'expectation' or 'mode'")


def estimate_alpha_all(model: IntentModel, belief: Belief, estimator: str | None = None) -> np.ndarray:
    how = estimator or model.config.estimator
    if how == "expectation":
        return belief.alpha_w @ model.alpha_points
    return model.alpha_points[np.argmax(belief.alpha_w, axis=1)]


def estimate_alpha_overall(model: IntentModel, belief: Belief, estimator: str | None = None) -> float:
    """Posterior-weighted average of the per-goal temperature estimates."""
    return float(belief.goal_post @ estimate_alpha_all(model, belief, estimator))
