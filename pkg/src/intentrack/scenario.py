"""Ground-truth target simulation and experiment presets.

A scenario scripts the reference target: a goal schedule with one temperature
per segment, simulated step by step with the same stochastic kernel the
inference assumes. The bundled presets reproduce the two case studies and
the randomized Monte Carlo protocol at desk scale: a 101x81 lattice spanning
10 x 8 world units with twelve candidate goals spread around the boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .grid import Cell, GridError, GridMap
from .inference import GoalSet, InferenceError, MethodConfig
from .kinematics import sample_step, step_distribution
from .grid import DistanceField, distance_matrix

DEFAULT_WIDTH = 101
DEFAULT_HEIGHT = 81
DEFAULT_CELL_SIZE = 0.1   # grid spans 10 x 8 world units
LAB_CELL_SIZE = 0.045     # hardware-arena preset: ~4.5 x 3.6 world units
DEFAULT_N_GOALS = 12

CASE1_ALPHA = 50.0
CASE1_FIXED_ALPHA = 10.0
CASE2_ALPHA = 20.0
CASE2_FIXED_ALPHA = 80.0
MC_FIXED_ALPHA = 20.0
MC_SWITCH_STEPS = (50, 100)


class ScenarioError(ValueError):
    """Invalid scenario description."""


@dataclass(frozen=True)
class Segment:
    goal_id: int
    alpha: float
    duration: int

    def __post_init__(self):
        if self.duration < 1:
            raise ScenarioError("segment duration must be >= 1")
        if not self.alpha >= 0:
            raise ScenarioError("segment alpha must be >= 0")


@dataclass(frozen=True)
class PredictionSpec:
    n_samples: int = 500
    horizon: int = 20
    n_sigma: float = 2.0


@dataclass(frozen=True, eq=False)
class Scenario:
    grid: GridMap
    goals: GoalSet
    start: Cell
    segments: tuple[Segment, ...]
    seed: int = 0
    methods: tuple[MethodConfig, ...] = ()
    prediction: PredictionSpec = field(default_factory=PredictionSpec)
    name: str = "custom"

    def __post_init__(self):
        if not self.segments:
            raise ScenarioError("scenario needs at least one segment")
        n = len(self.goals)
        for seg in self.segments:
            if not 0 <= seg.goal_id < n:
                raise ScenarioError(f"segment goal id {seg.goal_id} out of range")
        if self.grid.is_blocked(self.start):
            raise ScenarioError("start cell is blocked")

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=int(seed))


@dataclass(frozen=True, eq=False)
class TrajectoryTruth:
    """Simulated reference path plus per-step ground-truth labels.

    ``goal_ids[k]`` / ``alpha_stars[k]`` describe the segment that drives the
    move out of step k, so label change points line up with the scripted
    switch steps.
    """

    cells: tuple[Cell, ...]
    goal_ids: np.ndarray
    alpha_stars: np.ndarray

    def __len__(self) -> int:
        return len(self.cells)


@dataclass
class TraceRecord:
    """One evaluation row: a step of one method on one trial."""

    trial: int
    step: int
    position: Cell
    true_goal: int
    alpha_star: float
    method: str
    true_goal_prob: float
    alpha_hat: float
    alpha_error: float
    prediction_error: float | None
    time_ms: float


def boundary_goals(grid: GridMap, n: int = DEFAULT_N_GOALS) -> GoalSet:
    """``n`` goal cells evenly spaced along the boundary rectangle,
    walking from (0, 0) in row-major reading order of the perimeter."""
    w, h = grid.width, grid.height
    perimeter = 2 * (w - 1) + 2 * (h - 1)
    cells = []
    for i in range(n):
        arc = round(i * perimeter / n)
        if arc < w - 1:
            x, y = arc, 0
        elif arc < (w - 1) + (h - 1):
            x, y = w - 1, arc - (w - 1)
        elif arc < 2 * (w - 1) + (h - 1):
            x, y = (w - 1) - (arc - (w - 1) - (h - 1)), h - 1
        else:
            x, y = 0, (h - 1) - (arc - 2 * (w - 1) - (h - 1))
        cells.append(grid.cell(x, y))
    return GoalSet(tuple(cells))


def default_grid(cell_size: float = DEFAULT_CELL_SIZE) -> GridMap:
    """Preset arena. The stay action is disabled here: the reference target
    crosses the arena within its scripted segments (center to boundary in
    ~50 steps), which requires a move on every step; the library default for
    ad-hoc maps keeps the stay action available."""
    return GridMap(DEFAULT_WIDTH, DEFAULT_HEIGHT, cell_size, allow_stay=False)


def default_methods(fixed_alpha: float) -> tuple[MethodConfig, ...]:
    """All four ablation variants; B and G use the given fixed temperature."""
    return tuple(MethodConfig(variant=v, fixed_alpha=fixed_alpha) for v in "BAGP")


def _base_scenario(segments, fixed_alpha, seed, name, cell_size=DEFAULT_CELL_SIZE):
    grid = default_grid(cell_size)
    goals = boundary_goals(grid)
    start = grid.cell(grid.width // 2, grid.height // 2)
    return Scenario(
        grid=grid,
        goals=goals,
        start=start,
        segments=tuple(segments),
        seed=seed,
        methods=default_methods(fixed_alpha),
        prediction=PredictionSpec(),
        name=name,
    )


def make_case1(seed: int = 0) -> Scenario:
    """Sharp target (alpha* = 50) visiting three goals, switching at steps
    50 and 100; the non-adaptive variants run a much smaller fixed alpha."""
    segments = [
        Segment(1, CASE1_ALPHA, 50),
        Segment(5, CASE1_ALPHA, 50),
        Segment(9, CASE1_ALPHA, 50),
    ]
    return _base_scenario(segments, CASE1_FIXED_ALPHA, seed, "case1")


def make_case2(seed: int = 0) -> Scenario:
    """Noisier target (alpha* = 20) switching goals once after step 100;
    the non-adaptive variants run a much larger fixed alpha."""
    segments = [
        Segment(1, CASE2_ALPHA, 100),
        Segment(7, CASE2_ALPHA, 150),
    ]
    return _base_scenario(segments, CASE2_FIXED_ALPHA, seed, "case2")


def make_mc_trial(seed: int) -> Scenario:
    """One randomized trial: the run starts toward the first case-study goal,
    then the goal is redrawn uniformly over all candidates at steps 50 and
    100 (a redraw may repeat the current goal); per-segment alpha* is uniform
    on [0, 100]."""
    rng = np.random.default_rng(seed)
    n = DEFAULT_N_GOALS
    redraws = rng.integers(n, size=2)
    alphas = rng.uniform(0.0, 100.0, size=3)
    segments = [
        Segment(1, float(alphas[0]), MC_SWITCH_STEPS[0]),
        Segment(int(redraws[0]), float(alphas[1]), MC_SWITCH_STEPS[1] - MC_SWITCH_STEPS[0]),
        Segment(int(redraws[1]), float(alphas[2]), 50),
    ]
    return _base_scenario(segments, MC_FIXED_ALPHA, seed, "mc")


PRESETS = {
    "case1": make_case1,
    "case2": make_case2,
    "mc": make_mc_trial,
}


def generate_trajectory(
    scenario: Scenario,
    rng: np.random.Generator | None = None,
    fields: np.ndarray | None = None,
) -> TrajectoryTruth:
    """Simulate the scripted target.

    Segments run for their full duration; the final segment also stops as
    soon as the target reaches its goal.
    """
    if rng is None:
        rng = np.random.default_rng(scenario.seed)
    if fields is None:
        fields = distance_matrix(scenario.grid, list(scenario.goals))
    cells = [scenario.start]
    goal_ids: list[int] = []
    alpha_stars: list[float] = []
    cur = scenario.start
    last = len(scenario.segments) - 1
    for si, seg in enumerate(scenario.segments):
        goal = scenario.goals[seg.goal_id]
        dfield = DistanceField(goal, fields[seg.goal_id])
        for _ in range(seg.duration):
            if si == last and cur.index == goal.index:
                break
            dist = step_distribution(scenario.grid, dfield, cur, seg.alpha, seg.goal_id)
            cur = sample_step(rng, dist)
            cells.append(cur)
            goal_ids.append(seg.goal_id)
            alpha_stars.append(seg.alpha)
    # label for the final observation: the segment that was active last
    goal_ids.append(scenario.segments[last].goal_id)
    alpha_stars.append(scenario.segments[last].alpha)
    return TrajectoryTruth(
        tuple(cells),
        np.asarray(goal_ids, dtype=np.int64),
        np.asarray(alpha_stars, dtype=float),
    )


# -- JSON interchange ----------------------------------------------------


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "map": {
            "width": s.grid.width,
            "height": s.grid.height,
            "cell_size": s.grid.cell_size,
            "obstacles": s.grid.obstacle_list(),
            "connectivity": s.grid.connectivity,
            "allow_stay": s.grid.allow_stay,
        },
        "goals": [[c.x, c.y] for c in s.goals],
        "start": [s.start.x, s.start.y],
        "segments": [
            {"goal": seg.goal_id, "alpha": seg.alpha, "duration": seg.duration}
            for seg in s.segments
        ],
        "seed": s.seed,
        "methods": [m.to_dict() for m in s.methods],
        "prediction": {
            "M": s.prediction.n_samples,
            "T": s.prediction.horizon,
            "n_sigma": s.prediction.n_sigma,
        },
    }


def scenario_from_dict(d: dict, name: str = "custom") -> Scenario:
    try:
        m = d["map"]
        grid = GridMap.from_spec(
            int(m["width"]),
            int(m["height"]),
            float(m.get("cell_size", 1.0)),
            m.get("obstacles", ()),
            int(m.get("connectivity", 8)),
            bool(m.get("allow_stay", True)),
        )
        goals = GoalSet.from_coords(grid, d["goals"])
        sx, sy = d["start"]
        start = grid.cell(int(sx), int(sy))
        segments = tuple(
            Segment(int(seg["goal"]), float(seg["alpha"]), int(seg["duration"]))
            for seg in d["segments"]
        )
        methods = tuple(MethodConfig.from_dict(md) for md in d.get("methods", ()))
        if not methods:
            methods = default_methods(MC_FIXED_ALPHA)
        pred = d.get("prediction", {})
        prediction = PredictionSpec(
            n_samples=int(pred.get("M", 500)),
            horizon=int(pred.get("T", 20)),
            n_sigma=float(pred.get("n_sigma", 2.0)),
        )
        return Scenario(
            grid=grid,
            goals=goals,
            start=start,
            segments=segments,
            seed=int(d.get("seed", 0)),
            methods=methods,
            prediction=prediction,
            name=name,
        )
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError, GridError, InferenceError) as exc:
        raise ScenarioError(f"bad scenario description: {exc}") from exc


def save_scenario(s: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2))


def load_scenario(path: str | Path) -> Scenario:
    p = Path(path)
    try:
        d = json.loads(p.read_text())
    except FileNotFoundError:
        raise ScenarioError(f"scenario file not found: {p}")
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON in {p}: line {exc.lineno}: {exc.msg}")
    return scenario_from_dict(d, name=p.stem)
