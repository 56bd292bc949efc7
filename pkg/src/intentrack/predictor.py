"""Sampling-based multi-step forecasts with an exact one-step mixture for
cross-checking, plus covariance-ellipse summaries.

The forecast draws a fixed budget of rollouts, allocated across goals in
proportion to the goal posterior (largest-remainder rounding). Each rollout
keeps its goal fixed and follows the step kernel at that goal's current
temperature estimate. Per-sample draws come from counter-based streams keyed
by (seed, goal, sample, step), so serial and parallel schedules produce
byte-identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import streams
from .grid import Cell, DistanceField
from .inference import Belief, IntentModel, estimate_alpha_all
from .kinematics import (
    StepDistribution,
    boltzmann_probs,
    progress_cost_gather,
    progress_cost_grid,
    sample_step,
    step_distribution,
)


class PredictorError(ValueError):
    """Invalid forecast request."""


@dataclass(frozen=True)
class Ellipse:
    """Constant-Mahalanobis-distance contour of a 2x2 covariance."""

    center: tuple[float, float]
    semi_major: float
    semi_minor: float
    angle: float          # radians from the horizontal axis, in (-pi/2, pi/2]
    n_sigma: float = 1.0


@dataclass(frozen=True, eq=False)
class PredictionResult:
    """Per-horizon-step sample mean and covariance in world coordinates."""

    horizon: int
    means: np.ndarray            # (T, 2)
    covs: np.ndarray             # (T, 2, 2)
    counts: np.ndarray           # (N,) rollouts allocated per goal
    samples: np.ndarray | None = None   # (M, T) cell indices, optional

    @property
    def n_samples(self) -> int:
        return int(self.counts.sum())

    def ellipses(self, n_sigma: float = 1.0) -> list[Ellipse]:
        return [
            ellipse_from_cov(self.means[t], self.covs[t], n_sigma)
            for t in range(self.horizon)
        ]


def allocate_samples(goal_post: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder rounding of ``goal_post * total``; ties go to the
    lower goal index. Always sums to ``total``."""
    if total < 1:
        raise PredictorError("need at least one sample")
    p = np.asarray(goal_post, dtype=float)
    exact = p * total
    base = np.floor(exact).astype(np.int64)
    remainder = int(total - base.sum())
    if remainder > 0:
        order = np.argsort(-(exact - base), kind="stable")
        base[order[:remainder]] += 1
    return base


def rollout(
    rng: np.random.Generator,
    model: IntentModel,
    start: Cell,
    goal_id: int,
    alpha: float,
    horizon: int,
) -> list[Cell]:
    """One simulated future of ``horizon`` steps under a fixed goal/alpha."""
    if horizon < 1:
        raise PredictorError("horizon must be >= 1")
    field = DistanceField(model.goals[goal_id], model.fields[goal_id])
    cur = start
    out = []
    for _ in range(horizon):
        dist = step_distribution(model.grid, field, cur, alpha, goal_id)
        cur = sample_step(rng, dist)
        out.append(cur)
    return out


def _roll_chunk(model, traj, cells0, gid, sid, alphas, seed, horizon, lo, hi):
    table = model.table
    fields = model.fields
    succ_all, valid_all, cost_all = table.succ, table.valid, table.cost
    cur = cells0[lo:hi].copy()
    g = gid[lo:hi]
    s = sid[lo:hi]
    a = alphas[lo:hi, None]
    hkey = streams.mix64(seed, g, s)
    rows = np.arange(cur.size)
    for t in range(horizon):
        succ = succ_all[cur]
        valid = valid_all[cur]
        safe = np.where(valid, succ, cur[:, None])
        d_next = fields[g[:, None], safe]
        d_here = fields[g, cur]
        with np.errstate(invalid="ignore"):
            d = cost_all[cur] + d_next - d_here[:, None]
            ok = valid & np.isfinite(d)
            d = np.where(ok, d, np.inf)
            w = np.exp(-a * (d - d.min(axis=1, keepdims=True)))
        w = np.where(ok, w, 0.0)
        cum = np.cumsum(w, axis=1)
        tot = cum[:, -1]
        u = streams.uniforms_from(hkey, t)
        choice = (cum < (u * tot)[:, None]).sum(axis=1)
        # rows with no reachable successor (tot == 0) stay in place
        cur = np.where(tot > 0, safe[rows, choice], cur)
        traj[lo:hi, t] = cur


def predict(
    model: IntentModel,
    belief: Belief,
    n_samples: int = 500,
    horizon: int = 20,
    seed: int = 0,
    schedule: str = "serial",
    chunks: int = 4,
    return_samples: bool = False,
) -> PredictionResult:
    """Monte Carlo forecast of the next ``horizon`` steps.

    Deterministic given (seed, belief, n_samples, horizon) regardless of the
    rollout schedule.
    """
    if n_samples < 1:
        raise PredictorError("need at least one sample")
    if horizon < 1:
        raise PredictorError("horizon must be >= 1")
    if schedule not in ("serial", "parallel"):
        raise PredictorError("schedule must be 'serial' or 'parallel'")

    counts = allocate_samples(belief.goal_post, n_samples)
    alphas_by_goal = estimate_alpha_all(model, belief)
    gid = np.repeat(np.arange(model.n_goals), counts)
    sid = np.concatenate([np.arange(c) for c in counts]) if counts.any() else np.zeros(0, int)
    alphas = alphas_by_goal[gid]
    cells0 = np.full(n_samples, belief.last_state.index, dtype=np.int64)
    traj = np.empty((n_samples, horizon), dtype=np.int64)

    if schedule == "serial" or n_samples < 2 * chunks:
        _roll_chunk(model, traj, cells0, gid, sid, alphas, seed, horizon, 0, n_samples)
    else:
        bounds = np.linspace(0, n_samples, chunks + 1).astype(int)
        with ThreadPoolExecutor(max_workers=chunks) as pool:
            futs = [
                pool.submit(
                    _roll_chunk, model, traj, cells0, gid, sid, alphas,
                    seed, horizon, int(lo), int(hi),
                )
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            for f in futs:
                f.result()

    w = model.grid.width
    pos = np.stack([traj % w, traj // w], axis=-1).astype(float) * model.grid.cell_size
    means = pos.mean(axis=0)                          # (T, 2)
    dev = pos - means[None, :, :]
    covs = np.einsum("mti,mtj->tij", dev, dev) / n_samples
    for arr in (means, covs, counts):
        arr.setflags(write=False)
    return PredictionResult(
        horizon, means, covs, counts, traj if return_samples else None
    )


def exact_step_distribution(
    model: IntentModel, belief: Belief, base: Cell | None = None
) -> StepDistribution:
    """Exact one-step predictive mixture over successors of ``base``:
    goal posterior x temperature weights x step kernel, summed out."""
    base = belief.last_state if base is None else base
    deg = int(model.table.degree[base.index])
    if deg == 0:
        raise PredictorError(f"cell {base.coords()} has no successors")
    d = progress_cost_grid(model.table, model.fields, base.index)       # (N, S)
    probs = boltzmann_probs(d[:, None, :], model.alpha_points[None, :])  # (N, G, S)
    mixture = np.einsum("i,ig,igs->s", belief.goal_post, belief.alpha_w, probs)
    support = tuple(model.grid.cell_at(i) for i in model.table.succ[base.index, :deg])
    p = mixture[:deg]
    total = p.sum()
    if total <= 0:
        raise PredictorError("predictive mixture has no mass")
    p = p / total
    p.setflags(write=False)
    return StepDistribution(base, support, p, None)


def ellipse_from_cov(mean, cov, n_sigma: float = 1.0) -> Ellipse:
    """Axis lengths and orientation of the n-sigma Mahalanobis contour."""
    c = np.asarray(cov, dtype=float)
    c = 0.5 * (c + c.T)
    vals, vecs = np.linalg.eigh(c)
    if vals[0] < -1e-9:
        raise PredictorError(f"covariance has negative eigenvalue {vals[0]}")
    vals = np.clip(vals, 0.0, None)
    major, minor = float(vals[1]), float(vals[0])
    if major - minor <= 1e-12 * max(major, 1.0):
        angle = 0.0  # circle: orientation is arbitrary
    else:
        v = vecs[:, 1]
        angle = math.atan2(float(v[1]), float(v[0]))
        if angle > math.pi / 2:
            angle -= math.pi
        elif angle <= -math.pi / 2:
            angle += math.pi
    m = np.asarray(mean, dtype=float)
    return Ellipse(
        (float(m[0]), float(m[1])),
        n_sigma * math.sqrt(major),
        n_sigma * math.sqrt(minor),
        angle,
        n_sigma,
    )
