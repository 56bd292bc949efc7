"""Batch experiment driver: case studies, randomized trials, metric CSVs,
summary tables, significance reports, and a timing harness.

Deterministic artifacts (metric CSVs, summary, stats report) depend only on
the plan and seed; wall-clock timings go to a separate file because they are
inherently run-dependent.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import streams
from .grid import GridError
from .inference import Belief, IntentModel, ObservationGapError, init_belief, update, ingest, estimate_alpha_overall
from .metrics import aggregate, alpha_error, prediction_error, true_goal_prob
from .predictor import predict
from .scenario import (
    PRESETS,
    Scenario,
    ScenarioError,
    TraceRecord,
    TrajectoryTruth,
    generate_trajectory,
    load_scenario,
)
from .stats import compare_methods

METRIC_COLUMNS = ("pred_error", "true_goal_prob", "alpha_error")


class ConfigError(ValueError):
    """Unusable run plan or scenario."""


@dataclass(frozen=True)
class RunPlan:
    preset: str | None = "case1"
    scenario_path: str | None = None
    methods: tuple[str, ...] = ("B", "A", "G", "P")
    trials: int = 1
    seed: int = 0
    out_dir: str = "results"
    benchmark: bool = False
    jobs: int = 1

    def __post_init__(self):
        if not self.methods:
            raise ConfigError("need at least one method")
        if self.preset is None and self.scenario_path is None:
            raise ConfigError("need a preset or a scenario file")
        if self.preset is not None and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; options: {sorted(PRESETS)}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")


# per-process cache of built models keyed by scenario geometry + config
_MODEL_CACHE: dict = {}


def _models_for(scenario: Scenario, variants: tuple[str, ...]) -> dict[str, IntentModel]:
    from .grid import distance_matrix

    key = (
        scenario.grid.cache_key(),
        tuple(c.index for c in scenario.goals),
    )
    fields = _MODEL_CACHE.get(("fields", key))
    if fields is None:
        fields = distance_matrix(scenario.grid, list(scenario.goals))
        _MODEL_CACHE[("fields", key)] = fields
    out = {}
    by_variant = {m.variant: m for m in scenario.methods}
    for v in variants:
        cfg = by_variant.get(v)
        if cfg is None:
            raise ConfigError(f"scenario does not configure method {v!r}")
        mkey = ("model", key, cfg)
        model = _MODEL_CACHE.get(mkey)
        if model is None:
            model = IntentModel.build(scenario.grid, scenario.goals, cfg, fields)
            _MODEL_CACHE[mkey] = model
        out[v] = model
    return out


def scenario_for_trial(plan: RunPlan, trial: int) -> Scenario:
    """The scenario a given trial runs: presets case1/case2 reuse one script
    with per-trial seeds; the mc preset draws a fresh random script."""
    seed = plan.seed + trial
    if plan.scenario_path is not None:
        base = load_scenario(plan.scenario_path)
        return base.with_seed(base.seed + trial)
    if plan.preset == "mc":
        return PRESETS["mc"](seed)
    return PRESETS[plan.preset](seed).with_seed(seed)


def run_trial(plan: RunPlan, trial: int) -> list[TraceRecord]:
    """Simulate one reference trajectory and evaluate every method on it."""
    scenario = scenario_for_trial(plan, trial)
    models = _models_for(scenario, plan.methods)
    key = (scenario.grid.cache_key(), tuple(c.index for c in scenario.goals))
    truth = generate_trajectory(scenario, fields=_MODEL_CACHE[("fields", key)])
    return evaluate_methods(scenario, models, truth, trial)


def evaluate_methods(
    scenario: Scenario,
    models: dict[str, IntentModel],
    truth: TrajectoryTruth,
    trial: int,
) -> list[TraceRecord]:
    pred_spec = scenario.prediction
    grid = scenario.grid
    records: list[TraceRecord] = []
    ref_world = np.stack([grid.world(c) for c in truth.cells])
    for mi, (variant, model) in enumerate(models.items()):
        belief = init_belief(model, truth.cells[0])
        pred = None
        pred_from = 0  # step the current forecast was issued at
        for k in range(1, len(truth.cells)):
            cell = truth.cells[k]
            t0 = time.perf_counter()
            moved = cell.index != belief.last_state.index
            belief = update(model, belief, cell)
            if moved or pred is None:
                pred = predict(
                    model,
                    belief,
                    n_samples=pred_spec.n_samples,
                    horizon=pred_spec.horizon,
                    seed=streams.seed_from(scenario.seed, mi, k),
                )
                pred_from = k
            dt_ms = (time.perf_counter() - t0) * 1e3
            # score the active forecast against the remaining reference
            future = ref_world[pred_from + 1 : pred_from + 1 + pred.horizon]
            pe = prediction_error(pred.means, future)
            a_hat = estimate_alpha_overall(model, belief)
            records.append(
                TraceRecord(
                    trial=trial,
                    step=k,
                    position=cell,
                    true_goal=int(truth.goal_ids[k]),
                    alpha_star=float(truth.alpha_stars[k]),
                    method=variant,
                    true_goal_prob=true_goal_prob(belief.goal_post, int(truth.goal_ids[k])),
                    alpha_hat=a_hat,
                    alpha_error=alpha_error(a_hat, float(truth.alpha_stars[k])),
                    prediction_error=pe,
                    time_ms=dt_ms,
                )
            )
    return records


def run_trials(plan: RunPlan) -> list[TraceRecord]:
    if plan.jobs > 1 and plan.trials > 1:
        with ProcessPoolExecutor(max_workers=plan.jobs) as pool:
            chunks = list(pool.map(run_trial, [plan] * plan.trials, range(plan.trials)))
    else:
        chunks = [run_trial(plan, t) for t in range(plan.trials)]
    records: list[TraceRecord] = []
    for chunk in chunks:
        records.extend(chunk)
    return records


# -- artifact writing ------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def write_metric_csvs(records: list[TraceRecord], methods, out: Path) -> list[Path]:
    paths = []
    header = [
        "trial", "step", "x", "y", "true_goal", "alpha_star",
        "pred_error", "true_goal_prob", "alpha_hat", "alpha_error",
    ]
    for v in methods:
        path = out / f"metrics_{v}.csv"
        rows = sorted(
            (r for r in records if r.method == v), key=lambda r: (r.trial, r.step)
        )
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for r in rows:
                w.writerow(
                    [
                        r.trial, r.step, r.position.x, r.position.y, r.true_goal,
                        _fmt(r.alpha_star), _fmt(r.prediction_error),
                        _fmt(r.true_goal_prob), _fmt(r.alpha_hat), _fmt(r.alpha_error),
                    ]
                )
        paths.append(path)
    return paths


def pooled_metrics(records: list[TraceRecord], methods) -> dict[str, dict[str, np.ndarray]]:
    """Per-method pooled per-step samples for each metric."""
    out: dict[str, dict[str, np.ndarray]] = {}
    for v in methods:
        rows = [r for r in records if r.method == v]
        out[v] = {
            "pred_error": np.array(
                [r.prediction_error for r in rows if r.prediction_error is not None]
            ),
            "true_goal_prob": np.array([r.true_goal_prob for r in rows]),
            "alpha_error": np.array([r.alpha_error for r in rows]),
        }
    return out


def write_summary_csv(pools, methods, out: Path) -> Path:
    path = out / "summary.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "metric", "n", "mean", "std", "median", "q1", "q3"])
        for metric in METRIC_COLUMNS:
            for v in methods:
                a = aggregate(pools[v][metric])
                w.writerow(
                    [v, metric, a.n, _fmt(a.mean), _fmt(a.std), _fmt(a.median), _fmt(a.q1), _fmt(a.q3)]
                )
    return path


def write_stats_report(pools, methods, plan: RunPlan, out: Path) -> Path:
    path = out / "stats.json"
    report = {
        "methods": list(methods),
        "trials": plan.trials,
        "seed": plan.seed,
        "metrics": {},
    }
    for metric in ("pred_error", "true_goal_prob"):
        named = {v: pools[v][metric] for v in methods}
        if len(named) >= 2 and all(g.size > 0 for g in named.values()):
            report["metrics"][metric] = compare_methods(named).to_dict()
    path.write_text(json.dumps(report, indent=2))
    return path


def write_timing_csv(records: list[TraceRecord], out: Path) -> Path:
    # wall-clock values: deliberately kept out of the deterministic artifacts
    path = out / "timing.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "trial", "step", "time_ms"])
        for r in sorted(records, key=lambda r: (r.method, r.trial, r.step)):
            w.writerow([r.method, r.trial, r.step, format(r.time_ms, ".6g")])
    return path


def run(plan: RunPlan) -> dict:
    """Execute the plan and write all artifacts. Returns their paths."""
    out = Path(plan.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise IOError(f"output directory {out} is not writable: {exc}") from exc

    # fail fast on unusable scenarios before burning trial time
    scenario_for_trial(plan, 0)

    records = run_trials(plan)
    pools = pooled_metrics(records, plan.methods)
    artifacts = {
        "metrics": [str(p) for p in write_metric_csvs(records, plan.methods, out)],
        "summary": str(write_summary_csv(pools, plan.methods, out)),
        "stats": str(write_stats_report(pools, plan.methods, plan, out)),
        "timing": str(write_timing_csv(records, out)),
    }
    if plan.benchmark:
        report = bench(plan)
        bench_path = out / "bench.json"
        bench_path.write_text(json.dumps(report, indent=2))
        artifacts["bench"] = str(bench_path)
    return artifacts


# -- timing harness --------------------------------------------------------


def bench(plan: RunPlan, variant: str = "P", max_steps: int | None = None) -> dict:
    """Per-phase latency of the online loop on one reference trajectory.

    Phases are timed separately around the belief update (inference) and the
    Monte Carlo forecast (prediction); stationary steps only run the guard,
    so 'active' statistics are reported alongside whole-loop throughput.
    """
    scenario = scenario_for_trial(plan, 0)
    if variant not in plan.methods:
        variant = plan.methods[-1]
    model = _models_for(scenario, (variant,))[variant]
    key = (scenario.grid.cache_key(), tuple(c.index for c in scenario.goals))
    truth = generate_trajectory(scenario, fields=_MODEL_CACHE[("fields", key)])
    cells = truth.cells[: max_steps + 1 if max_steps else None]
    spec = scenario.prediction

    belief = init_belief(model, cells[0])
    inf_ms: list[float] = []
    pred_ms: list[float] = []
    loop_ms: list[float] = []
    active = 0
    wall0 = time.perf_counter()
    for k in range(1, len(cells)):
        t0 = time.perf_counter()
        moved = cells[k].index != belief.last_state.index
        belief = update(model, belief, cells[k])
        t1 = time.perf_counter()
        if moved:
            predict(
                model,
                belief,
                n_samples=spec.n_samples,
                horizon=spec.horizon,
                seed=streams.seed_from(scenario.seed, 0, k),
            )
            t2 = time.perf_counter()
            inf_ms.append((t1 - t0) * 1e3)
            pred_ms.append((t2 - t1) * 1e3)
            active += 1
        loop_ms.append((time.perf_counter() - t0) * 1e3)
    wall = time.perf_counter() - wall0

    def _summary(xs):
        a = np.asarray(xs)
        if a.size == 0:
            return {"mean": None, "median": None, "p99": None}
        return {
            "mean": float(a.mean()),
            "median": float(np.median(a)),
            "p99": float(np.percentile(a, 99)),
        }

    total_active = [i + p for i, p in zip(inf_ms, pred_ms)]
    return {
        "variant": variant,
        "steps": len(cells) - 1,
        "active_steps": active,
        "inference_ms": _summary(inf_ms),
        "prediction_ms": _summary(pred_ms),
        "active_step_ms": _summary(total_active),
        "loop_step_ms": _summary(loop_ms),
        "steps_per_second": (len(cells) - 1) / wall if wall > 0 else None,
    }


def feed_observations(model: IntentModel, belief: Belief, cells) -> Belief:
    """Drive the belief over a stream of observations, bridging dropped
    frames with shortest-path insertions."""
    for cell in cells:
        belief = ingest(model, belief, cell, bridge_gaps=True)
    return belief
