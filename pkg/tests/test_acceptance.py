"""End-to-end acceptance checks.

Each test exercises one exit criterion at its stated tolerance and runtime
budget and prints a one-line verdict. Run with ``pytest -m acceptance -s``
to watch the lines appear; the whole module is also part of the default
suite.
"""

import math
import sys
import time

import numpy as np
import pytest

import oracles
from intentrack import (
    GoalSet,
    GridMap,
    IntentModel,
    MethodConfig,
    dunn_test,
    estimate_alpha_overall,
    exact_step_distribution,
    generate_trajectory,
    init_belief,
    kruskal_wallis,
    predict,
    step_distribution,
    update,
)
from intentrack.grid import DistanceField, distance_matrix
from intentrack.inference import gamma_grid_weights
from intentrack.runner import RunPlan, bench, pooled_metrics, run_trial
from intentrack.scenario import (
    PredictionSpec,
    Scenario,
    Segment,
    boundary_goals,
    default_grid,
    make_case1,
)
from intentrack.stats import compare_methods

pytestmark = pytest.mark.acceptance


def verdict(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f" :: {detail}"
    print(line, file=sys.stderr, flush=True)
    assert ok, line


def case_records(preset: str, trials: int, seed: int = 0):
    plan = RunPlan(preset=preset, methods=("B", "A", "G", "P"),
                   trials=trials, seed=seed, out_dir="unused")
    records = []
    for t in range(trials):
        records.extend(run_trial(plan, t))
    return pooled_metrics(records, plan.methods)


class TestKernelNormalizationAndGeometry:
    def test_criterion(self):
        t0 = time.perf_counter()
        grid = default_grid()
        rng = np.random.default_rng(1)
        goal_cells = [grid.cell_at(int(i))
                      for i in rng.choice(grid.n_cells, size=25, replace=False)]
        fields = distance_matrix(grid, goal_cells)
        worst_sum = 0.0
        worst_raw = 0.0
        table = grid.table
        for _ in range(1000):
            gi = int(rng.integers(25))
            cell = grid.cell_at(int(rng.integers(grid.n_cells)))
            alpha = float(rng.uniform(0.0, 100.0))
            field = DistanceField(goal_cells[gi], fields[gi])
            dist = step_distribution(grid, field, cell, alpha)
            worst_sum = max(worst_sum, abs(float(dist.probs.sum()) - 1.0))
            # raw, unclamped progress costs straight from the field values
            deg = int(table.degree[cell.index])
            succ = table.succ[cell.index, :deg]
            raw = table.cost[cell.index, :deg] + fields[gi][succ] - fields[gi][cell.index]
            raw = raw[np.isfinite(raw)]
            if raw.size:
                worst_raw = min(worst_raw, float(raw.min()))
        elapsed = time.perf_counter() - t0
        verdict(
            "kernel normalization & geometry",
            worst_sum <= 1e-12 and worst_raw >= -1e-9 and elapsed < 5.0,
            f"max |sum-1|={worst_sum:.2e}, min progress cost={worst_raw:.2e}, {elapsed:.1f}s",
        )


class TestEnumerationOracle:
    def test_criterion(self):
        t0 = time.perf_counter()
        worst_post = 0.0
        worst_mix = 0.0
        for seed in range(20):
            rng = np.random.default_rng(1000 + seed)
            w = int(rng.integers(5, 9))
            h = int(rng.integers(5, 9))
            grid = GridMap(w, h, 1.0)
            start = grid.cell(w // 2, h // 2)
            n_goals = int(rng.integers(2, 4))
            candidates = [i for i in rng.permutation(grid.n_cells) if i != start.index]
            goals = GoalSet(tuple(grid.cell_at(int(i)) for i in candidates[:n_goals]))
            g_pts = int(rng.integers(2, 6))
            points = np.sort(rng.uniform(0.3, 25.0, g_pts))
            w0 = rng.dirichlet(np.ones(g_pts))
            H = rng.dirichlet(np.full(n_goals, 6.0), size=n_goals)

            model = IntentModel.build(grid, goals, MethodConfig("P", grid_points=4))
            object.__setattr__(model, "alpha_points", points)
            object.__setattr__(model, "prior_alpha_w", w0)
            object.__setattr__(model, "transition", H)

            # six-step synthetic path with no stationary observations
            path = [start]
            cur = start
            field = DistanceField(goals[0], model.fields[0])
            path_rng = np.random.default_rng(2000 + seed)
            while len(path) <= 6 and cur.index != goals[0].index:
                from intentrack import sample_step

                nxt = sample_step(
                    path_rng, step_distribution(grid, field, cur, 4.0)
                )
                if nxt.index == cur.index:
                    continue
                cur = nxt
                path.append(cur)

            belief = init_belief(model, path[0])
            for cell in path[1:]:
                belief = update(model, belief, cell)
            goal_post, alpha_w = oracles.enumerate_posteriors(
                grid, list(goals), H, points, w0, path
            )
            worst_post = max(
                worst_post,
                float(np.abs(belief.goal_post - goal_post).max()),
                float(np.abs(belief.alpha_w - alpha_w).max()),
            )

            mix = exact_step_distribution(model, belief)
            want = oracles.exact_mixture_bruteforce(
                grid, list(goals), points, belief.goal_post, belief.alpha_w,
                belief.last_state,
            )
            for c, p in zip(mix.support, mix.probs):
                worst_mix = max(worst_mix, abs(p - want[c.index]))
        elapsed = time.perf_counter() - t0
        verdict(
            "enumeration-oracle equivalence",
            worst_post <= 1e-10 and worst_mix <= 1e-12 and elapsed < 30.0,
            f"max posterior err={worst_post:.2e}, max mixture err={worst_mix:.2e}, {elapsed:.1f}s",
        )


class TestAblationReductions:
    def test_criterion(self):
        t0 = time.perf_counter()
        scenario = make_case1(seed=11)
        grid, goals = scenario.grid, scenario.goals
        fields = distance_matrix(grid, list(goals))
        truth = generate_trajectory(scenario, fields=fields)
        cells = truth.cells[:151]
        fixed = 10.0
        n = len(goals)

        def build(variant, transition=None):
            model = IntentModel.build(
                grid, goals, MethodConfig(variant, fixed_alpha=fixed), fields
            )
            if transition is not None:
                object.__setattr__(model, "transition", transition)
            return model

        switching = MethodConfig("P", fixed_alpha=fixed).transition_matrix(n)
        pairs = {
            "P(H=I) == A": (build("P", np.eye(n)), build("A")),
            "P(point grid) == G": (build("G", switching), build("G")),
            "P(both) == B": (build("G", np.eye(n)), build("B")),
        }
        worst = 0.0
        for name, (left, right) in pairs.items():
            bl = init_belief(left, cells[0])
            br = init_belief(right, cells[0])
            for cell in cells[1:]:
                bl = update(left, bl, cell)
                br = update(right, br, cell)
                worst = max(worst, float(np.abs(bl.goal_post - br.goal_post).max()))
        elapsed = time.perf_counter() - t0
        verdict(
            "ablation reductions",
            worst <= 1e-12 and elapsed < 10.0,
            f"max stepwise goal-posterior gap={worst:.2e}, {elapsed:.1f}s",
        )


class TestMonteCarloPredictionFidelity:
    def test_criterion(self):
        t0 = time.perf_counter()
        grid = default_grid()
        goals = boundary_goals(grid)
        model = IntentModel.build(grid, goals, MethodConfig("P", grid_points=32))
        rng = np.random.default_rng(4)
        n, g = len(goals), model.n_alpha
        m = 10_000
        ok_mean = True
        min_eig = 0.0
        for trial in range(20):
            # temperature rows as point masses on the grid: the rollout
            # kernel and the exact mixture then target the same distribution
            rows = np.zeros((n, g))
            rows[np.arange(n), rng.integers(0, g, n)] = 1.0
            belief = init_belief(
                model, grid.cell(int(rng.integers(20, 80)), int(rng.integers(15, 65)))
            )
            object.__setattr__(belief, "goal_post", rng.dirichlet(np.ones(n)))
            object.__setattr__(belief, "alpha_w", rows)
            pred = predict(model, belief, n_samples=m, horizon=5, seed=trial)
            ex = exact_step_distribution(model, belief)
            pts = np.array([grid.world(c) for c in ex.support])
            mean = ex.probs @ pts
            var = ex.probs @ (pts - mean) ** 2
            bound = 4.0 * np.sqrt(var / m) + 1e-12
            if not np.all(np.abs(pred.means[0] - mean) <= bound):
                ok_mean = False
            for t in range(pred.horizon):
                min_eig = min(min_eig, float(np.linalg.eigvalsh(pred.covs[t]).min()))
        elapsed = time.perf_counter() - t0
        verdict(
            "MC prediction fidelity",
            ok_mean and min_eig >= -1e-9 and elapsed < 60.0,
            f"one-step means within 4 sigma/sqrt(M), min cov eigenvalue={min_eig:.2e}, {elapsed:.1f}s",
        )


class TestCase1Reproduction:
    def test_criterion(self):
        t0 = time.perf_counter()
        pools = case_records("case1", trials=30, seed=0)
        pe = {v: pools[v]["pred_error"].mean() for v in "BAGP"}
        tg = {v: pools[v]["true_goal_prob"].mean() for v in "BAGP"}
        pe_rep = compare_methods({v: pools[v]["pred_error"] for v in "BAGP"})
        tg_rep = compare_methods({v: pools[v]["true_goal_prob"] for v in "BAGP"})
        P, B, A = 3, 0, 1
        ok = (
            all(pe["P"] < pe[v] for v in "BAG")
            and all(tg["P"] > tg[v] for v in "BAG")
            and pe_rep.kruskal.p_value < 0.05
            and tg_rep.kruskal.p_value < 0.05
            and pe_rep.dunn.p[P, B] < 0.05
            and pe_rep.dunn.p[P, A] < 0.05
            and tg_rep.dunn.p[P, B] < 0.05
            and tg_rep.dunn.p[P, A] < 0.05
        )
        elapsed = time.perf_counter() - t0
        verdict(
            "case 1 reproduction",
            ok and elapsed < 600.0,
            "pred_err "
            + " ".join(f"{v}={pe[v]:.3f}" for v in "BAGP")
            + " | true_goal "
            + " ".join(f"{v}={tg[v]:.3f}" for v in "BAGP")
            + f", {elapsed:.0f}s",
        )


class TestCase2Reproduction:
    def test_criterion(self):
        t0 = time.perf_counter()
        pools = case_records("case2", trials=30, seed=0)
        pe = {v: pools[v]["pred_error"].mean() for v in "BAGP"}
        pe_rep = compare_methods({v: pools[v]["pred_error"] for v in "BAGP"})
        P, B, A = 3, 0, 1
        # no significance claim is made for P vs G on inference probability
        ok = (
            all(pe["P"] < pe[v] for v in "BAG")
            and pe_rep.kruskal.p_value < 0.05
            and pe_rep.dunn.p[P, B] < 0.05
            and pe_rep.dunn.p[P, A] < 0.05
        )
        elapsed = time.perf_counter() - t0
        verdict(
            "case 2 reproduction",
            ok and elapsed < 600.0,
            "pred_err " + " ".join(f"{v}={pe[v]:.3f}" for v in "BAGP") + f", {elapsed:.0f}s",
        )


class TestMonteCarloStudy:
    def test_criterion(self):
        t0 = time.perf_counter()
        pools = case_records("mc", trials=100, seed=0)
        pe = {v: pools[v]["pred_error"].mean() for v in "BAGP"}
        tg = {v: pools[v]["true_goal_prob"].mean() for v in "BAGP"}
        pe_rep = compare_methods({v: pools[v]["pred_error"] for v in "BAGP"})
        tg_rep = compare_methods({v: pools[v]["true_goal_prob"] for v in "BAGP"})
        P, B, A, G = 3, 0, 1, 2
        detail = (
            "pred_err "
            + " ".join(f"{v}={pe[v]:.4f}" for v in "BAGP")
            + " | true_goal "
            + " ".join(f"{v}={tg[v]:.4f}" for v in "BAGP")
            + f" | Dunn tg P-G p={tg_rep.dunn.p[P, G]:.3f}"
            + f", {time.perf_counter() - t0:.0f}s"
        )
        ok = (
            all(pe["P"] < pe[v] for v in "BAG")
            and all(tg["P"] > tg[v] for v in "BAG")
            and pe_rep.kruskal.p_value < 0.05
            and tg_rep.kruskal.p_value < 0.05
            and pe_rep.dunn.p[P, B] < 0.05
            and pe_rep.dunn.p[P, A] < 0.05
            and tg_rep.dunn.p[P, B] < 0.05
            and tg_rep.dunn.p[P, A] < 0.05
            and (time.perf_counter() - t0) < 1800.0
        )
        verdict("Monte Carlo study", ok, detail)


class TestAlphaConvergence:
    def test_criterion(self):
        t0 = time.perf_counter()
        cfg = MethodConfig(variant="P", estimator="mode")
        pts = cfg.alpha_grid().points
        targets = [float(pts[np.argmin(np.abs(pts - t))]) for t in (40.0, 20.0, 8.0)]
        durations = (50, 50, 120)  # final leg is arrival-bounded, like case 1
        grid = default_grid()
        goals = boundary_goals(grid)
        fields = distance_matrix(grid, list(goals))
        model = IntentModel.build(grid, goals, cfg, fields)
        segments = tuple(
            Segment(g, a, d) for g, a, d in zip((1, 5, 9), targets, durations)
        )
        scenario = Scenario(
            grid=grid, goals=goals, start=grid.cell(50, 40), segments=segments,
            seed=0, methods=(cfg,), prediction=PredictionSpec(),
        )
        per_seed = []
        for seed in range(20):
            truth = generate_trajectory(scenario.with_seed(seed), fields=fields)
            belief = init_belief(model, truth.cells[0])
            series = []
            for cell in truth.cells[1:]:
                belief = update(model, belief, cell)
                series.append(estimate_alpha_overall(model, belief))
            per_seed.append(series)
        ratios = []
        for s in range(3):
            lo = sum(durations[:s])
            e5 = np.median([abs(sr[lo + 4] - targets[s]) for sr in per_seed])
            ef = np.median(
                [abs(sr[min(lo + durations[s], len(sr)) - 1] - targets[s]) for sr in per_seed]
            )
            ratios.append(ef / e5)
        elapsed = time.perf_counter() - t0
        verdict(
            "alpha-estimation convergence",
            all(r < 0.5 for r in ratios) and elapsed < 300.0,
            "per-segment final/5th-step error ratios: "
            + ", ".join(f"{r:.1%}" for r in ratios)
            + f", {elapsed:.0f}s",
        )


class TestRealTimeBudget:
    def test_criterion(self):
        t0 = time.perf_counter()
        plan = RunPlan(preset="case1", methods=("P",), trials=1, seed=0, out_dir="unused")
        report = bench(plan, variant="P")
        mean_active = report["active_step_ms"]["mean"]
        rate = report["steps_per_second"]

        # identical forecasts regardless of the rollout schedule
        scenario = make_case1(seed=0)
        fields = distance_matrix(scenario.grid, list(scenario.goals))
        model = IntentModel.build(scenario.grid, scenario.goals,
                                  MethodConfig("P"), fields)
        truth = generate_trajectory(scenario, fields=fields)
        belief = init_belief(model, truth.cells[0])
        for cell in truth.cells[1:40]:
            belief = update(model, belief, cell)
        a = predict(model, belief, n_samples=500, horizon=20, seed=9,
                    schedule="serial", return_samples=True)
        b = predict(model, belief, n_samples=500, horizon=20, seed=9,
                    schedule="parallel", chunks=4, return_samples=True)
        identical = (
            a.means.tobytes() == b.means.tobytes()
            and a.covs.tobytes() == b.covs.tobytes()
            and a.samples.tobytes() == b.samples.tobytes()
        )
        elapsed = time.perf_counter() - t0
        verdict(
            "real-time budget",
            mean_active < 10.0 and rate > 100.0 and identical and elapsed < 120.0,
            f"active step mean={mean_active:.2f} ms, loop={rate:.0f} steps/s, "
            f"schedule-identical={identical}, {elapsed:.0f}s",
        )


class TestStatisticsCorrectness:
    def test_criterion(self):
        t0 = time.perf_counter()
        rng = np.random.default_rng(424242)
        datasets = {
            "separated": [rng.normal(loc, 1.0, 30) for loc in (0.0, 1.0, 2.0, 3.5)],
            "null": [rng.normal(0.0, 1.0, 30) for _ in range(4)],
            "heavy_ties": [
                rng.integers(0, 5, 40).astype(float),
                rng.integers(0, 5, 40).astype(float),
                (rng.integers(0, 5, 40) + rng.integers(0, 2, 40)).astype(float),
            ],
            "mild_shift": [rng.normal(0.0, 1.0, 25), rng.normal(0.45, 1.0, 25)],
            "unequal": [
                rng.normal(0.0, 1.0, 15),
                rng.normal(0.3, 1.0, 30),
                rng.normal(0.6, 1.0, 45),
            ],
        }
        worst = 0.0
        for groups in datasets.values():
            ours = kruskal_wallis(groups)
            p_perm, p_pairs = oracles.permutation_reports(groups, n_perm=100_000, seed=7)
            worst = max(worst, abs(ours.p_value - p_perm))
            d = dunn_test(groups)
            k = len(groups)
            for i in range(k):
                for j in range(i + 1, k):
                    worst = max(worst, abs(d.p[i, j] - p_pairs[i, j]))
        elapsed = time.perf_counter() - t0
        verdict(
            "statistics correctness",
            worst <= 0.01 and elapsed < 120.0,
            f"max |analytic - permutation| p gap={worst:.4f} over 5 datasets, {elapsed:.0f}s",
        )
