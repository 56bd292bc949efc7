"""Live steering service.

A WebSocket session advances a simulated target at a configurable tick rate
while the operator retargets it on the fly; every tick runs the belief
update and the Monte Carlo forecast for each configured method and streams a
state event. A plain GET endpoint serves the scenario description so any
frontend can bootstrap itself.

Wire protocol (JSON text frames)
    client -> server: {"type": "set_goal", "goal": i}
                      {"type": "set_alpha", "value": a}
                      {"type": "pause"} {"type": "resume"} {"type": "step"}
                      {"type": "reset", "scenario": "case1"}
                      {"type": "set_rate", "hz": r}
    server -> client: {"type": "hello", "scenario": {...}}
                      {"type": "state", "k", "pos", "true_goal", "alpha_star",
                       "methods": {name: {"goal_post", "alpha_hat",
                       "pred": {"means", "covs", "ellipses"}, "timing_ms"}}}
                      {"type": "error", "detail": "..."}

Covariances are serialized as [c00, c01, c11].
"""

from __future__ import annotations

import asyncio
import json
import math
import os
import time
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Query, WebSocket, WebSocketDisconnect

from . import streams
from .grid import DistanceField, distance_matrix
from .inference import IntentModel, init_belief, update, estimate_alpha_overall
from .kinematics import sample_step, step_distribution
from .predictor import PredictionResult, ellipse_from_cov, predict
from .scenario import PRESETS, Scenario, scenario_to_dict

DEFAULT_RATE_HZ = 10.0
MAX_RATE_HZ = 100.0


class Session:
    """One operator-steered target plus per-method beliefs and forecasts.

    Owned by a single task; commands and ticks are serialized by the caller.
    """

    def __init__(self, scenario: Scenario, seed: int = 0, rate_hz: float = DEFAULT_RATE_HZ):
        self.scenario = scenario
        self.seed = int(seed)
        self.rate_hz = float(rate_hz)
        self.paused = False
        self._setup()

    def _setup(self) -> None:
        s = self.scenario
        self.fields = distance_matrix(s.grid, list(s.goals))
        self.models: dict[str, IntentModel] = {
            cfg.variant: IntentModel.build(s.grid, s.goals, cfg, self.fields)
            for cfg in s.methods
        }
        self.k = 0
        self.pos = s.start
        self.goal_id = s.segments[0].goal_id
        self.alpha_star = s.segments[0].alpha
        self.rng = np.random.default_rng(streams.seed_from(self.seed, 0xC0FFEE))
        self.beliefs = {v: init_belief(m, s.start) for v, m in self.models.items()}
        self.predictions: dict[str, PredictionResult | None] = {
            v: None for v in self.models
        }
        self.timing_ms = {v: 0.0 for v in self.models}

    # -- commands ---------------------------------------------------------

    def handle_command(self, msg) -> list[dict]:
        """Apply one client command; returns the events to emit."""
        if not isinstance(msg, dict) or "type" not in msg:
            return [_error("malformed command")]
        kind = msg.get("type")
        try:
            if kind == "set_goal":
                goal = int(msg["goal"])
                if not 0 <= goal < len(self.scenario.goals):
                    return [_error(f"unknown goal {goal}")]
                self.goal_id = goal
                return []
            if kind == "set_alpha":
                value = float(msg["value"])
                if not (value >= 0 and math.isfinite(value)):
                    return [_error("alpha must be finite and >= 0")]
                self.alpha_star = value
                return []
            if kind == "pause":
                self.paused = True
                return []
            if kind == "resume":
                self.paused = False
                return []
            if kind == "step":
                return [self.tick()]
            if kind == "set_rate":
                hz = float(msg["hz"])
                if not (0.0 < hz <= MAX_RATE_HZ):
                    return [_error(f"rate must be in (0, {MAX_RATE_HZ}] Hz")]
                self.rate_hz = hz
                return []
            if kind == "reset":
                name = msg.get("scenario", self.scenario.name)
                factory = PRESETS.get(name)
                if factory is None:
                    return [_error(f"unknown scenario {name!r}")]
                self.scenario = factory(self.seed)
                self._setup()
                return [self.state_event()]
            return [_error(f"unknown command {kind!r}")]
        except (KeyError, TypeError, ValueError) as exc:
            return [_error(f"bad command payload: {exc}")]

    # -- simulation -------------------------------------------------------

    def tick(self) -> dict:
        """Advance the target one step and refresh every method's belief
        and forecast."""
        s = self.scenario
        dfield = DistanceField(s.goals[self.goal_id], self.fields[self.goal_id])
        dist = step_distribution(s.grid, dfield, self.pos, self.alpha_star, self.goal_id)
        nxt = sample_step(self.rng, dist)
        self.k += 1
        self.pos = nxt
        for mi, (variant, model) in enumerate(self.models.items()):
            t0 = time.perf_counter()
            belief = self.beliefs[variant]
            moved = nxt.index != belief.last_state.index
            belief = update(model, belief, nxt)
            self.beliefs[variant] = belief
            if moved or self.predictions[variant] is None:
                self.predictions[variant] = predict(
                    model,
                    belief,
                    n_samples=s.prediction.n_samples,
                    horizon=s.prediction.horizon,
                    seed=streams.seed_from(self.seed, mi, self.k),
                )
            self.timing_ms[variant] = (time.perf_counter() - t0) * 1e3
        return self.state_event()

    def state_event(self) -> dict:
        methods = {}
        n_sigma = self.scenario.prediction.n_sigma
        for variant, model in self.models.items():
            belief = self.beliefs[variant]
            pred = self.predictions[variant]
            entry = {
                "goal_post": [float(p) for p in belief.goal_post],
                "alpha_hat": estimate_alpha_overall(model, belief),
                "timing_ms": self.timing_ms[variant],
            }
            if pred is not None:
                entry["pred"] = {
                    "means": pred.means.tolist(),
                    "covs": [
                        [float(c[0, 0]), float(c[0, 1]), float(c[1, 1])]
                        for c in pred.covs
                    ],
                    "ellipses": [
                        {
                            "center": list(e.center),
                            "semi_major": e.semi_major,
                            "semi_minor": e.semi_minor,
                            "angle": e.angle,
                        }
                        for e in pred.ellipses(n_sigma)
                    ],
                }
            methods[variant] = entry
        return {
            "type": "state",
            "k": self.k,
            "pos": [self.pos.x, self.pos.y],
            "true_goal": self.goal_id,
            "alpha_star": self.alpha_star,
            "methods": methods,
        }

    def hello_event(self) -> dict:
        return {
            "type": "hello",
            "scenario": scenario_to_dict(self.scenario),
            "rate_hz": self.rate_hz,
            "true_goal": self.goal_id,
            "alpha_star": self.alpha_star,
        }


def _error(detail: str) -> dict:
    return {"type": "error", "detail": detail}


def _ui_directory() -> Path | None:
    candidates = [
        os.environ.get("INTENTRACK_UI"),
        Path.cwd() / "frontend" / "dist",
        Path(__file__).resolve().parents[2].parent / "frontend" / "dist",
    ]
    for cand in candidates:
        if cand and Path(cand).is_dir():
            return Path(cand)
    return None


def create_app(preset: str = "case1", seed: int = 0) -> FastAPI:
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}")
    app = FastAPI(title="intentrack live service")
    app.state.preset = preset
    app.state.seed = seed

    @app.get("/scenario")
    def scenario_endpoint(preset_q: str | None = Query(default=None, alias="preset")):
        name = preset_q or app.state.preset
        factory = PRESETS.get(name)
        if factory is None:
            return {"error": f"unknown preset {name!r}"}
        return {"name": name, "scenario": scenario_to_dict(factory(app.state.seed))}

    @app.websocket("/ws")
    async def ws_endpoint(
        ws: WebSocket,
        seed: int = Query(default=None),
        preset_q: str | None = Query(default=None, alias="preset"),
        paused: int = Query(default=0),
    ):
        await ws.accept()
        name = preset_q or app.state.preset
        factory = PRESETS.get(name)
        if factory is None:
            await ws.send_text(json.dumps(_error(f"unknown preset {name!r}")))
            await ws.close()
            return
        use_seed = app.state.seed if seed is None else seed
        session = Session(factory(use_seed), seed=use_seed)
        session.paused = bool(paused)
        await ws.send_text(json.dumps(session.hello_event()))

        inbox: asyncio.Queue = asyncio.Queue()
        closed = object()

        async def reader():
            try:
                while True:
                    inbox.put_nowait(await ws.receive_text())
            except WebSocketDisconnect:
                inbox.put_nowait(closed)
            except Exception:
                inbox.put_nowait(closed)

        reader_task = asyncio.create_task(reader())
        try:
            next_tick = time.monotonic() + 1.0 / session.rate_hz
            while True:
                if session.paused:
                    timeout = None
                else:
                    timeout = max(0.0, next_tick - time.monotonic())
                try:
                    raw = await asyncio.wait_for(inbox.get(), timeout=timeout)
                except asyncio.TimeoutError:
                    event = session.tick()
                    next_tick = time.monotonic() + 1.0 / session.rate_hz
                    await ws.send_text(json.dumps(event))
                    continue
                if raw is closed:
                    break
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send_text(json.dumps(_error("invalid JSON")))
                    continue
                for event in session.handle_command(msg):
                    await ws.send_text(json.dumps(event))
        finally:
            reader_task.cancel()

    ui_dir = _ui_directory()
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app
