import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from intentrack.service import Session, create_app
from intentrack.scenario import make_case1


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(preset="case1", seed=0))


def connect(client, **params):
    qs = "&".join(f"{k}={v}" for k, v in params.items())
    return client.websocket_connect(f"/ws?{qs}" if qs else "/ws")


class TestBootstrap:
    def test_scenario_endpoint(self, client):
        r = client.get("/scenario")
        assert r.status_code == 200
        body = r.json()
        assert body["name"] == "case1"
        assert body["scenario"]["map"]["width"] == 101
        assert len(body["scenario"]["goals"]) == 12

    def test_hello_on_connect(self, client):
        with connect(client, seed=1, paused=1) as ws:
            hello = ws.receive_json()
            assert hello["type"] == "hello"
            assert hello["scenario"]["map"]["height"] == 81
            assert hello["rate_hz"] == 10.0


class TestCommands:
    def test_step_and_strictly_increasing_k(self, client):
        with connect(client, seed=2, paused=1) as ws:
            ws.receive_json()
            ks = []
            for _ in range(5):
                ws.send_text(json.dumps({"type": "step"}))
                ev = ws.receive_json()
                assert ev["type"] == "state"
                ks.append(ev["k"])
            assert ks == [1, 2, 3, 4, 5]

    def test_state_event_schema(self, client):
        with connect(client, seed=3, paused=1) as ws:
            ws.receive_json()
            ws.send_text(json.dumps({"type": "step"}))
            ev = ws.receive_json()
            assert set(ev["methods"]) == {"B", "A", "G", "P"}
            entry = ev["methods"]["P"]
            assert len(entry["goal_post"]) == 12
            assert "timing_ms" in entry
            pred = entry["pred"]
            assert len(pred["means"]) == 20
            assert len(pred["covs"]) == 20
            assert len(pred["covs"][0]) == 3  # [c00, c01, c11]
            assert len(pred["ellipses"]) == 20
            ell = pred["ellipses"][0]
            assert set(ell) == {"center", "semi_major", "semi_minor", "angle"}
            # serialization round trip
            assert json.loads(json.dumps(ev)) == ev

    def test_set_goal_applies_next_tick(self, client):
        with connect(client, seed=4, paused=1) as ws:
            ws.receive_json()
            ws.send_text(json.dumps({"type": "set_goal", "goal": 7}))
            ws.send_text(json.dumps({"type": "step"}))
            ev = ws.receive_json()
            assert ev["true_goal"] == 7

    def test_set_alpha_and_rate(self, client):
        with connect(client, seed=5, paused=1) as ws:
            ws.receive_json()
            ws.send_text(json.dumps({"type": "set_alpha", "value": 75.5}))
            ws.send_text(json.dumps({"type": "step"}))
            assert ws.receive_json()["alpha_star"] == 75.5
            ws.send_text(json.dumps({"type": "set_rate", "hz": 1000}))
            err = ws.receive_json()
            assert err["type"] == "error"

    def test_unknown_goal_and_malformed(self, client):
        with connect(client, seed=6, paused=1) as ws:
            ws.receive_json()
            ws.send_text(json.dumps({"type": "set_goal", "goal": 99}))
            assert ws.receive_json()["type"] == "error"
            ws.send_text("{broken")
            assert ws.receive_json()["type"] == "error"
            ws.send_text(json.dumps({"type": "warp"}))
            assert ws.receive_json()["type"] == "error"
            # session still alive
            ws.send_text(json.dumps({"type": "step"}))
            assert ws.receive_json()["type"] == "state"

    def test_reset_reinitializes(self, client):
        with connect(client, seed=7, paused=1) as ws:
            ws.receive_json()
            for _ in range(3):
                ws.send_text(json.dumps({"type": "step"}))
                ws.receive_json()
            ws.send_text(json.dumps({"type": "reset", "scenario": "case1"}))
            ev = ws.receive_json()
            assert ev["type"] == "state" and ev["k"] == 0
            post = np.array(ev["methods"]["P"]["goal_post"])
            assert np.allclose(post, 1.0 / 12.0, atol=1e-12)


class TestSessionDynamics:
    def test_posterior_locks_on_within_30_ticks(self):
        # no retargeting, sharp target: the tracked goal should dominate
        finals = []
        for seed in range(8):
            session = Session(make_case1(seed), seed=seed)
            session.alpha_star = 50.0
            for _ in range(30):
                ev = session.tick()
            finals.append(ev["methods"]["P"]["goal_post"][ev["true_goal"]])
        assert np.median(finals) > 0.9

    def test_pause_semantics(self, client):
        with connect(client, seed=8, paused=1) as ws:
            ws.receive_json()
            ws.send_text(json.dumps({"type": "step"}))
            k1 = ws.receive_json()["k"]
            ws.send_text(json.dumps({"type": "pause"}))
            ws.send_text(json.dumps({"type": "step"}))
            assert ws.receive_json()["k"] == k1 + 1  # step works while paused
