import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from gutslab.payoff import RuleVariant
from gutslab.service import create_app
from gutslab.session import CoalitionPolicy, PolicyStore

ARTIFACTS = Path(__file__).parent.parent / "artifacts"


@pytest.fixture(scope="module")
def client() -> TestClient:
    store = PolicyStore()
    store.load_file(ARTIFACTS / "policy_1v2_m101_standard.json")
    store.register(
        CoalitionPolicy(
            n_total=3,
            mesh_points=11,
            rule=RuleVariant.STANDARD,
            support=(((1.0, 1.0), 1.0),),  # always-drop bots: quick endings
            player1_threshold=0.5,
            opponent_value=0.0,
        )
    )
    return TestClient(create_app(store))


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_create_session(client):
    resp = client.post(
        "/sessions", json={"n": 2, "mesh": 101, "rule": "standard", "seed": 1}
    )
    assert resp.status_code == 201
    body = resp.json()
    assert body["state"]["pot"] == 3.0
    assert body["state"]["phase"] == "awaiting_decision"
    assert 0.0 <= body["state"]["player_hand"] <= 1.0


def test_full_round_trip(client):
    sid = client.post(
        "/sessions", json={"n": 2, "mesh": 11, "rule": "standard", "seed": 5}
    ).json()["session_id"]
    resp = client.post(f"/sessions/{sid}/decision", json={"action": "hold"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["resolution"]["terminated"] is True
    assert body["resolution"]["winner"] == 0
    assert body["state"]["phase"] == "terminated"
    # a second decision is out of phase
    resp = client.post(f"/sessions/{sid}/decision", json={"action": "hold"})
    assert resp.status_code == 409
    assert resp.json()["code"] == "state"
    # cleanup works and is idempotent about missing ids
    assert client.delete(f"/sessions/{sid}").status_code == 204
    assert client.delete(f"/sessions/{sid}").status_code == 404


def test_get_state_and_coach(client):
    sid = client.post(
        "/sessions", json={"n": 2, "mesh": 101, "rule": "standard", "seed": 2}
    ).json()["session_id"]
    state = client.get(f"/sessions/{sid}").json()["state"]
    assert "coach" not in state
    coached = client.get(f"/sessions/{sid}", params={"coach": "true"}).json()["state"]
    assert coached["coach"]["best_response_threshold"] == pytest.approx(0.64)


def test_missing_policy_conflict(client):
    resp = client.post("/sessions", json={"n": 7, "mesh": 101, "rule": "standard"})
    assert resp.status_code == 409
    assert resp.json()["code"] == "policy_unavailable"


def test_unknown_session(client):
    assert client.get("/sessions/nope").status_code == 404
    resp = client.post("/sessions/nope/decision", json={"action": "hold"})
    assert resp.status_code == 404


def test_invalid_rule(client):
    resp = client.post("/sessions", json={"n": 2, "mesh": 101, "rule": "wild"})
    assert resp.status_code == 422
    assert resp.json()["code"] == "invalid"


def test_invalid_action(client):
    sid = client.post(
        "/sessions", json={"n": 2, "mesh": 101, "rule": "standard", "seed": 3}
    ).json()["session_id"]
    resp = client.post(f"/sessions/{sid}/decision", json={"action": "fold"})
    assert resp.status_code == 422


def test_seeded_sessions_replay_identically(client):
    states = []
    for _ in range(2):
        body = client.post(
            "/sessions", json={"n": 2, "mesh": 101, "rule": "standard", "seed": 77}
        ).json()
        sid = body["session_id"]
        transcript = [body["state"]["player_hand"]]
        resp = client.post(f"/sessions/{sid}/decision", json={"action": "drop"})
        transcript.append(resp.json()["resolution"])
        states.append(transcript)
    assert states[0] == states[1]
