"""Record service transcripts for the UI snapshot tests.

Each transcript captures the verbatim HTTP responses of one session (the
create response and every decision response), which the frontend replays
offline.  Run from the repo root; writes frontend/tests/transcripts/.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from gutslab.service import create_app
from gutslab.session import PolicyStore

ROOT = Path(__file__).parent.parent
OUT = ROOT / "frontend" / "tests" / "transcripts"

SCRIPTS = [
    # (name, seed, rule, decisions)
    ("t1_hold_run", 42, "standard", ["hold", "hold", "drop", "hold", "hold"]),
    ("t2_cautious", 7, "standard", ["drop", "drop", "hold", "drop", "hold"]),
    ("t3_weenie", 11, "weenie", ["drop", "hold", "drop", "hold", "hold"]),
]


def main():
    store = PolicyStore()
    policy = store.load_file(ROOT / "artifacts" / "policy_1v2_m101_standard.json")
    # reuse the same support for a weenie-rule table so transcripts cover both
    from gutslab.payoff import RuleVariant
    from gutslab.session import CoalitionPolicy

    store.register(
        CoalitionPolicy(
            n_total=3,
            mesh_points=101,
            rule=RuleVariant.WEENIE,
            support=policy.support,
            player1_threshold=policy.player1_threshold,
            opponent_value=policy.opponent_value,
            source=policy.source + " (support reused for weenie demo table)",
        )
    )
    client = TestClient(create_app(store))
    OUT.mkdir(parents=True, exist_ok=True)
    for name, seed, rule, decisions in SCRIPTS:
        created = client.post(
            "/sessions", json={"n": 2, "mesh": 101, "rule": rule, "seed": seed}
        )
        created.raise_for_status()
        body = created.json()
        sid = body["session_id"]
        steps = []
        for action in decisions:
            if steps and steps[-1]["state"]["phase"] == "terminated":
                break
            resp = client.post(f"/sessions/{sid}/decision", json={"action": action})
            resp.raise_for_status()
            steps.append({"action": action, **resp.json()})
        transcript = {"settings": {"n": 2, "mesh": 101, "rule": rule, "seed": seed},
                      "created": body, "steps": steps}
        path = OUT / f"{name}.json"
        path.write_text(json.dumps(transcript, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path} ({len(steps)} steps)")


if __name__ == "__main__":
    main()
