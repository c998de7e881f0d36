"""Walkthrough: driving the HTTP session API end to end.

Uses the in-process ASGI test client; `rapid serve --addr host:port` exposes
the same application over a real socket.

Run:  python3 demos/05_service_session.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from rapid.service import create_app
from rapid.synth import traffic_task, write_task

workdir = Path(tempfile.mkdtemp(prefix="rapid-demo-"))
write_task(traffic_task(seed=4, pool_size=45), workdir)
print("task written to", workdir)

client = TestClient(create_app(str(workdir / "sessions")))

resp = client.post(
    "/sessions",
    json={
        "dataset": str(workdir / "dataset.jsonl"),
        "vocabulary": str(workdir / "vocabulary.json"),
        "config": {"max_iterations": 10, "feedback_mode": "full"},
        "seed": 4,
    },
)
sid = resp.json()["id"]
print("session:", sid)

batch = client.get(f"/sessions/{sid}/batch").json()
print("\npending batch:")
for rec in batch["records"]:
    print(f"  {rec['id']}: predicted={rec['decision']['assigned']}"
          f" score={rec['score']['score']:.2f}")
    print("    facts:", ", ".join(rec["facts"][:4]), "...")

# Correct the first record's label, accept the rest as predicted.
target = batch["ids"][0]
client.post(f"/sessions/{sid}/corrections", json={"corrections": {target: "downtown"}})

# Edit a rule: the server diffs the clauses and carries the change into the
# next relearn as include/exclude constraints.
state = client.get(f"/sessions/{sid}").json()
downtown = state["rules"]["downtown"]["dsl"]
edited = downtown[:-1] + " ; object(X,tram)."
resp = client.post(f"/sessions/{sid}/rules", json={"label": "downtown", "dsl": edited})
print("\nafter edit, constraints:", json.dumps(resp.json()["constraints"], indent=2))

out = client.post(f"/sessions/{sid}/step").json()
print("\nstepped to iteration", out["state"]["iteration"])
print("metrics:", json.dumps(out["metrics"], indent=2))

# A malformed rule is rejected with a position and changes nothing.
bad = client.post(f"/sessions/{sid}/rules", json={"label": "downtown", "dsl": "downtown(X :-"})
print("\nmalformed edit ->", bad.status_code, bad.json()["message"])
