"""The collaborative layer without a network: solutions, revisioned events,
broadcast targeting, optimistic-concurrency conflicts, snapshot round trips
and bit-exact replay.

Run: python demos/07_collaborative_session.py
"""

import json
import tempfile

import numpy as np

from edakit import RevisionConflict, load_csv
from edakit.session import (
    Event,
    apply_event,
    canonical_json,
    event_log_document,
    new_session,
    overview,
    replay_events,
    restore,
    snapshot,
)

rng = np.random.default_rng(2)
with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False) as f:
    f.write("x,y,z\n")
    for _ in range(80):
        f.write(",".join(f"{v:.4f}" for v in rng.normal(size=3)) + "\n")
    path = f.name

state = new_session(load_csv(path))
log = []


def do(event):
    global state
    state, messages, targets = apply_event(state, event)
    log.append(event)
    return messages


do(Event(type="create_solution", client_id="ana", seq=1))
do(Event(type="create_solution", client_id="ben", seq=1))
print("two analysts, two solutions:",
      [(s.id, s.color) for s in state.solutions.values()])

do(Event(type="bind_view", payload={"kind": "projection", "solution_id": 0, "slots": [1, 2]},
         client_id="ana", seq=2))
do(Event(type="bind_view", payload={"kind": "table", "solution_id": 1, "slots": [3]},
         client_id="ben", seq=2))

msgs = do(Event(type="apply_clustering", solution_id=0, client_id="ana", seq=3,
                payload={"params": {"algorithm": "kmeans", "k": 2, "seed": 5}}))
print("ana clusters solution 0; broadcast touches views",
      msgs[0]["payload"]["affected_views"], "(ben's table on solution 1 is not in the list)")

# both try to mutate solution 0 against the same revision: one loses
rev = state.solutions[0].revision
do(Event(type="select_points", solution_id=0, payload={"rows": [1, 2, 3]},
         client_id="ana", seq=4, expected_revision=rev))
try:
    apply_event(state, Event(type="select_points", solution_id=0, payload={"rows": [4]},
                             client_id="ben", seq=3, expected_revision=rev))
except RevisionConflict as exc:
    print("ben's stale edit is rejected:", exc)

do(Event(type="isolate", solution_id=0, client_id="ana", seq=5))
print("after isolate solution 0 has", len(state.solutions[0].active_rows), "active rows")

doc = snapshot(state)
restored = restore(json.loads(json.dumps(doc)))
print("snapshot -> restore keeps the overview byte-identical:",
      canonical_json(overview(restored)) == canonical_json(overview(state)))

replayed = replay_events(new_session(load_csv(path)),
                         event_log_document(state, log)["events"])
print("replaying the", len(log), "accepted events reproduces the state bit-exactly:",
      canonical_json(snapshot(replayed)) == canonical_json(snapshot(state)))
