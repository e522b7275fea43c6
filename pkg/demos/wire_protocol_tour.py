"""
A tour of the WebSocket wire protocol
=====================================

Drive the service the way a frontend would: create a session over the
control socket, attach to its stream, step the solver, and push an edit.
The service app is exercised in-process here; `slotplan serve` exposes
the same endpoints over the network.  See docs/protocol.md for the full
message catalog.
"""

import json

from fastapi.testclient import TestClient

from slotplan import GenParams, generate
from slotplan.serialize import problem_to_doc
from slotplan.service import create_app

params = GenParams(n_teachers=6, n_classes=6, n_rooms=6, days=3, slots_per_day=6,
                   fill_percent=60.0, seed=2)
problem, witness = generate(params)

client = TestClient(create_app())

with client.websocket_connect("/ws") as control:
    # Every control frame gets exactly one reply.  create answers with the
    # first snapshot, which carries the session id used everywhere else.
    control.send_text(json.dumps({"type": "create", "problem": problem_to_doc(problem)}))
    reply = json.loads(control.receive_text())
    sid = reply["session"]
    print(f"session {sid[:8]}... created at iteration {reply['view']['iteration']}")

    # step(n) runs exactly n iterations and replies when they are done.
    control.send_text(json.dumps({"type": "step", "session": sid, "n": 12}))
    reply = json.loads(control.receive_text())
    view = reply["view"]
    print(f"after step: iteration {view['iteration']}, "
          f"{view['scheduled_count']} placed, {len(view['unscheduled'])} waiting")

    # The stream socket pushes one iteration_report per iteration (never
    # dropped) plus throttled snapshots.  A fresh attach begins with the
    # current snapshot.
    with client.websocket_connect(f"/stream/{sid}") as stream:
        first = json.loads(stream.receive_text())
        print(f"stream opens with a {first['type']} at iteration {first['view']['iteration']}")

        # Edits are applied between iterations; the reply is the repair
        # report, sent before any snapshot that reflects the edit.
        target = view["unscheduled"][0]
        loc = witness.assignment[target]
        control.send_text(json.dumps({
            "type": "edit", "session": sid,
            "edit": {"kind": "place_and_fix", "activity": target,
                     "location": {"start": loc.start, "selection": sorted(loc.selection)}},
        }))
        reply = json.loads(control.receive_text())
        print(f"edit {target}: applied={reply['result']['applied']}, "
              f"detached={reply['result']['detached']}")

        # Run to completion and watch the reports go by.
        control.send_text(json.dumps({"type": "start", "session": sid}))
        json.loads(control.receive_text())
        reports = 0
        while True:
            frame = json.loads(stream.receive_text())
            if frame["type"] == "iteration_report":
                reports += 1
            elif frame["type"] == "snapshot" and not frame["running"]:
                print(f"finished: {reports} reports streamed, "
                      f"{frame['view']['scheduled_count']} placed at "
                      f"iteration {frame['view']['iteration']}")
                break

print(f"health says {client.get('/health').json()} before the TTL reaper runs")
