#!/usr/bin/env python3
"""Drive the whole loop once, in process: scene -> service -> chain -> response.

Synthesizes a small two-line scene, posts it to the service (stub backend,
short settle window), waits for the chain to answer, and prints the event
stream a UI client would see.

    python scripts/demo_end_to_end.py
"""

import sys
import time

from fastapi.testclient import TestClient

from slatepoet.config import ServiceConfig
from slatepoet.service import create_app
from slatepoet.simulate import NoiseModel, generate_grid, synthesize


def main() -> int:
    config = ServiceConfig(settle_ms=400, tick_ms=25, log_path=None)
    app = create_app(config)

    poses = generate_grid(
        2, 3, (90.0, 70.0),
        word_ids=["hate", "delicious", "body", "beautiful", "anxious", "heart"],
    )
    snap = synthesize(poses, NoiseModel())
    body = {
        "markers": [
            {
                "word_id": m.word_id,
                "center": [m.center.x, m.center.y],
                "corners": [[c.x, c.y] for c in m.corners],
            }
            for m in snap.detections
        ]
    }

    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            resp = client.post("/snapshot", json=body)
            print(f"POST /snapshot -> {resp.status_code}, preview {resp.json()['preview']}")
            t0 = time.perf_counter()
            while True:
                event = ws.receive_json()
                print(f"  ws event #{event['seq']:<3} {event['type']:<18} {event['data']}")
                if event["type"] == "response":
                    break
            print(f"response in {time.perf_counter() - t0:.2f}s")
        state = client.get("/state").json()
        print(f"GET /state -> mode={state['mode']!r} latest_response={state['latest_response']!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
