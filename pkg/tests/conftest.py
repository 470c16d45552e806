"""Shared fixtures: tables, spec files on disk, and the local judge stub."""

from __future__ import annotations

import json
import random
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from chartdesign import tabular


@pytest.fixture
def grid_table() -> tabular.DataTable:
    """A table usable by every chart family: one label + two numeric columns."""
    text = "region,alpha,beta\nNorth,3,5\nSouth,4,2\nEast,6,7\nWest,1,4\n"
    return tabular.parse_csv_bundle(text)[0]


class JudgeStub:
    """In-process chat-completion endpoint with call accounting.

    ``responder`` maps the received prompt to the reply text; the default
    always answers MATCH. Tracks every prompt, plus the peak number of
    simultaneously open requests.
    """

    def __init__(self, responder=None, delay: float = 0.0):
        self.responder = responder or (lambda prompt: "MATCH")
        self.delay = delay
        self.prompts: list[str] = []
        self.in_flight = 0
        self.max_in_flight = 0
        self.fail_next = 0  # number of upcoming requests to fail with HTTP 500
        self._lock = threading.Lock()

        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):  # noqa: N802 - http.server API
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length))
                prompt = body["messages"][0]["content"]
                with stub._lock:
                    stub.in_flight += 1
                    stub.max_in_flight = max(stub.max_in_flight, stub.in_flight)
                    stub.prompts.append(prompt)
                    should_fail = stub.fail_next > 0
                    if should_fail:
                        stub.fail_next -= 1
                time.sleep(stub.delay)
                try:
                    if should_fail:
                        self.send_response(500)
                        self.end_headers()
                        return
                    payload = json.dumps(
                        {"choices": [{"message": {"content": stub.responder(prompt)}}]}
                    ).encode()
                    self.send_response(200)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(payload)))
                    self.end_headers()
                    self.wfile.write(payload)
                finally:
                    with stub._lock:
                        stub.in_flight -= 1

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.url = f"http://127.0.0.1:{self._server.server_port}/v1/chat/completions"
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def close(self):
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def judge_stub():
    stub = JudgeStub()
    yield stub
    stub.close()


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
