"""Deterministic mock layout-analysis server for tests and demos.

Implements the /analyze protocol exactly. Responses are canned: an explicit
fixture can be registered per request body hash, otherwise the fixed default
segments are returned. The server counts requests so tests can assert that
the text path never touches it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

DEFAULT_SEGMENTS: list[dict] = [
    {
        "page": 1,
        "class": "Title",
        "bbox": [72.0, 40.0, 400.0, 80.0],
        "text": "Mock scanned title",
        "confidence": 0.99,
    },
    {
        "page": 1,
        "class": "Text",
        "bbox": [72.0, 120.0, 400.0, 200.0],
        "text": "Mock scanned body text.",
        "confidence": 0.95,
    },
]


def request_hash(body: bytes) -> str:
    """Key used to look up canned fixtures: SHA-256 of the request body."""
    return hashlib.sha256(body).hexdigest()


class MockLayoutServer:
    """In-process HTTP server speaking the layout protocol.

    Use as a context manager; ``url`` is the endpoint to pass to the client.
    """

    def __init__(
        self,
        canned: dict[str, list[dict]] | None = None,
        default_segments: list[dict] | None = None,
        port: int = 0,
    ):
        self.canned = canned or {}
        self.default_segments = (
            DEFAULT_SEGMENTS if default_segments is None else default_segments
        )
        self.request_count = 0
        self.last_request: bytes | None = None
        self._lock = threading.Lock()
        self._httpd = ThreadingHTTPServer(("127.0.0.1", port), self._make_handler())
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    def _make_handler(self) -> type[BaseHTTPRequestHandler]:
        server = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self) -> None:  # noqa: N802 (http.server API)
                length = int(self.headers.get("Content-Length", "0"))
                body = self.rfile.read(length)
                with server._lock:
                    server.request_count += 1
                    server.last_request = body
                if self.path.rstrip("/") != "/analyze" and self.path != "/analyze":
                    self.send_error(404)
                    return
                segments = server.canned.get(request_hash(body), server.default_segments)
                payload = json.dumps({"segments": segments}).encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, format: str, *args) -> None:
                pass

        return Handler

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "MockLayoutServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()

    def __enter__(self) -> "MockLayoutServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Run the mock layout service")
    parser.add_argument("--port", type=int, default=8409)
    args = parser.parse_args(argv)
    server = MockLayoutServer(port=args.port)
    print(f"mock layout service listening on {server.url}")
    server.start()
    try:
        server._thread.join()
    except KeyboardInterrupt:
        server.stop()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
