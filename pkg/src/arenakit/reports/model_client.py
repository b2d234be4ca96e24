"""External chat-completion access.

One abstract interface backed by either a real HTTPS endpoint or a
deterministic stub. Requests POST to ``{endpoint}/v1/chat/completions``:

    {"model": ..., "messages": [{"role": "user", "content": ...}],
     "images_b64": [...optional base64 frames...]}

and the reply's first choice message content is the completion:

    {"choices": [{"message": {"role": "assistant", "content": ...}}]}

Credentials come from the environment (``ARENAKIT_MODEL_KEY``), never from
code or config files. All tests run against stubs; real model output
quality is out of scope.
"""

from __future__ import annotations

import base64
import json
import os
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import requests

API_KEY_ENV = "ARENAKIT_MODEL_KEY"
ENDPOINT_ENV = "ARENAKIT_MODEL_ENDPOINT"
DEFAULT_VISION_MODEL = "gpt-4.5"   # configurable, not a code dependency
DEFAULT_TEXT_MODEL = "o3"


class ModelClientError(Exception):
    pass


@dataclass
class HttpChatClient:
    """Minimal chat-completion client over HTTP(S)."""

    endpoint: str | None = None
    model: str = DEFAULT_TEXT_MODEL
    timeout_s: float = 60.0

    def complete(self, prompt: str, images: tuple[bytes, ...] = ()) -> str:
        endpoint = self.endpoint or os.environ.get(ENDPOINT_ENV)
        if not endpoint:
            raise ModelClientError(f"no model endpoint configured (set {ENDPOINT_ENV})")
        headers = {}
        key = os.environ.get(API_KEY_ENV)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        body = {"model": self.model, "messages": [{"role": "user", "content": prompt}]}
        if images:
            body["images_b64"] = [base64.b64encode(img).decode("ascii") for img in images]
        try:
            resp = requests.post(endpoint.rstrip("/") + "/v1/chat/completions",
                                 json=body, headers=headers, timeout=self.timeout_s)
        except requests.exceptions.RequestException as exc:
            raise ModelClientError(f"model call failed: {exc}") from exc
        if resp.status_code != 200:
            raise ModelClientError(f"model call failed: HTTP {resp.status_code}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError, TypeError) as exc:
            raise ModelClientError(f"malformed completion response: {exc}") from exc


@dataclass
class StubChatClient:
    """Deterministic stand-in: replays canned responses and records prompts."""

    responses: list[str] = field(default_factory=list)
    prompts: list[str] = field(default_factory=list)
    image_counts: list[int] = field(default_factory=list)

    def complete(self, prompt: str, images: tuple[bytes, ...] = ()) -> str:
        self.prompts.append(prompt)
        self.image_counts.append(len(images))
        if not self.responses:
            raise ModelClientError("stub exhausted: no canned responses left")
        return self.responses.pop(0)


class _StubHandler(BaseHTTPRequestHandler):
    def log_message(self, fmt, *args):
        pass

    def do_POST(self):
        if self.path != "/v1/chat/completions":
            self.send_error(404)
            return
        length = int(self.headers.get("Content-Length", "0"))
        request = json.loads(self.rfile.read(length))
        self.server.requests.append(request)  # type: ignore[attr-defined]
        responses = self.server.responses  # type: ignore[attr-defined]
        content = responses.pop(0) if responses else ""
        body = json.dumps({"choices": [{"message": {"role": "assistant", "content": content}}]}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class StubChatServer:
    """HTTP stub implementing the documented completion schema."""

    def __init__(self, responses: list[str], host: str = "127.0.0.1", port: int = 0):
        self._server = ThreadingHTTPServer((host, port), _StubHandler)
        self._server.daemon_threads = True
        self._server.responses = list(responses)  # type: ignore[attr-defined]
        self._server.requests = []  # type: ignore[attr-defined]
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def endpoint(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    @property
    def requests(self) -> list[dict]:
        return self._server.requests  # type: ignore[attr-defined]

    def stop(self):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.stop()
