"""Minimal threaded HTTP service with pattern routing.

Every actor (aggregator, repository, archive, dashboard) mounts its
handlers on one of these. Handlers take a Request and return a Response;
anything they raise becomes a 500 so a malformed request can never kill
the service.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Optional
from urllib.parse import parse_qs, urlsplit

log = logging.getLogger(__name__)


@dataclass
class Request:
    method: str
    path: str
    headers: dict[str, str]
    query: dict[str, str]
    body: bytes
    params: dict[str, str] = field(default_factory=dict)

    @property
    def content_type(self) -> str:
        return self.headers.get("content-type", "").split(";")[0].strip().lower()

    def json(self):
        return json.loads(self.body.decode("utf-8"))


@dataclass
class Response:
    status: int
    body: bytes = b""
    content_type: str = "application/json"
    headers: dict[str, str] = field(default_factory=dict)


def service_base(iri: str) -> str:
    """scheme://host:port of an IRI; where a service's other endpoints live."""
    parts = urlsplit(iri)
    return f"{parts.scheme}://{parts.netloc}"


def json_response(doc, status: int = 200, **headers: str) -> Response:
    body = json.dumps(doc, indent=2, ensure_ascii=False).encode("utf-8")
    return Response(status=status, body=body, headers=headers)


def error_response(status: int, message: str) -> Response:
    return json_response({"error": message}, status=status)


Handler = Callable[[Request], Response]


class Router:
    """Matches (method, path) against patterns like /actions/{token}."""

    def __init__(self):
        self._routes: list[tuple[str, list[str], Handler]] = []

    def add(self, method: str, pattern: str, handler: Handler) -> None:
        segments = pattern.strip("/").split("/") if pattern.strip("/") else []
        self._routes.append((method.upper(), segments, handler))

    def dispatch(self, request: Request) -> Response:
        path_segments = request.path.strip("/").split("/") if request.path.strip("/") else []
        seen_path = False
        for method, segments, handler in self._routes:
            params = _match(segments, path_segments)
            if params is None:
                continue
            seen_path = True
            if method != request.method:
                continue
            request.params = params
            return handler(request)
        if seen_path:
            return error_response(405, "method not allowed")
        return error_response(404, "no such resource")


def _match(pattern: list[str], path: list[str]) -> Optional[dict[str, str]]:
    if len(pattern) != len(path):
        return None
    params = {}
    for expected, actual in zip(pattern, path):
        if expected.startswith("{") and expected.endswith("}"):
            if not actual:
                return None
            params[expected[1:-1]] = actual
        elif expected != actual:
            return None
    return params


class HttpService:
    """A routed ThreadingHTTPServer bound to host:port (port 0 for ephemeral)."""

    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = 0,
        name: str = "service",
        cors: bool = False,
    ):
        self.router = Router()
        self.name = name
        self.cors = cors
        service = self

        class _Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"
            timeout = 10

            def _handle(self):
                parts = urlsplit(self.path)
                query = {k: v[-1] for k, v in parse_qs(parts.query).items()}
                length = int(self.headers.get("Content-Length") or 0)
                body = self.rfile.read(length) if length else b""
                request = Request(
                    method=self.command,
                    path=parts.path,
                    headers={k.lower(): v for k, v in self.headers.items()},
                    query=query,
                    body=body,
                )
                if self.command == "OPTIONS" and service.cors:
                    response = Response(status=204)
                else:
                    try:
                        response = service.router.dispatch(request)
                    except Exception:
                        log.exception(
                            "%s: handler failed for %s %s", service.name, self.command, self.path
                        )
                        response = error_response(500, "internal error")
                self.send_response(response.status)
                self.send_header("Content-Type", response.content_type)
                self.send_header("Content-Length", str(len(response.body)))
                if service.cors:
                    self.send_header("Access-Control-Allow-Origin", "*")
                    self.send_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS")
                    self.send_header("Access-Control-Allow-Headers", "Content-Type")
                for key, value in response.headers.items():
                    self.send_header(key, value)
                self.end_headers()
                if self.command != "HEAD":
                    self.wfile.write(response.body)

            do_GET = do_POST = do_PUT = do_DELETE = do_HEAD = do_OPTIONS = _handle

            def log_message(self, fmt, *args):
                log.debug("%s: %s", service.name, fmt % args)

        self._server = ThreadingHTTPServer((host, port), _Handler)
        self._server.daemon_threads = True
        self._thread: Optional[threading.Thread] = None

    @property
    def host(self) -> str:
        return self._server.server_address[0]

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def base_url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def start(self) -> "HttpService":
        self._thread = threading.Thread(
            target=lambda: self._server.serve_forever(poll_interval=0.05),
            name=f"http-{self.name}",
            daemon=True,
        )
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
