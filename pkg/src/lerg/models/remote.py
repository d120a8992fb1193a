"""Client for external model servers.

Wire protocol, bit-exact, over either stdio of a child process or HTTP:

    handshake   {"protocol": "lerg-score", "version": 1, "normalized": <bool>, "max_batch": <int>}
    request     {"id": <string>, "contexts": [[<string>...]...], "response": [<string>...]}
    reply       {"id": <string>, "logprobs": [[<float>...]...]}
    error reply {"id": <string>, "error": {"code": <string>, "message": <string>}}

A stdio server emits the handshake as its first line; the HTTP transport
serves the same object at GET /handshake and scores at POST /score.
Floats are IEEE-754 doubles serialized with up to 17 significant digits,
so parsed values are bit-equal to what the server computed.
"""

from __future__ import annotations

import json
import shlex
import subprocess
import time
from typing import Callable, Sequence

import httpx

from ..errors import ModelProtocolError, RemoteUnavailable
from .base import KIND_REMOTE, Manifest

PROTOCOL_NAME = "lerg-score"
PROTOCOL_VERSION = 1

RETRY_ATTEMPTS = 3
RETRY_BACKOFF_S = 0.1


def encode_request(request_id: str, contexts: Sequence[Sequence[str]], response: Sequence[str]) -> str:
    """Canonical request line: compact separators, fixed key order."""
    payload = {"id": request_id, "contexts": [list(c) for c in contexts], "response": list(response)}
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def parse_handshake(line: str) -> Manifest:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ModelProtocolError(f"malformed handshake: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("protocol") != PROTOCOL_NAME:
        raise ModelProtocolError(f"unexpected handshake {line!r}")
    if payload.get("version") != PROTOCOL_VERSION:
        raise ModelProtocolError(f"unsupported protocol version {payload.get('version')!r}")
    try:
        return Manifest(
            kind=KIND_REMOTE,
            normalized=bool(payload["normalized"]),
            max_batch=int(payload["max_batch"]),
            description=str(payload.get("model", "")),
        )
    except KeyError as exc:
        raise ModelProtocolError(f"handshake missing field {exc}") from exc


def parse_reply(line: str, request_id: str, n_contexts: int, n_steps: int) -> list[list[float]]:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ModelProtocolError(f"malformed reply: {exc}") from exc
    if not isinstance(payload, dict):
        raise ModelProtocolError(f"malformed reply {line!r}")
    if "error" in payload:
        err = payload["error"] if isinstance(payload["error"], dict) else {}
        raise ModelProtocolError(
            f"server error: {err.get('message', 'unknown')}", code=err.get("code")
        )
    if payload.get("id") != request_id:
        raise ModelProtocolError(f"reply id {payload.get('id')!r} does not match request {request_id!r}")
    logprobs = payload.get("logprobs")
    if not isinstance(logprobs, list) or len(logprobs) != n_contexts:
        raise ModelProtocolError(f"expected {n_contexts} logprob rows")
    out = []
    for row in logprobs:
        if not isinstance(row, list) or len(row) != n_steps:
            raise ModelProtocolError(f"expected {n_steps} steps per logprob row")
        out.append([float(v) for v in row])
    return out


class StdioTransport:
    """Child process speaking newline-delimited JSON on stdin/stdout."""

    def __init__(self, server_cmd: str):
        self._cmd = server_cmd
        try:
            self._proc = subprocess.Popen(
                shlex.split(server_cmd),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise RemoteUnavailable(f"could not launch {server_cmd!r}: {exc}") from exc

    def handshake(self) -> Manifest:
        line = self._read_line()
        return parse_handshake(line)

    def round_trip(self, request_line: str) -> str:
        try:
            assert self._proc.stdin is not None
            self._proc.stdin.write(request_line + "\n")
            self._proc.stdin.flush()
        except (OSError, ValueError) as exc:
            raise RemoteUnavailable(f"server pipe closed: {exc}") from exc
        return self._read_line()

    def _read_line(self) -> str:
        assert self._proc.stdout is not None
        line = self._proc.stdout.readline()
        if not line:
            raise RemoteUnavailable("server closed its output stream")
        return line.rstrip("\n")

    def close(self) -> None:
        if self._proc.poll() is None:
            self._proc.terminate()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()


class HttpTransport:
    """HTTP client for servers exposing GET /handshake and POST /score."""

    def __init__(self, endpoint: str, client: httpx.Client | None = None, timeout: float = 30.0):
        self._base = endpoint.rstrip("/")
        self._client = client or httpx.Client(timeout=timeout)

    def handshake(self) -> Manifest:
        try:
            resp = self._client.get(self._base + "/handshake")
        except httpx.HTTPError as exc:
            raise RemoteUnavailable(f"handshake transport failure: {exc}") from exc
        return parse_handshake(resp.text)

    def round_trip(self, request_line: str) -> str:
        try:
            resp = self._client.post(
                self._base + "/score",
                content=request_line.encode("utf-8"),
                headers={"content-type": "application/json"},
            )
        except httpx.HTTPError as exc:
            raise RemoteUnavailable(f"score transport failure: {exc}") from exc
        return resp.text

    def close(self) -> None:
        self._client.close()


class RemoteModel:
    """Handle backed by a transport, with retry on transport failure.

    Transport failures are retried 3 times with exponential backoff
    starting at 100 ms; protocol errors are not retried.
    """

    def __init__(self, transport, sleeper: Callable[[float], None] = time.sleep):
        self._transport = transport
        self._sleeper = sleeper
        self._counter = 0
        self._manifest = self._with_retries(transport.handshake)

    @property
    def manifest(self) -> Manifest:
        return self._manifest

    def _with_retries(self, fn):
        delay = RETRY_BACKOFF_S
        for attempt in range(RETRY_ATTEMPTS):
            try:
                return fn()
            except RemoteUnavailable:
                if attempt == RETRY_ATTEMPTS - 1:
                    raise
                self._sleeper(delay)
                delay *= 2

    def _next_id(self) -> str:
        self._counter += 1
        return f"req-{self._counter:06d}"

    def score_segments(self, context_segments, response_segments) -> list[float]:
        return self.score_segments_batch([list(context_segments)], list(response_segments))[0]

    def score_segments_batch(self, contexts, response_segments) -> list[list[float]]:
        request_id = self._next_id()
        line = encode_request(request_id, contexts, response_segments)
        reply = self._with_retries(lambda: self._transport.round_trip(line))
        return parse_reply(reply, request_id, len(contexts), len(response_segments))

    def close(self) -> None:
        self._transport.close()

    def __enter__(self) -> "RemoteModel":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def connect(endpoint: str | None = None, server_cmd: str | None = None, **kwargs) -> RemoteModel:
    """Open a remote handle from either an HTTP endpoint or a server command."""
    if (endpoint is None) == (server_cmd is None):
        raise ModelProtocolError("exactly one of endpoint or server_cmd is required")
    transport = HttpTransport(endpoint) if endpoint else StdioTransport(server_cmd)
    return RemoteModel(transport, **kwargs)
