"""Text-completion backends: scripted for tests, HTTP for live models.

Every backend implements ``complete(messages, params) -> Completion``. The
harness never touches transport details beyond this surface.
"""

from __future__ import annotations

import logging
import os
import re
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import requests

logger = logging.getLogger(__name__)

ROLES = frozenset({"system", "user", "assistant"})


class BackendError(Exception):
    """Base class for failures talking to a backend."""


class TransportError(BackendError):
    """Connection-level failure (DNS, refused, reset)."""


class BackendTimeoutError(BackendError):
    """The request exceeded the configured timeout."""


class HttpStatusError(BackendError):
    def __init__(self, status: int, body: str) -> None:
        super().__init__(f"HTTP {status}: {body[:200]}")
        self.status = status


class MalformedResponseError(BackendError):
    """Response body did not carry a completion where one was expected."""


class ThroughputUndefinedError(ValueError):
    """Raised when total wall time is zero (e.g. fully scripted runs)."""


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown role: {self.role!r}")


@dataclass(frozen=True)
class GenParams:
    max_tokens: int = 512
    temperature: float = 0.0
    stop: tuple[str, ...] = ()
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")
        if self.temperature < 0.0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class Completion:
    text: str
    generated_tokens: int
    wall_seconds: float


class Backend(Protocol):
    def complete(self, messages: Sequence[ChatMessage], params: GenParams) -> Completion:
        ...


def render_conversation(messages: Sequence[ChatMessage]) -> str:
    """Flatten a conversation to one string; scripted rules match against this."""
    return "\n\n".join(f"{m.role.upper()}:\n{m.content}" for m in messages)


def approx_token_count(text: str) -> int:
    """Whitespace token count, the fallback when a server reports no usage."""
    return len(text.split())


@dataclass(frozen=True)
class ScriptRule:
    """Substring (or regex) trigger and the canned response it produces."""

    pattern: str
    response: str
    regex: bool = False

    def matches(self, rendered: str) -> bool:
        if self.regex:
            return re.search(self.pattern, rendered) is not None
        return self.pattern in rendered


@dataclass(frozen=True)
class PolicyScript:
    """Ordered rules; the first match wins, else the default response."""

    rules: tuple[ScriptRule, ...] = ()
    default: str = ""

    def respond(self, rendered: str) -> str:
        for rule in self.rules:
            if rule.matches(rendered):
                return rule.response
        return self.default


class ScriptedBackend:
    """Deterministic backend driven by a PolicyScript. Reports zero wall time."""

    def __init__(self, script: PolicyScript) -> None:
        self.script = script

    def complete(self, messages: Sequence[ChatMessage], params: GenParams) -> Completion:
        text = self.script.respond(render_conversation(messages))
        return Completion(text=text, generated_tokens=approx_token_count(text), wall_seconds=0.0)


class CallableBackend:
    """Wraps a plain function of the rendered conversation; test helper."""

    def __init__(self, fn: Callable[[str], str]) -> None:
        self.fn = fn

    def complete(self, messages: Sequence[ChatMessage], params: GenParams) -> Completion:
        text = self.fn(render_conversation(messages))
        return Completion(text=text, generated_tokens=approx_token_count(text), wall_seconds=0.0)


@dataclass
class HttpBackend:
    """OpenAI-compatible chat-completions client.

    Retries once with a fixed backoff on transport errors and timeouts;
    HTTP error statuses and malformed bodies fail immediately.
    """

    base_url: str
    model: str
    api_key_env: str = "AGENTRIG_API_KEY"
    timeout: float = 60.0
    retry_backoff: float = 0.5
    extra_headers: dict[str, str] = field(default_factory=dict)

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        headers.update(self.extra_headers)
        return headers

    def _body(self, messages: Sequence[ChatMessage], params: GenParams) -> dict:
        body: dict = {
            "model": self.model,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
            "max_tokens": params.max_tokens,
            "temperature": params.temperature,
        }
        if params.stop:
            body["stop"] = list(params.stop)
        if params.seed is not None:
            body["seed"] = params.seed
        return body

    def complete(self, messages: Sequence[ChatMessage], params: GenParams) -> Completion:
        url = self.base_url.rstrip("/") + "/v1/chat/completions"
        body = self._body(messages, params)
        last_exc: BackendError | None = None
        for attempt in range(2):
            if attempt:
                time.sleep(self.retry_backoff)
            started = time.monotonic()
            try:
                resp = requests.post(url, json=body, headers=self._headers(), timeout=self.timeout)
            except requests.Timeout as exc:
                last_exc = BackendTimeoutError(str(exc))
                logger.warning("backend timeout (attempt %d): %s", attempt + 1, exc)
                continue
            except requests.ConnectionError as exc:
                last_exc = TransportError(str(exc))
                logger.warning("backend transport error (attempt %d): %s", attempt + 1, exc)
                continue
            wall = time.monotonic() - started
            if not 200 <= resp.status_code < 300:
                raise HttpStatusError(resp.status_code, resp.text)
            try:
                payload = resp.json()
            except ValueError as exc:
                raise MalformedResponseError(f"response is not JSON: {exc}") from exc
            return _completion_from_payload(payload, wall)
        assert last_exc is not None
        raise last_exc


def _completion_from_payload(payload: dict, wall: float) -> Completion:
    try:
        text = payload["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise MalformedResponseError(f"missing choices[0].message.content: {exc}") from exc
    if not isinstance(text, str):
        raise MalformedResponseError(f"completion content is {type(text).__name__}, not str")
    usage = payload.get("usage") or {}
    tokens = usage.get("completion_tokens")
    if not isinstance(tokens, int) or tokens < 0:
        tokens = approx_token_count(text)
    return Completion(text=text, generated_tokens=tokens, wall_seconds=wall)


def throughput(completions: Sequence[Completion]) -> float:
    """Generated tokens per wall second over a batch of completions."""
    total_tokens = sum(c.generated_tokens for c in completions)
    total_wall = sum(c.wall_seconds for c in completions)
    if total_wall <= 0.0:
        raise ThroughputUndefinedError("total wall time is zero; throughput undefined")
    return total_tokens / total_wall
