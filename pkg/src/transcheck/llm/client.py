"""Chat-completion clients: an OpenAI-compatible HTTP client and a replay store."""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

DEFAULT_MAX_ATTEMPTS = 5
DEFAULT_TIME_BUDGET = 600.0
DEFAULT_IN_FLIGHT = 4
API_KEY_ENV = "OPENAI_API_KEY"


class TransportError(Exception):
    """The endpoint could not be reached or answered with garbage."""


class NoFixture(KeyError):
    """Replay mode has no stored response for this prompt."""


@dataclass
class LlmConfig:
    endpoint: str = "http://localhost:8000/v1"
    model: str = "mock"
    temperature: float = 0.0
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    time_budget: float = DEFAULT_TIME_BUDGET     # seconds, whole retry loop
    include_description: bool = True
    request_timeout: float = 300.0
    max_in_flight: int = DEFAULT_IN_FLIGHT

    def __post_init__(self):
        if self.temperature != 0:
            raise ValueError("temperature is fixed at 0")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")

    def to_json(self) -> dict:
        return {"endpoint": self.endpoint, "model": self.model, "temperature": self.temperature,
                "max_attempts": self.max_attempts, "time_budget": self.time_budget,
                "include_description": self.include_description}


class SystemClock:
    def now(self) -> float:
        return time.monotonic()

    def sleep(self, seconds: float):
        time.sleep(seconds)


class FakeClock:
    """Clock for tests; sleeping advances time instantly."""

    def __init__(self, start: float = 0.0):
        self.t = start

    def now(self) -> float:
        return self.t

    def sleep(self, seconds: float):
        self.t += seconds


def as_messages(prompt) -> list[dict]:
    if isinstance(prompt, str):
        return [{"role": "user", "content": prompt}]
    return [dict(m) for m in prompt]


def prompt_key(prompt) -> str:
    """Replay key: sha256 of the prompt text, or of the JSON-encoded
    conversation when there is more than one message."""
    msgs = as_messages(prompt)
    if len(msgs) == 1 and msgs[0]["role"] == "user":
        data = msgs[0]["content"]
    else:
        data = json.dumps([[m["role"], m["content"]] for m in msgs], ensure_ascii=False)
    return hashlib.sha256(data.encode("utf-8")).hexdigest()


@dataclass
class Completion:
    text: str
    latency: float


class HttpClient:
    def __init__(self, config: LlmConfig, api_key: str | None = None, clock=None):
        self.config = config
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.clock = clock or SystemClock()
        self._slots = threading.BoundedSemaphore(config.max_in_flight)

    def url(self) -> str:
        base = self.config.endpoint.rstrip("/")
        if base.endswith("/chat/completions"):
            return base
        return base + "/chat/completions"

    def complete(self, prompt) -> Completion:
        body = json.dumps({"model": self.config.model, "messages": as_messages(prompt),
                           "temperature": self.config.temperature}).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        req = urllib.request.Request(self.url(), data=body, headers=headers, method="POST")
        start = self.clock.now()
        with self._slots:
            try:
                with urllib.request.urlopen(req, timeout=self.config.request_timeout) as resp:
                    payload = json.loads(resp.read().decode("utf-8"))
            except (urllib.error.URLError, OSError, ValueError) as e:
                raise TransportError(f"{self.url()}: {e}") from e
        try:
            text = payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as e:
            raise TransportError(f"malformed response from {self.url()}") from e
        return Completion(text or "", self.clock.now() - start)


class ReplayClient:
    """Serves stored responses from ``<dir>/<sha256>.txt`` files."""

    def __init__(self, directory, latency: float = 0.0, clock=None):
        self.directory = Path(directory)
        self.latency = latency
        self.clock = clock or SystemClock()
        self.store: dict[str, str] = {}
        if self.directory.is_dir():
            for p in sorted(self.directory.glob("*.txt")):
                self.store[p.stem] = p.read_text(encoding="utf-8")
        self.calls = 0

    def complete(self, prompt) -> Completion:
        self.calls += 1
        key = prompt_key(prompt)
        if self.latency:
            self.clock.sleep(self.latency)
        if key not in self.store:
            raise NoFixture(key)
        return Completion(self.store[key], self.latency)


class ScriptedClient:
    """Returns canned responses in order, regardless of the prompt."""

    def __init__(self, responses, latency: float = 0.0, clock=None):
        self.responses = list(responses)
        self.latency = latency
        self.clock = clock or SystemClock()
        self.prompts: list = []

    def complete(self, prompt) -> Completion:
        self.prompts.append(prompt)
        if self.latency:
            self.clock.sleep(self.latency)
        if not self.responses:
            raise NoFixture(prompt_key(prompt))
        r = self.responses.pop(0) if len(self.responses) > 1 else self.responses[0]
        if isinstance(r, Exception):
            raise r
        return Completion(r, self.latency)


class RecordingClient:
    """Wraps a live client and writes every exchange into a replay directory."""

    def __init__(self, inner, directory):
        self.inner = inner
        self.directory = Path(directory)

    def complete(self, prompt) -> Completion:
        out = self.inner.complete(prompt)
        record(self.directory, prompt, out.text)
        return out


def record(directory, prompt, response: str) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{prompt_key(prompt)}.txt"
    path.write_text(response, encoding="utf-8")
    return path


def complete(client, prompt) -> Completion:
    return client.complete(prompt)
