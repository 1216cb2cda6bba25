"""Chat-completion providers: live OpenAI-compatible HTTP and offline fixture replay.

The wire protocol is the OpenAI chat-completions shape: POST a JSON body
with ``model``, ``messages`` (role/content pairs), and ``temperature``;
read the reply from ``choices[0].message.content``. The API key travels as
a bearer token, read from the environment variable named in the provider
config.

Fixtures key each recorded exchange by a SHA-256 over (model, temperature,
serialized messages), so replays are exact and offline runs are fully
deterministic.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path

import requests

from .records import ProviderConfig

Message = tuple[str, str]


class ProviderError(RuntimeError):
    """Transport or HTTP failure talking to the live provider."""

    def __init__(self, message: str, status: int | None = None, body: str = ""):
        detail = message
        if status is not None:
            detail += f" (HTTP {status})"
        if body:
            detail += f": {body[:200]}"
        super().__init__(detail)
        self.status = status
        self.body = body


class FixtureMiss(KeyError):
    """No recorded reply for this request hash; fatal in offline test mode."""


def request_hash(config: ProviderConfig, messages: list[Message]) -> str:
    payload = json.dumps(
        {
            "model": config.model,
            "temperature": config.temperature,
            "messages": [{"role": role, "content": content} for role, content in messages],
        },
        sort_keys=True,
        ensure_ascii=False,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class LiveProvider:
    """Synchronous client for an OpenAI-compatible chat-completions endpoint.

    Retries 429 and 5xx responses with exponential backoff up to the
    configured max_retries; other HTTP errors raise immediately. Safe for
    concurrent use: no mutable shared state beyond the session.
    """

    def __init__(self, config: ProviderConfig, *, backoff_base: float = 0.5, session=None):
        self.config = config
        self.backoff_base = backoff_base
        self._session = session or requests.Session()

    def _api_key(self) -> str:
        key = os.environ.get(self.config.api_key_env, "")
        if not key:
            raise ProviderError(
                f"no API key: set the {self.config.api_key_env} environment variable"
            )
        return key

    def send(self, messages: list[Message]) -> str:
        body = {
            "model": self.config.model,
            "messages": [{"role": role, "content": content} for role, content in messages],
            "temperature": self.config.temperature,
        }
        headers = {
            "Authorization": f"Bearer {self._api_key()}",
            "Content-Type": "application/json",
        }
        last_error: ProviderError | None = None
        for attempt in range(self.config.max_retries + 1):
            try:
                response = self._session.post(
                    self.config.endpoint_url, json=body, headers=headers, timeout=120
                )
            except requests.RequestException as exc:
                last_error = ProviderError(f"transport failure: {exc}")
                time.sleep(self.backoff_base * (2**attempt))
                continue
            if response.status_code == 429 or response.status_code >= 500:
                last_error = ProviderError(
                    "provider throttled or failed", response.status_code, response.text
                )
                time.sleep(self.backoff_base * (2**attempt))
                continue
            if response.status_code != 200:
                raise ProviderError("request rejected", response.status_code, response.text)
            try:
                parsed = response.json()
                return parsed["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise ProviderError(f"malformed completion body: {exc}", response.status_code) from exc
        raise last_error if last_error else ProviderError("retries exhausted")


class FixtureProvider:
    """Replays recorded request/reply pairs from a fixture directory.

    One JSON file per exchange: {"request_hash": ..., "request": ...,
    "reply": ...}. Performs no network operations whatsoever.
    """

    def __init__(self, config: ProviderConfig, fixtures_dir: Path):
        self.config = config
        self.fixtures_dir = Path(fixtures_dir)
        if not self.fixtures_dir.is_dir():
            raise FileNotFoundError(f"fixture directory not found: {self.fixtures_dir}")
        self._replies: dict[str, str] = {}
        for path in sorted(self.fixtures_dir.glob("*.json")):
            record = json.loads(path.read_text(encoding="utf-8"))
            self._replies[record["request_hash"]] = record["reply"]

    def send(self, messages: list[Message]) -> str:
        h = request_hash(self.config, messages)
        if h not in self._replies:
            raise FixtureMiss(
                f"no recorded reply for request hash {h} "
                f"({len(self._replies)} fixtures in {self.fixtures_dir})"
            )
        return self._replies[h]


class RecordingProvider:
    """Wraps a live provider and writes each exchange as a replayable fixture."""

    def __init__(self, inner, config: ProviderConfig, fixtures_dir: Path):
        self.inner = inner
        self.config = config
        self.fixtures_dir = Path(fixtures_dir)
        self.fixtures_dir.mkdir(parents=True, exist_ok=True)

    def send(self, messages: list[Message]) -> str:
        reply = self.inner.send(messages)
        h = request_hash(self.config, messages)
        record = {
            "request_hash": h,
            "request": {
                "model": self.config.model,
                "temperature": self.config.temperature,
                "messages": [{"role": role, "content": content} for role, content in messages],
            },
            "reply": reply,
        }
        path = self.fixtures_dir / f"{h}.json"
        path.write_text(json.dumps(record, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        return reply


def send_chat(provider, messages: list[Message]) -> str:
    """Send one conversation to a provider and return the reply text."""
    return provider.send(messages)
