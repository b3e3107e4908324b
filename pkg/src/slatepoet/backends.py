"""Completion backends: deterministic stub, transcript replay, and live HTTP.

The live backend speaks the common chat-completion JSON wire format
(POST <base_url>/chat/completions with model/messages/temperature/
max_tokens), so any compatible hosted or local server works. The bearer
credential comes only from an environment variable and is scrubbed from
every error message and log line.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Union

import requests

from .chains import CHAIN_SPECS, render
from .errors import BackendError
from .vocabulary import Mode

__all__ = [
    "BackendConfig",
    "StubBackend",
    "ReplayBackend",
    "ReplayTranscript",
    "HttpBackend",
    "load_transcripts",
    "bundled_transcripts",
    "make_backend",
]

log = logging.getLogger(__name__)

# Small fixed lexicon the stub draws from; tone-matched to the slate.
_STUB_LEXICON = (
    "quiet machine dream river word mirror slow garden paper night "
    "wonder see memory light answer question still hum spark hold"
).split()


class StubBackend:
    """Deterministic completions derived from a hash of the prompt text.

    Same prompt, same output, on every platform; useful for offline runs
    and for tests that need the chain to be a pure function.
    """

    identifier = "stub"

    def complete(self, prompt: str) -> str:
        digest = hashlib.sha256(prompt.encode("utf-8")).digest()
        rng = random.Random(int.from_bytes(digest[:8], "big"))
        n = rng.randint(6, 12)
        return " ".join(rng.choice(_STUB_LEXICON) for _ in range(n))


@dataclass(frozen=True)
class ReplayTranscript:
    """One recorded exchange: both stage outputs for a (mode, poem) pair."""

    mode: Mode
    poem: str
    stage1: str
    stage2: str


class ReplayBackend:
    """Serves recorded completions, keyed by exact (mode, poem) match.

    Both stage prompts are pre-rendered at load time, so the backend can
    answer either completion call of the chain.
    """

    identifier = "replay"

    def __init__(self, transcripts: Iterable[ReplayTranscript]):
        self._by_prompt: dict[str, str] = {}
        self.transcripts = list(transcripts)
        for t in self.transcripts:
            spec = CHAIN_SPECS[t.mode]
            self._by_prompt[render(spec.prompt1, {"poem": t.poem})] = t.stage1
            self._by_prompt[render(spec.prompt2, {"response": t.stage1})] = t.stage2

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ReplayBackend":
        return cls(load_transcripts(path))

    def complete(self, prompt: str) -> str:
        try:
            return self._by_prompt[prompt]
        except KeyError:
            raise BackendError(
                f"no recorded completion for prompt starting {prompt[:60]!r}"
            ) from None


def load_transcripts(path: Union[str, Path]) -> list[ReplayTranscript]:
    transcripts = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            transcripts.append(
                ReplayTranscript(
                    mode=Mode(obj["mode"]),
                    poem=obj["poem"],
                    stage1=obj["stage1"],
                    stage2=obj["stage2"],
                )
            )
    return transcripts


def bundled_transcripts() -> list[ReplayTranscript]:
    """The four example exchanges shipped with the package."""
    text = resources.files("slatepoet").joinpath("data/replay_transcripts.jsonl").read_text("utf-8")
    return [
        ReplayTranscript(
            mode=Mode(obj["mode"]), poem=obj["poem"], stage1=obj["stage1"], stage2=obj["stage2"]
        )
        for obj in (json.loads(line) for line in text.splitlines() if line.strip())
    ]


@dataclass(frozen=True)
class BackendConfig:
    """Connection settings for the live backend; the credential itself stays
    in the environment variable named by ``credential_env``."""

    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4"
    temperature: float = 0.7
    max_output_tokens: int = 256
    timeout_ms: int = 30_000
    retries: int = 2
    credential_env: str = "SLATEPOET_API_KEY"

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be > 0")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")


class HttpBackend:
    """Chat-completion client with bounded retry on transport errors.

    Retries (with exponential backoff) cover connection failures,
    timeouts, and 429/5xx statuses only; a well-formed completion or a
    4xx client error is never retried.
    """

    def __init__(self, config: BackendConfig, backoff_base_s: float = 0.5):
        self.config = config
        self.identifier = f"http:{config.model}"
        self._backoff_base_s = backoff_base_s

    def _credential(self) -> str:
        key = os.environ.get(self.config.credential_env, "")
        if not key:
            raise BackendError(
                f"no credential found in environment variable {self.config.credential_env}"
            )
        return key

    def _scrub(self, text: str, credential: str) -> str:
        return text.replace(credential, "***") if credential else text

    def complete(self, prompt: str) -> str:
        cfg = self.config
        credential = self._credential()
        url = cfg.base_url.rstrip("/") + "/chat/completions"
        payload = {
            "model": cfg.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_output_tokens,
        }
        timeout_s = cfg.timeout_ms / 1000.0
        last_error = "unknown"
        for attempt in range(cfg.retries + 1):
            if attempt:
                delay = self._backoff_base_s * (2 ** (attempt - 1))
                log.warning("backend retry %d/%d after %.1fs: %s",
                            attempt, cfg.retries, delay, self._scrub(last_error, credential))
                time.sleep(delay)
            try:
                resp = requests.post(
                    url,
                    json=payload,
                    headers={"Authorization": f"Bearer {credential}"},
                    timeout=timeout_s,
                )
            except requests.RequestException as exc:
                last_error = f"transport error: {type(exc).__name__}: {exc}"
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = f"HTTP {resp.status_code}: {resp.text[:200]}"
                continue
            if resp.status_code != 200:
                raise BackendError(
                    self._scrub(f"HTTP {resp.status_code}: {resp.text[:200]}", credential)
                )
            try:
                data = resp.json()
                return data["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise BackendError(
                    self._scrub(f"malformed completion response: {exc}", credential)
                ) from None
        raise BackendError(
            self._scrub(f"backend unreachable after {cfg.retries + 1} attempts: {last_error}",
                        credential)
        )


def make_backend(kind: str, config: BackendConfig | None = None):
    """Backend factory for CLI/service config values: stub | replay[:path] | http."""
    if kind == "stub":
        return StubBackend()
    if kind == "replay":
        return ReplayBackend(bundled_transcripts())
    if kind.startswith("replay:"):
        return ReplayBackend.from_file(kind.split(":", 1)[1])
    if kind == "http":
        return HttpBackend(config or BackendConfig())
    raise ValueError(f"unknown backend kind {kind!r}")
