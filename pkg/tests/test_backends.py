import json
import logging

import pytest
import requests

from slatepoet import backends as backends_mod
from slatepoet.backends import (
    BackendConfig,
    HttpBackend,
    ReplayBackend,
    ReplayTranscript,
    StubBackend,
    load_transcripts,
    make_backend,
)
from slatepoet.errors import BackendError
from slatepoet.vocabulary import Mode

FAKE_KEY = "sk-verysecret-0000"


class FakeResponse:
    def __init__(self, status_code, body):
        self.status_code = status_code
        self._body = body

    @property
    def text(self):
        return self._body if isinstance(self._body, str) else json.dumps(self._body)

    def json(self):
        if isinstance(self._body, str):
            raise ValueError("not json")
        return self._body


def completion_body(text):
    return {"choices": [{"message": {"content": text}}]}


@pytest.fixture
def credential(monkeypatch):
    monkeypatch.setenv("SLATEPOET_API_KEY", FAKE_KEY)
    return FAKE_KEY


def make_http(monkeypatch, responses, retries=2):
    """HttpBackend whose requests.post pops canned responses (exceptions raise)."""
    calls = []

    def fake_post(url, json=None, headers=None, timeout=None):
        calls.append({"url": url, "json": json, "headers": headers})
        item = responses.pop(0)
        if isinstance(item, Exception):
            raise item
        return item

    monkeypatch.setattr(backends_mod.requests, "post", fake_post)
    backend = HttpBackend(BackendConfig(retries=retries), backoff_base_s=0.001)
    return backend, calls


def test_stub_is_deterministic():
    stub = StubBackend()
    assert stub.complete("same prompt") == stub.complete("same prompt")
    assert stub.complete("one prompt") != stub.complete("another prompt")


def test_http_happy_path_sends_wire_format(monkeypatch, credential):
    backend, calls = make_http(monkeypatch, [FakeResponse(200, completion_body("hello"))])
    assert backend.complete("say hello") == "hello"
    sent = calls[0]
    assert sent["url"].endswith("/chat/completions")
    assert sent["json"]["messages"] == [{"role": "user", "content": "say hello"}]
    assert sent["json"]["model"] == "gpt-4"
    assert sent["json"]["temperature"] == 0.7
    assert sent["json"]["max_tokens"] == 256
    assert sent["headers"]["Authorization"] == f"Bearer {FAKE_KEY}"


def test_http_retries_transport_errors_then_succeeds(monkeypatch, credential):
    backend, calls = make_http(
        monkeypatch,
        [
            requests.ConnectionError("refused"),
            FakeResponse(503, "overloaded"),
            FakeResponse(200, completion_body("eventually")),
        ],
    )
    assert backend.complete("x") == "eventually"
    assert len(calls) == 3


def test_http_does_not_retry_client_errors(monkeypatch, credential):
    backend, calls = make_http(monkeypatch, [FakeResponse(401, "bad key")])
    with pytest.raises(BackendError):
        backend.complete("x")
    assert len(calls) == 1


def test_http_gives_up_after_retries(monkeypatch, credential):
    backend, calls = make_http(
        monkeypatch,
        [requests.ConnectionError("down")] * 3,
        retries=2,
    )
    with pytest.raises(BackendError):
        backend.complete("x")
    assert len(calls) == 3


def test_http_malformed_response_is_an_error(monkeypatch, credential):
    backend, _ = make_http(monkeypatch, [FakeResponse(200, "plain text, not json")])
    with pytest.raises(BackendError):
        backend.complete("x")


def test_credential_never_leaks_into_errors_or_logs(monkeypatch, credential, caplog):
    responses = [
        FakeResponse(500, f"server echoed your token {FAKE_KEY} back"),
        FakeResponse(500, f"again {FAKE_KEY}"),
        FakeResponse(400, f"final insult {FAKE_KEY}"),
    ]
    backend, _ = make_http(monkeypatch, responses)
    with caplog.at_level(logging.DEBUG):
        with pytest.raises(BackendError) as err:
            backend.complete("x")
    assert FAKE_KEY not in str(err.value)
    assert FAKE_KEY not in caplog.text


def test_missing_credential_is_a_clear_error(monkeypatch):
    monkeypatch.delenv("SLATEPOET_API_KEY", raising=False)
    backend = HttpBackend(BackendConfig())
    with pytest.raises(BackendError, match="SLATEPOET_API_KEY"):
        backend.complete("x")


def test_backend_config_validation():
    with pytest.raises(ValueError):
        BackendConfig(timeout_ms=0)
    with pytest.raises(ValueError):
        BackendConfig(retries=-1)


def test_replay_transcripts_file_round_trip(tmp_path):
    path = tmp_path / "transcripts.jsonl"
    rows = [
        {"mode": "ideate", "poem": "a b", "stage1": "longer text", "stage2": "short"},
    ]
    path.write_text("\n".join(json.dumps(r) for r in rows), encoding="utf-8")
    loaded = load_transcripts(path)
    assert loaded == [ReplayTranscript(Mode.IDEATE, "a b", "longer text", "short")]
    backend = ReplayBackend.from_file(path)
    assert backend.complete(
        "The user just input the following text: a b Try and develop a creative idea "
        "or strategy that builds upon similarities between these words/concepts "
        "presented. Please keep your response short (2-3 sentences)."
    ) == "longer text"


def test_make_backend_factory(tmp_path):
    assert isinstance(make_backend("stub"), StubBackend)
    assert isinstance(make_backend("replay"), ReplayBackend)
    assert isinstance(make_backend("http"), HttpBackend)
    with pytest.raises(ValueError):
        make_backend("carrier-pigeon")
