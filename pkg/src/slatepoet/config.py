"""Service configuration: a flat key = value file.

Example (# starts a comment, values are bare or double-quoted):

    k = 1000
    tile_height = auto
    settle_ms = 3000
    move_epsilon = 4
    backend = stub
    backend_url = "https://api.openai.com/v1"
    backend_model = gpt-4
    backend_temperature = 0.7
    backend_max_tokens = 256
    backend_timeout_ms = 30000
    backend_retries = 2
    credential_env = SLATEPOET_API_KEY
    log_path = sessions.jsonl
    host = 127.0.0.1
    port = 8765
    multi_session = false
    tick_ms = 50

The credential itself never appears in a config file; only the name of
the environment variable that holds it does.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .backends import BackendConfig
from .geometry import GeometryConfig
from .session import DEFAULT_MOVE_EPSILON, DEFAULT_SETTLE_MS

__all__ = ["ServiceConfig", "parse_kv_file", "load_config"]


def parse_kv_file(path: Union[str, Path]) -> dict[str, str]:
    """Parse a flat key = value document into raw strings."""
    values: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_number}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        value = value.split("#", 1)[0].strip()
        if len(value) >= 2 and value[0] == value[-1] == '"':
            value = value[1:-1]
        values[key.strip()] = value
    return values


def _as_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")


@dataclass(frozen=True)
class ServiceConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    settle_ms: int = DEFAULT_SETTLE_MS
    move_epsilon: float = DEFAULT_MOVE_EPSILON
    backend: str = "stub"
    backend_config: BackendConfig = field(default_factory=BackendConfig)
    vocabulary_path: str | None = None
    log_path: str | None = "sessions.jsonl"
    host: str = "127.0.0.1"
    port: int = 8765
    multi_session: bool = False
    tick_ms: int = 50


def load_config(path: Union[str, Path]) -> ServiceConfig:
    raw = parse_kv_file(path)
    tile_height: Union[float, str] = raw.get("tile_height", "auto")
    if tile_height != "auto":
        tile_height = float(tile_height)
    geometry = GeometryConfig(k=float(raw.get("k", 1000.0)), tile_height=tile_height)
    backend_config = BackendConfig(
        base_url=raw.get("backend_url", BackendConfig.base_url),
        model=raw.get("backend_model", BackendConfig.model),
        temperature=float(raw.get("backend_temperature", BackendConfig.temperature)),
        max_output_tokens=int(raw.get("backend_max_tokens", BackendConfig.max_output_tokens)),
        timeout_ms=int(raw.get("backend_timeout_ms", BackendConfig.timeout_ms)),
        retries=int(raw.get("backend_retries", BackendConfig.retries)),
        credential_env=raw.get("credential_env", BackendConfig.credential_env),
    )
    log_path = raw.get("log_path", "sessions.jsonl")
    return ServiceConfig(
        geometry=geometry,
        settle_ms=int(raw.get("settle_ms", DEFAULT_SETTLE_MS)),
        move_epsilon=float(raw.get("move_epsilon", DEFAULT_MOVE_EPSILON)),
        backend=raw.get("backend", "stub"),
        backend_config=backend_config,
        vocabulary_path=raw.get("vocabulary") or None,
        log_path=log_path if log_path.lower() not in ("", "none", "off") else None,
        host=raw.get("host", "127.0.0.1"),
        port=int(raw.get("port", 8765)),
        multi_session=_as_bool(raw.get("multi_session", "false")),
        tick_ms=int(raw.get("tick_ms", 50)),
    )
