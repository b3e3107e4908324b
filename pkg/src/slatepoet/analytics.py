"""Append-only session log and usage statistics over it.

The log is line-delimited JSON, UTF-8, one complete interaction per
line. Record schema (version 1):

    {"schema_version": 1, "ts_ms": 0, "participant": null,
     "mode": "collaborate", "poem_text": "...", "word_ids": [...],
     "stage1_text": "...", "stage2_text": "...", "latency_ms": 0}

Statistics are pure functions of the log, so re-running a report always
reproduces it. Tokenization rule for word counts: lowercase, strip
leading/trailing punctuation, split on whitespace; hyphenated words stay
whole.
"""

from __future__ import annotations

import json
import string
from collections import Counter
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Iterable, Literal, Union

from .errors import LogFormatError
from .vocabulary import Mode, Vocabulary

__all__ = [
    "SCHEMA_VERSION",
    "SessionRecord",
    "LogDiagnostic",
    "ReadResult",
    "append_record",
    "read_log",
    "mode_usage",
    "vocabulary_coverage",
    "response_lexicon",
    "top_words",
    "tokenize",
    "render_report",
]

SCHEMA_VERSION = 1

_STRIP_CHARS = string.punctuation + "‘’“”…"


@dataclass(frozen=True)
class SessionRecord:
    """One complete interaction: poem in, both chain stages out."""

    ts_ms: int
    mode: Mode
    poem_text: str
    word_ids: tuple[str, ...]
    stage1_text: str
    stage2_text: str
    latency_ms: float = 0.0
    participant: str | None = None
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        obj = asdict(self)
        obj["mode"] = self.mode.value
        obj["word_ids"] = list(self.word_ids)
        return json.dumps(obj, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "SessionRecord":
        obj = json.loads(line)
        version = obj.get("schema_version")
        if version != SCHEMA_VERSION:
            raise LogFormatError(f"unsupported record schema_version {version!r}")
        return cls(
            ts_ms=int(obj["ts_ms"]),
            mode=Mode(obj["mode"]),
            poem_text=obj["poem_text"],
            word_ids=tuple(obj["word_ids"]),
            stage1_text=obj["stage1_text"],
            stage2_text=obj["stage2_text"],
            latency_ms=float(obj.get("latency_ms", 0.0)),
            participant=obj.get("participant"),
        )


@dataclass(frozen=True)
class LogDiagnostic:
    line_number: int
    message: str


@dataclass(frozen=True)
class ReadResult:
    records: list[SessionRecord]
    diagnostics: list[LogDiagnostic] = field(default_factory=list)


def append_record(path: Union[str, Path], record: SessionRecord) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(record.to_json() + "\n")


def read_log(path: Union[str, Path]) -> ReadResult:
    """Read every valid record; corrupt lines become diagnostics with line numbers.

    A record declaring an unsupported schema version raises LogFormatError:
    silently skipping records written by a newer build would make reports lie.
    """
    records: list[SessionRecord] = []
    diagnostics: list[LogDiagnostic] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(SessionRecord.from_json(line))
            except LogFormatError:
                raise
            except (ValueError, KeyError, TypeError) as exc:
                diagnostics.append(LogDiagnostic(line_number, f"unreadable record: {exc}"))
    return ReadResult(records=records, diagnostics=diagnostics)


def mode_usage(records: Iterable[SessionRecord]) -> dict[Mode, int]:
    """Integer percentage share per mode present in the log.

    Each share rounds to the nearest percent; any rounding residue lands
    on the most-used mode so the column always totals 100.
    """
    counts = Counter(r.mode for r in records)
    total = sum(counts.values())
    if total == 0:
        raise ValueError("mode_usage needs a non-empty record list")
    shares = {mode: int(n * 100 / total + 0.5) for mode, n in counts.items()}
    residue = 100 - sum(shares.values())
    if residue:
        largest = max(counts, key=lambda m: (counts[m], m.value))
        shares[largest] += residue
    return shares


def vocabulary_coverage(
    records: Iterable[SessionRecord], vocabulary: Vocabulary
) -> tuple[int, int]:
    """(distinct word tiles used anywhere in the log, vocabulary word-tile count)."""
    used: set[str] = set()
    for r in records:
        used.update(r.word_ids)
    return len(used), len(vocabulary.word_tiles)


def tokenize(text: str) -> list[str]:
    tokens = []
    for raw in text.split():
        tok = raw.lower().strip(_STRIP_CHARS)
        if tok:
            tokens.append(tok)
    return tokens


def response_lexicon(records: Iterable[SessionRecord]) -> int:
    """Distinct token count over all stage-2 (displayed) responses."""
    seen: set[str] = set()
    for r in records:
        seen.update(tokenize(r.stage2_text))
    return len(seen)


def top_words(
    records: Iterable[SessionRecord],
    source: Literal["input", "response"],
    n: int = 10,
) -> list[tuple[str, int]]:
    """Most frequent tokens in poems or responses; count ties break alphabetically."""
    if source not in ("input", "response"):
        raise ValueError(f"source must be 'input' or 'response', got {source!r}")
    counts: Counter[str] = Counter()
    for r in records:
        text = r.poem_text if source == "input" else r.stage2_text
        counts.update(tokenize(text))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:n]


def render_report(records: list[SessionRecord], vocabulary: Vocabulary, top_n: int = 10) -> str:
    """Human-readable usage report over a session log."""
    lines = [f"poems: {len(records)}"]
    participants = {r.participant for r in records if r.participant}
    if participants:
        lines.append(
            f"participants: {len(participants)} "
            f"(avg {len(records) / len(participants):.1f} poems/participant)"
        )
    if records:
        shares = mode_usage(records)
        lines.append("mode usage:")
        for mode, share in sorted(shares.items(), key=lambda kv: -kv[1]):
            lines.append(f"  {mode.value}: {share}%")
    used, size = vocabulary_coverage(records, vocabulary)
    lines.append(f"vocabulary coverage: {used}/{size}")
    lines.append(f"response lexicon: {response_lexicon(records)} unique words")
    for source, label in (("input", "top input words"), ("response", "top response words")):
        ranked = top_words(records, source, top_n)
        if ranked:
            lines.append(f"{label}: " + ", ".join(tok for tok, _ in ranked))
    return "\n".join(lines)
