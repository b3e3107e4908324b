"""Word tiles, mode markers, and the shipped vocabulary.

The vocabulary file is a JSON-lines table, one tile per line:

    {"word_id": "human", "text": "human", "attach_left": false, "kind": "word"}
    {"word_id": "s", "text": "s", "attach_left": true, "kind": "word"}
    {"word_id": "mode_ideate", "text": "ideate", "kind": "mode-marker", "mode": "ideate"}

The default set ships 175 word tiles (a magnetic-poetry style lexicon,
including attach-left suffix and punctuation tiles) plus the four mode
markers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Union

from .errors import UnknownWordError
from .geometry import OrderedLayout

__all__ = ["Mode", "WordTile", "Vocabulary", "load_vocabulary", "default_vocabulary", "layout_to_text"]

KIND_WORD = "word"
KIND_MODE_MARKER = "mode-marker"


class Mode(str, Enum):
    INTERPRET = "interpret"
    COLLABORATE = "collaborate"
    IDEATE = "ideate"
    ANALOGY = "analogy"


@dataclass(frozen=True)
class WordTile:
    word_id: str
    text: str
    attach_left: bool = False
    kind: str = KIND_WORD
    mode: Mode | None = None

    def __post_init__(self):
        if self.kind not in (KIND_WORD, KIND_MODE_MARKER):
            raise ValueError(f"unknown tile kind {self.kind!r}")
        if self.kind == KIND_WORD and not self.text:
            raise ValueError(f"word tile {self.word_id!r} has empty text")
        if self.kind == KIND_MODE_MARKER and self.mode is None:
            raise ValueError(f"mode marker {self.word_id!r} has no mode")

    @property
    def is_mode_marker(self) -> bool:
        return self.kind == KIND_MODE_MARKER


class Vocabulary:
    """Lookup table over a fixed tile set; exactly one marker per mode."""

    def __init__(self, tiles: Iterable[WordTile]):
        self._by_id: dict[str, WordTile] = {}
        for tile in tiles:
            if tile.word_id in self._by_id:
                raise ValueError(f"duplicate word_id in vocabulary: {tile.word_id!r}")
            self._by_id[tile.word_id] = tile
        markers = [t for t in self._by_id.values() if t.is_mode_marker]
        modes = sorted(t.mode.value for t in markers if t.mode is not None)
        if modes != sorted(m.value for m in Mode):
            raise ValueError(f"vocabulary must carry exactly one marker per mode, got {modes}")
        self._mode_markers = {t.mode: t for t in markers}

    def __contains__(self, word_id: str) -> bool:
        return word_id in self._by_id

    def __iter__(self) -> Iterator[WordTile]:
        return iter(self._by_id.values())

    def __len__(self) -> int:
        return len(self._by_id)

    def __getitem__(self, word_id: str) -> WordTile:
        try:
            return self._by_id[word_id]
        except KeyError:
            raise UnknownWordError(word_id) from None

    def get(self, word_id: str) -> WordTile | None:
        return self._by_id.get(word_id)

    @property
    def word_tiles(self) -> list[WordTile]:
        return [t for t in self._by_id.values() if not t.is_mode_marker]

    @property
    def mode_markers(self) -> dict[Mode, WordTile]:
        return dict(self._mode_markers)

    def mode_of(self, word_id: str) -> Mode | None:
        tile = self._by_id.get(word_id)
        return tile.mode if tile is not None and tile.is_mode_marker else None


def _tile_from_json(obj: dict) -> WordTile:
    mode = obj.get("mode")
    return WordTile(
        word_id=obj["word_id"],
        text=obj["text"],
        attach_left=bool(obj.get("attach_left", False)),
        kind=obj.get("kind", KIND_WORD),
        mode=Mode(mode) if mode is not None else None,
    )


def load_vocabulary(path: Union[str, Path]) -> Vocabulary:
    tiles = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tiles.append(_tile_from_json(json.loads(line)))
    return Vocabulary(tiles)


_default: Vocabulary | None = None


def default_vocabulary() -> Vocabulary:
    """The shipped 175-word tile set plus the four mode markers (cached)."""
    global _default
    if _default is None:
        text = resources.files("slatepoet").joinpath("data/vocabulary.jsonl").read_text("utf-8")
        tiles = [_tile_from_json(json.loads(line)) for line in text.splitlines() if line.strip()]
        _default = Vocabulary(tiles)
    return _default


def layout_to_text(layout: OrderedLayout, vocabulary: Vocabulary) -> str:
    """Render ordered lines as poem text.

    Words within a line are joined by single spaces; attach-left tiles
    (suffixes, punctuation) join with no preceding space. Lines join with
    newlines. An empty layout renders as the empty string.
    """
    rendered_lines = []
    for line in layout.lines:
        buf = ""
        for word_id in line:
            tile = vocabulary[word_id]
            if buf and not tile.attach_left:
                buf += " "
            buf += tile.text
        rendered_lines.append(buf)
    return "\n".join(rendered_lines)
