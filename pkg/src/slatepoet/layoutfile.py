"""On-disk formats for detection layouts and simulator pose lists.

Both are JSON documents with a ``format_version`` field (currently 1),
coordinates in logical pixels, y-up.

Layout file (consumed by the ``order`` CLI and test fixtures):

    {"format_version": 1,
     "config": {"k": 1000.0, "tile_height": "auto"},
     "markers": [{"word_id": "hate", "center": [x, y],
                  "corners": [[x,y],[x,y],[x,y],[x,y]]}]}

Pose file (consumed by the ``simulate`` CLI, which emits a layout file):

    {"format_version": 1,
     "noise": {"corner_jitter_sigma": 0.0, "dropout_probability": 0.0, "rng_seed": 0},
     "poses": [{"word_id": "hate", "center": [x, y], "rotation": 0.0,
                "width": 60.0, "height": 20.0}]}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Union

from .errors import LayoutFormatError
from .geometry import DetectedMarker, GeometryConfig, Point2
from .simulate import NoiseModel, TilePose

__all__ = [
    "FORMAT_VERSION",
    "layout_document",
    "save_layout",
    "load_layout",
    "save_poses",
    "load_poses",
]

FORMAT_VERSION = 1


def _check_version(obj: dict, path: Union[str, Path]) -> None:
    version = obj.get("format_version")
    if version != FORMAT_VERSION:
        raise LayoutFormatError(f"{path}: unsupported format_version {version!r}")


def _tile_height_json(config: GeometryConfig):
    return config.tile_height if isinstance(config.tile_height, str) else float(config.tile_height)


def layout_document(markers: Iterable[DetectedMarker], config: GeometryConfig) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "config": {"k": config.k, "tile_height": _tile_height_json(config)},
        "markers": [
            {
                "word_id": m.word_id,
                "center": [m.center.x, m.center.y],
                "corners": [[c.x, c.y] for c in m.corners],
            }
            for m in markers
        ],
    }


def save_layout(
    path: Union[str, Path], markers: Iterable[DetectedMarker], config: GeometryConfig
) -> None:
    doc = layout_document(markers, config)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_layout(path: Union[str, Path]) -> tuple[list[DetectedMarker], GeometryConfig]:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise LayoutFormatError(f"{path}: {exc}") from exc
    _check_version(obj, path)
    cfg = obj.get("config", {})
    config = GeometryConfig(k=cfg.get("k", 1000.0), tile_height=cfg.get("tile_height", "auto"))
    try:
        markers = [
            DetectedMarker(
                word_id=m["word_id"],
                center=Point2(*m["center"]),
                corners=tuple(Point2(*c) for c in m["corners"]),
            )
            for m in obj["markers"]
        ]
    except (KeyError, TypeError) as exc:
        raise LayoutFormatError(f"{path}: malformed marker entry ({exc})") from exc
    return markers, config


def save_poses(
    path: Union[str, Path], poses: Iterable[TilePose], noise: NoiseModel = NoiseModel()
) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "noise": {
            "corner_jitter_sigma": noise.corner_jitter_sigma,
            "dropout_probability": noise.dropout_probability,
            "rng_seed": noise.rng_seed,
        },
        "poses": [
            {
                "word_id": p.word_id,
                "center": [p.center[0], p.center[1]],
                "rotation": p.rotation,
                "width": p.width,
                "height": p.height,
            }
            for p in poses
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_poses(path: Union[str, Path]) -> tuple[list[TilePose], NoiseModel]:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise LayoutFormatError(f"{path}: {exc}") from exc
    _check_version(obj, path)
    n = obj.get("noise", {})
    noise = NoiseModel(
        corner_jitter_sigma=float(n.get("corner_jitter_sigma", 0.0)),
        dropout_probability=float(n.get("dropout_probability", 0.0)),
        rng_seed=int(n.get("rng_seed", 0)),
    )
    try:
        poses = [
            TilePose(
                word_id=p["word_id"],
                center=(float(p["center"][0]), float(p["center"][1])),
                rotation=float(p.get("rotation", 0.0)),
                width=float(p.get("width", 60.0)),
                height=float(p.get("height", 20.0)),
            )
            for p in obj["poses"]
        ]
    except (KeyError, TypeError) as exc:
        raise LayoutFormatError(f"{path}: malformed pose entry ({exc})") from exc
    return poses, noise
