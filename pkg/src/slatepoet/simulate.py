"""Synthetic detection snapshots, standing in for the camera/marker pipeline.

Poses are ideal tile placements; ``synthesize`` turns them into the
DetectedMarker sets the geometry core consumes, optionally perturbed by
corner jitter and dropout. Noise lands on the corners (real fiducial
detectors report corners) and the center is recomputed from them.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from .geometry import DetectedMarker, Point2
from .session import SlateSnapshot

__all__ = ["TilePose", "NoiseModel", "synthesize", "generate_grid", "generate_baseline"]

DEFAULT_TILE_W = 60.0
DEFAULT_TILE_H = 20.0


@dataclass(frozen=True)
class TilePose:
    """Ideal placement of one tile: center, rotation (radians, 0 = upright), size."""

    word_id: str
    center: tuple[float, float]
    rotation: float = 0.0
    width: float = DEFAULT_TILE_W
    height: float = DEFAULT_TILE_H

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"tile {self.word_id!r} needs positive width/height")


@dataclass(frozen=True)
class NoiseModel:
    corner_jitter_sigma: float = 0.0
    dropout_probability: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.corner_jitter_sigma < 0:
            raise ValueError("corner_jitter_sigma must be >= 0")
        if not (0.0 <= self.dropout_probability <= 1.0):
            raise ValueError("dropout_probability must be in [0, 1]")


def marker_from_pose(pose: TilePose) -> DetectedMarker:
    """Exact (noise-free) detection for a pose."""
    corners = _pose_corners(pose)
    return DetectedMarker(
        word_id=pose.word_id,
        center=_centroid(corners),
        corners=tuple(Point2(x, y) for x, y in corners),
    )


def _pose_corners(pose: TilePose) -> list[tuple[float, float]]:
    hw, hh = pose.width / 2.0, pose.height / 2.0
    # TL, TR, BR, BL in the tile's own frame (y-up)
    local = [(-hw, hh), (hw, hh), (hw, -hh), (-hw, -hh)]
    c, s = math.cos(pose.rotation), math.sin(pose.rotation)
    cx, cy = pose.center
    return [(cx + x * c - y * s, cy + x * s + y * c) for x, y in local]


def _centroid(corners: Sequence[tuple[float, float]]) -> Point2:
    return Point2(
        sum(x for x, _ in corners) / len(corners),
        sum(y for _, y in corners) / len(corners),
    )


def synthesize(
    poses: Sequence[TilePose], noise: NoiseModel = NoiseModel(), timestamp_ms: int = 0
) -> SlateSnapshot:
    """Detections for ``poses`` under ``noise``; deterministic given the seed."""
    rng = random.Random(noise.rng_seed)
    detections = []
    for pose in poses:
        if noise.dropout_probability > 0 and rng.random() < noise.dropout_probability:
            continue
        corners = _pose_corners(pose)
        if noise.corner_jitter_sigma > 0:
            sigma = noise.corner_jitter_sigma
            corners = [(x + rng.gauss(0, sigma), y + rng.gauss(0, sigma)) for x, y in corners]
        detections.append(
            DetectedMarker(
                word_id=pose.word_id,
                center=_centroid(corners),
                corners=tuple(Point2(x, y) for x, y in corners),
            )
        )
    return SlateSnapshot(timestamp_ms=timestamp_ms, detections=tuple(detections))


def generate_grid(
    rows: int,
    cols: int,
    spacing: float | tuple[float, float],
    tile_size: tuple[float, float] = (DEFAULT_TILE_W, DEFAULT_TILE_H),
    origin: tuple[float, float] = (0.0, 0.0),
    word_ids: Sequence[str] | None = None,
) -> list[TilePose]:
    """Upright tiles on a grid, in row-major construction order (top row first)."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    sx, sy = (spacing, spacing) if isinstance(spacing, (int, float)) else spacing
    if sx <= 0 or sy <= 0:
        raise ValueError("spacing must be positive")
    if word_ids is not None and len(word_ids) != rows * cols:
        raise ValueError(f"need {rows * cols} word_ids, got {len(word_ids)}")
    w, h = tile_size
    poses = []
    for r in range(rows):
        for c in range(cols):
            wid = word_ids[r * cols + c] if word_ids is not None else f"r{r}c{c}"
            # row 0 is the topmost band: y decreases with r in the y-up frame
            poses.append(
                TilePose(wid, (origin[0] + c * sx, origin[1] - r * sy), 0.0, w, h)
            )
    return poses


def generate_baseline(
    n: int,
    angle: float,
    spacing: float,
    tile_size: tuple[float, float] = (DEFAULT_TILE_W, DEFAULT_TILE_H),
    origin: tuple[float, float] = (0.0, 0.0),
    word_ids: Sequence[str] | None = None,
) -> list[TilePose]:
    """Tiles strung along a common baseline at ``angle`` radians, each rotated to match."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    if word_ids is not None and len(word_ids) != n:
        raise ValueError(f"need {n} word_ids, got {len(word_ids)}")
    w, h = tile_size
    dx, dy = math.cos(angle) * spacing, math.sin(angle) * spacing
    return [
        TilePose(
            word_ids[i] if word_ids is not None else f"b{i}",
            (origin[0] + i * dx, origin[1] + i * dy),
            angle,
            w,
            h,
        )
        for i in range(n)
    ]
