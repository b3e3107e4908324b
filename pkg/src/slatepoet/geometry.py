"""Reading-order geometry for scattered word tiles.

Coordinates are logical pixels in a y-up frame: larger y means visually
higher on the slate. Detections arriving in image coordinates (y-down)
must be flipped before they reach this module.

The ordering algorithm casts a long scan line through the topmost
unsorted tile, perpendicular to that tile's left edge, gathers every
tile whose center lies within ``tile_height`` of the line, and reads the
gathered tiles along the line's tangent. Repeating until no tiles remain
yields lines of text in visual reading order, including skewed and
upside-down arrangements (an upside-down tile flips its tangent, so its
line reads right to left).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import median
from typing import Iterable, Sequence, Union

from .errors import DuplicateWordIdError, InvalidMarkerError

__all__ = [
    "Point2",
    "Vec2",
    "DetectedMarker",
    "ScanLine",
    "GeometryConfig",
    "OrderedLayout",
    "left_edge_vector",
    "tangent_of",
    "build_scan_line",
    "project_onto_line",
    "line_captures",
    "order_markers",
    "resolve_tile_height",
]

Vec2 = tuple[float, float]


def _require_finite(value: float, what: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidMarkerError(f"{what} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Point2:
    """A point in logical pixels (y-up)."""

    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", _require_finite(self.x, "x"))
        object.__setattr__(self, "y", _require_finite(self.y, "y"))

    def translated(self, dx: float, dy: float) -> "Point2":
        return Point2(self.x + dx, self.y + dy)


@dataclass(frozen=True)
class DetectedMarker:
    """One recognized tile: its center and four corners.

    Corners are ordered [top-left, top-right, bottom-right, bottom-left]
    in the tile's OWN orientation; an upside-down tile's "top-left"
    corner sits at the visual bottom-right.
    """

    word_id: str
    center: Point2
    corners: tuple[Point2, Point2, Point2, Point2]

    def __post_init__(self):
        corners = tuple(self.corners)
        if len(corners) != 4:
            raise InvalidMarkerError(
                f"marker {self.word_id!r} needs exactly 4 corners, got {len(corners)}"
            )
        object.__setattr__(self, "corners", corners)
        if abs(_quad_area(corners)) <= 0.0:
            raise InvalidMarkerError(f"marker {self.word_id!r} has a degenerate corner quad")
        # the reported center must sit inside the corners' bounding circle;
        # a center drifting outside means the detection is inconsistent
        cx = sum(c.x for c in corners) / 4.0
        cy = sum(c.y for c in corners) / 4.0
        radius = max(math.hypot(c.x - cx, c.y - cy) for c in corners)
        if math.hypot(self.center.x - cx, self.center.y - cy) > radius * (1.0 + 1e-9):
            raise InvalidMarkerError(
                f"marker {self.word_id!r} center lies outside its corner bounding circle"
            )

    @property
    def top_left(self) -> Point2:
        return self.corners[0]

    @property
    def bottom_left(self) -> Point2:
        return self.corners[3]


def _quad_area(corners: Sequence[Point2]) -> float:
    # Shoelace formula; sign encodes winding.
    total = 0.0
    for i in range(4):
        a = corners[i]
        b = corners[(i + 1) % 4]
        total += a.x * b.y - b.x * a.y
    return total / 2.0


@dataclass(frozen=True)
class ScanLine:
    """The reading line cast through a seed tile.

    ``start`` and ``end`` sit ``k`` units from the tile center along the
    tangent; ``direction`` is ``end - start`` and ``tangent`` is the unit
    reading direction.
    """

    start: Point2
    end: Point2
    direction: Vec2
    tangent: Vec2


_AUTO = "auto"


@dataclass(frozen=True)
class GeometryConfig:
    """Tuning for the ordering pass.

    ``k`` is the scan-line half-length in logical pixels. ``tile_height``
    is the capture radius of the point-to-line test; "auto" resolves to
    the median left-edge length of the snapshot being ordered.
    """

    k: float = 1000.0
    tile_height: Union[float, str] = _AUTO

    def __post_init__(self):
        if not (isinstance(self.k, (int, float)) and math.isfinite(self.k) and self.k > 0):
            raise ValueError(f"k must be a positive finite number, got {self.k!r}")
        th = self.tile_height
        if isinstance(th, str):
            if th != _AUTO:
                raise ValueError(f'tile_height must be a positive number or "auto", got {th!r}')
        elif not (math.isfinite(th) and th > 0):
            raise ValueError(f"fixed tile_height must be positive and finite, got {th!r}")


@dataclass(frozen=True)
class OrderedLayout:
    """Reading-ordered lines of word_ids; no line is empty."""

    lines: tuple[tuple[str, ...], ...]

    def flattened(self) -> list[str]:
        return [wid for line in self.lines for wid in line]


def left_edge_vector(marker: DetectedMarker) -> Vec2:
    """Vector from the marker's bottom-left corner to its top-left corner."""
    tl, bl = marker.top_left, marker.bottom_left
    edge = (tl.x - bl.x, tl.y - bl.y)
    if math.hypot(*edge) == 0.0:
        raise InvalidMarkerError(f"marker {marker.word_id!r} has a zero-length left edge")
    return edge


def tangent_of(edge: Vec2) -> Vec2:
    """Unit vector perpendicular to ``edge``, rotated -90 degrees.

    In the y-up frame (x, y) -> (y, -x): for an upright tile whose left
    edge points up, the tangent points rightward, the visual reading
    direction. An upside-down tile yields a leftward tangent and hence a
    right-to-left line.
    """
    ex, ey = float(edge[0]), float(edge[1])
    length = math.hypot(ex, ey)
    if length == 0.0:
        raise InvalidMarkerError("cannot take the tangent of a zero vector")
    return (ey / length, -ex / length)


def build_scan_line(marker: DetectedMarker, config: GeometryConfig) -> ScanLine:
    """Cast the reading line through ``marker``'s center.

    start = k * tangent + center, end = -k * tangent + center, so the
    segment spans 2k logical pixels along the tile's reading axis.
    """
    vt = tangent_of(left_edge_vector(marker))
    k = config.k
    c = marker.center
    start = Point2(k * vt[0] + c.x, k * vt[1] + c.y)
    end = Point2(-k * vt[0] + c.x, -k * vt[1] + c.y)
    direction = (end.x - start.x, end.y - start.y)
    return ScanLine(start=start, end=end, direction=direction, tangent=vt)


def project_onto_line(line: ScanLine, p: Point2) -> Point2:
    """Orthogonal projection of ``p`` onto the infinite line through ``line.start``."""
    lx, ly = line.direction
    norm_sq = lx * lx + ly * ly
    if norm_sq == 0.0:
        raise InvalidMarkerError("scan line has zero direction")
    t = ((p.x - line.start.x) * lx + (p.y - line.start.y) * ly) / norm_sq
    return Point2(line.start.x + t * lx, line.start.y + t * ly)


def line_captures(line: ScanLine, marker: DetectedMarker, tile_height: float) -> bool:
    """True when the marker center is strictly closer than ``tile_height`` to the line."""
    p_c = project_onto_line(line, marker.center)
    dist = math.hypot(p_c.x - marker.center.x, p_c.y - marker.center.y)
    return dist < tile_height


def resolve_tile_height(markers: Iterable[DetectedMarker], config: GeometryConfig) -> float:
    """Concrete capture radius for a snapshot: fixed value, or the median left-edge length."""
    if config.tile_height != _AUTO:
        return float(config.tile_height)
    lengths = [math.hypot(*left_edge_vector(m)) for m in markers]
    if not lengths:
        raise ValueError("cannot auto-resolve tile_height for an empty snapshot")
    return float(median(lengths))


def _reading_position(line: ScanLine, p: Point2) -> float:
    """Signed coordinate of ``p`` along the line's tangent, measured from ``line.start``.

    The start point sits k units downstream of the seed, so captured
    markers carry negative positions; sorting ascending walks the line in
    reading order. (Raw euclidean distance from the start point would
    walk it backwards under this tangent orientation.)
    """
    return (p.x - line.start.x) * line.tangent[0] + (p.y - line.start.y) * line.tangent[1]


def order_markers(
    markers: Iterable[DetectedMarker], config: GeometryConfig = GeometryConfig()
) -> OrderedLayout:
    """Group scattered markers into reading-ordered lines of word_ids.

    Repeatedly seeds a scan line from the topmost unsorted marker,
    captures every marker within tile_height of that line (the seed
    always captures itself), orders the captured set along the tangent,
    and appends it as one output line. Ties on the seed's y break toward
    smaller x then word_id; within-line position ties break on word_id.
    A marker grazed by a line that visually belongs to a lower row is
    still consumed; there is no second pass.
    """
    pool = list(markers)
    seen: set[str] = set()
    for m in pool:
        if m.word_id in seen:
            raise DuplicateWordIdError(f"duplicate word_id in snapshot: {m.word_id!r}")
        seen.add(m.word_id)

    if not pool:
        return OrderedLayout(lines=())

    tile_height = resolve_tile_height(pool, config)

    lines: list[tuple[str, ...]] = []
    remaining = pool
    while remaining:
        seed = min(remaining, key=lambda m: (-m.center.y, m.center.x, m.word_id))
        line = build_scan_line(seed, config)
        captured = [m for m in remaining if line_captures(line, m, tile_height)]
        if seed not in captured:  # unreachable while tile_height > 0; keeps the loop total
            captured.append(seed)
        captured.sort(key=lambda m: (_reading_position(line, m.center), m.word_id))
        lines.append(tuple(m.word_id for m in captured))
        taken = {m.word_id for m in captured}
        remaining = [m for m in remaining if m.word_id not in taken]

    return OrderedLayout(lines=tuple(lines))
