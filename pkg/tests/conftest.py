import math

import pytest

from slatepoet.geometry import DetectedMarker, Point2
from slatepoet.vocabulary import default_vocabulary


@pytest.fixture(scope="session")
def vocab():
    return default_vocabulary()


def rotate(point, angle, about=(0.0, 0.0)):
    """Reference rotation (counterclockwise, y-up) used as the independent oracle."""
    px, py = point[0] - about[0], point[1] - about[1]
    c, s = math.cos(angle), math.sin(angle)
    return (about[0] + px * c - py * s, about[1] + px * s + py * c)


def tile(word_id, cx, cy, rotation=0.0, w=60.0, h=20.0):
    """Build a DetectedMarker from scratch with the reference rotation above.

    Deliberately independent of slatepoet.simulate so geometry tests do not
    lean on the code they are checking.
    """
    local = [(-w / 2, h / 2), (w / 2, h / 2), (w / 2, -h / 2), (-w / 2, -h / 2)]
    corners = [rotate(p, rotation, about=(0.0, 0.0)) for p in local]
    corners = [Point2(cx + x, cy + y) for x, y in corners]
    return DetectedMarker(word_id=word_id, center=Point2(cx, cy), corners=tuple(corners))


def rotate_marker_180(marker, about):
    """Point-rotate a whole detection by 180 degrees (corners keep their slots)."""
    flip = lambda p: Point2(2 * about[0] - p.x, 2 * about[1] - p.y)
    return DetectedMarker(
        word_id=marker.word_id,
        center=flip(marker.center),
        corners=tuple(flip(c) for c in marker.corners),
    )


def scene_centroid(markers):
    xs = [m.center.x for m in markers]
    ys = [m.center.y for m in markers]
    return (sum(xs) / len(xs), sum(ys) / len(ys))
