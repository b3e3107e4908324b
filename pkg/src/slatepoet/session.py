"""Slate session state: snapshot diffing, settle detection, mode resolution.

A session consumes a stream of timestamped detection snapshots. Any real
change (tile added, removed, or moved beyond jitter thresholds) restarts
the settle timer; once the slate has been still for ``settle_ms`` and
holds at least one word tile, a submission fires with the poem text in
reading order. Mode markers select the response mode and are excluded
from the poem; the most recently placed marker wins, and the mode
persists after its marker is removed. Before any marker is ever placed
the mode defaults to collaborate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

from .errors import EmptyPoemError
from .geometry import DetectedMarker, GeometryConfig, order_markers
from .vocabulary import Mode, Vocabulary, layout_to_text

__all__ = [
    "SlateSnapshot",
    "ChangeSet",
    "SubmitEvent",
    "Submission",
    "SessionState",
    "SettleTracker",
    "diff_snapshots",
    "settle",
    "resolve_mode",
    "compose_submission",
    "SessionEngine",
    "DEFAULT_SETTLE_MS",
    "DEFAULT_MOVE_EPSILON",
]

DEFAULT_SETTLE_MS = 3000
DEFAULT_MOVE_EPSILON = 4.0  # logical pixels of center jitter to ignore
_ORIENT_DEG = 5.0  # orientation change counted as movement, in degrees
_ORIENT_CHORD = 2.0 * math.sin(math.radians(_ORIENT_DEG) / 2.0)


@dataclass(frozen=True)
class SlateSnapshot:
    """Detections on the slate at one instant (timestamps in ms, non-decreasing per stream)."""

    timestamp_ms: int
    detections: tuple[DetectedMarker, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "detections", tuple(self.detections))

    def by_id(self) -> dict[str, DetectedMarker]:
        return {m.word_id: m for m in self.detections}


@dataclass(frozen=True)
class ChangeSet:
    added: tuple[str, ...] = ()
    removed: tuple[str, ...] = ()
    moved: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.added or self.removed or self.moved)


def _marker_moved(a: DetectedMarker, b: DetectedMarker, epsilon: float) -> bool:
    if math.hypot(b.center.x - a.center.x, b.center.y - a.center.y) > epsilon:
        return True
    # Orientation: compare corners relative to the center; a rotation by
    # more than _ORIENT_DEG displaces a corner at radius r by > r * chord.
    for ca, cb in zip(a.corners, b.corners):
        rax, ray = ca.x - a.center.x, ca.y - a.center.y
        rbx, rby = cb.x - b.center.x, cb.y - b.center.y
        radius = math.hypot(rax, ray)
        if math.hypot(rbx - rax, rby - ray) > radius * _ORIENT_CHORD:
            return True
    return False


def diff_snapshots(a: SlateSnapshot, b: SlateSnapshot, epsilon: float = DEFAULT_MOVE_EPSILON) -> ChangeSet:
    """What changed between two snapshots, ignoring sub-epsilon jitter."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    before, after = a.by_id(), b.by_id()
    added = tuple(sorted(set(after) - set(before)))
    removed = tuple(sorted(set(before) - set(after)))
    moved = tuple(
        sorted(
            wid
            for wid in set(before) & set(after)
            if _marker_moved(before[wid], after[wid], epsilon)
        )
    )
    return ChangeSet(added=added, removed=removed, moved=moved)


@dataclass(frozen=True)
class SubmitEvent:
    """The slate settled: fire a submission using the snapshot as it stood."""

    timestamp_ms: int
    snapshot: SlateSnapshot


class SettleTracker:
    """Settle timer over a snapshot stream.

    ``observe`` feeds a snapshot (resetting the deadline on any real
    change); ``poll`` fires at most one SubmitEvent per quiescent period
    once the deadline passes. Slates failing ``submit_check`` (empty by
    default) never fire.
    """

    def __init__(
        self,
        settle_ms: int = DEFAULT_SETTLE_MS,
        epsilon: float = DEFAULT_MOVE_EPSILON,
        submit_check: Callable[[SlateSnapshot], bool] | None = None,
    ):
        if settle_ms <= 0:
            raise ValueError("settle_ms must be > 0")
        self.settle_ms = int(settle_ms)
        self.epsilon = epsilon
        self._submit_check = submit_check or (lambda snap: bool(snap.detections))
        self._current = SlateSnapshot(timestamp_ms=0, detections=())
        self._seen_any = False
        self.deadline_ms: int | None = None

    @property
    def current(self) -> SlateSnapshot:
        return self._current

    def observe(self, snapshot: SlateSnapshot) -> ChangeSet:
        if self._seen_any and snapshot.timestamp_ms < self._current.timestamp_ms:
            raise ValueError(
                f"snapshot timestamps must be non-decreasing "
                f"({snapshot.timestamp_ms} after {self._current.timestamp_ms})"
            )
        changes = diff_snapshots(self._current, snapshot, self.epsilon)
        self._current = snapshot
        self._seen_any = True
        if changes:
            self.deadline_ms = snapshot.timestamp_ms + self.settle_ms
        return changes

    def poll(self, now_ms: int) -> SubmitEvent | None:
        if self.deadline_ms is None or now_ms < self.deadline_ms:
            return None
        deadline = self.deadline_ms
        self.deadline_ms = None
        if not self._submit_check(self._current):
            return None
        return SubmitEvent(timestamp_ms=deadline, snapshot=self._current)


def settle(
    snapshots: Iterable[SlateSnapshot],
    settle_ms: int = DEFAULT_SETTLE_MS,
    epsilon: float = DEFAULT_MOVE_EPSILON,
    end_time_ms: int | None = None,
    submit_check: Callable[[SlateSnapshot], bool] | None = None,
) -> list[SubmitEvent]:
    """Run a finite snapshot stream through the settle timer.

    With ``end_time_ms`` unset the clock runs past the final snapshot
    until any pending deadline fires (the stream ending means stillness).
    """
    tracker = SettleTracker(settle_ms=settle_ms, epsilon=epsilon, submit_check=submit_check)
    events = []
    for snap in snapshots:
        # fire only deadlines strictly before this arrival: a change landing at
        # the exact deadline preempts the submission instead of racing it
        fired = tracker.poll(snap.timestamp_ms - 1)
        if fired is not None:
            events.append(fired)
        tracker.observe(snap)
    horizon = end_time_ms if end_time_ms is not None else (tracker.deadline_ms or 0)
    fired = tracker.poll(horizon)
    if fired is not None:
        events.append(fired)
    return events


@dataclass
class SessionState:
    """Mutable per-session view consumed by resolve_mode and the service."""

    current: SlateSnapshot = field(default_factory=lambda: SlateSnapshot(0, ()))
    active_mode: Mode | None = None
    marker_placed_at: dict[str, int] = field(default_factory=dict)
    settle_deadline_ms: int | None = None
    last_submission: "Submission | None" = None
    chain_in_flight: bool = False


def resolve_mode(snapshot: SlateSnapshot, state: SessionState, vocabulary: Vocabulary) -> Mode:
    """Active mode for a snapshot: present marker (most recently placed wins),
    else the persisted mode, else collaborate."""
    present = [
        (m.word_id, vocabulary.mode_of(m.word_id))
        for m in snapshot.detections
        if vocabulary.mode_of(m.word_id) is not None
    ]
    if present:
        # Latest placement wins; word_id breaks exact timestamp ties.
        def placed(entry):
            wid, _ = entry
            return (state.marker_placed_at.get(wid, snapshot.timestamp_ms), wid)

        _, mode = max(present, key=placed)
        assert mode is not None
        return mode
    if state.active_mode is not None:
        return state.active_mode
    return Mode.COLLABORATE


@dataclass(frozen=True)
class Submission:
    """One settled poem ready for the prompt chain."""

    poem_text: str
    mode: Mode
    word_ids: tuple[str, ...]
    timestamp_ms: int = 0


def compose_submission(
    snapshot: SlateSnapshot,
    vocabulary: Vocabulary,
    config: GeometryConfig = GeometryConfig(),
    state: SessionState | None = None,
) -> Submission:
    """Order the slate's word tiles into poem text; mode markers are excluded
    from the text but steer the mode."""
    state = state if state is not None else SessionState()
    word_markers = [m for m in snapshot.detections if vocabulary.mode_of(m.word_id) is None]
    if not word_markers:
        raise EmptyPoemError("slate holds no word tiles")
    layout = order_markers(word_markers, config)
    poem = layout_to_text(layout, vocabulary)
    mode = resolve_mode(snapshot, state, vocabulary)
    return Submission(
        poem_text=poem,
        mode=mode,
        word_ids=tuple(layout.flattened()),
        timestamp_ms=snapshot.timestamp_ms,
    )


class SessionEngine:
    """Single-owner session: feed snapshots in, poll submissions out.

    All mutation must come from one logical owner (the service funnels
    every request through one lock); reads of the exposed state are safe
    from elsewhere.
    """

    def __init__(
        self,
        vocabulary: Vocabulary,
        geometry: GeometryConfig = GeometryConfig(),
        settle_ms: int = DEFAULT_SETTLE_MS,
        epsilon: float = DEFAULT_MOVE_EPSILON,
    ):
        self.vocabulary = vocabulary
        self.geometry = geometry
        self.state = SessionState()
        self._tracker = SettleTracker(
            settle_ms=settle_ms, epsilon=epsilon, submit_check=self._has_word_tiles
        )

    def _has_word_tiles(self, snapshot: SlateSnapshot) -> bool:
        return any(self.vocabulary.mode_of(m.word_id) is None for m in snapshot.detections)

    @property
    def settle_ms(self) -> int:
        return self._tracker.settle_ms

    def validate_snapshot(self, snapshot: SlateSnapshot) -> None:
        for m in snapshot.detections:
            self.vocabulary[m.word_id]  # raises UnknownWordError

    def ingest(self, snapshot: SlateSnapshot) -> ChangeSet:
        """Accept a snapshot: update placement times, mode, and the settle timer."""
        self.validate_snapshot(snapshot)
        changes = self._tracker.observe(snapshot)
        for wid in changes.added:
            if self.vocabulary.mode_of(wid) is not None:
                self.state.marker_placed_at[wid] = snapshot.timestamp_ms
        for wid in changes.removed:
            self.state.marker_placed_at.pop(wid, None)
        self.state.current = snapshot
        self.state.active_mode = resolve_mode(snapshot, self.state, self.vocabulary)
        self.state.settle_deadline_ms = self._tracker.deadline_ms
        return changes

    def poll(self, now_ms: int) -> Submission | None:
        """Fire the pending submission if the slate has settled by ``now_ms``."""
        event = self._tracker.poll(now_ms)
        self.state.settle_deadline_ms = self._tracker.deadline_ms
        if event is None:
            return None
        submission = compose_submission(event.snapshot, self.vocabulary, self.geometry, self.state)
        submission = replace(submission, timestamp_ms=event.timestamp_ms)
        self.state.last_submission = submission
        return submission

    def preview_tokens(self) -> list[str]:
        """Current reading order of the slate's word tiles, as display texts."""
        word_markers = [
            m for m in self.state.current.detections if self.vocabulary.mode_of(m.word_id) is None
        ]
        if not word_markers:
            return []
        layout = order_markers(word_markers, self.geometry)
        return [self.vocabulary[wid].text for wid in layout.flattened()]

    def active_mode(self) -> Mode:
        return self.state.active_mode or Mode.COLLABORATE
