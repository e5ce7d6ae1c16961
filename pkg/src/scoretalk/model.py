"""Musical primitives, grouping trees, and the flat timed-event view.

Scores are plain data: notes and rests whose fields may individually be
absent (``None``), grouped by n-ary sequential (``Seq``) and parallel
(``Par``) containers.  Absent fields make the same types usable both as
concrete score content and as abstract descriptions of score content;
a *concrete* leaf is one with every field filled in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import ModelError, QueryError

# Comparison tolerance for beat-valued quantities.
BEAT_EPS = 1e-9

MIN_OCTAVE = -1
MAX_OCTAVE = 10

PITCH_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")

NOTE = "note"
REST = "rest"


def beats_equal(a: float, b: float) -> bool:
    return abs(a - b) <= BEAT_EPS


def beat_key(value: float) -> float:
    """Bucket a beat value so near-equal floats group and sort together."""
    return round(value, 9)


@dataclass
class Scale:
    """Pitch-class set given as a root plus ascending semitone offsets."""

    root_pitch_class: int
    intervals: tuple[int, ...] = (0, 2, 4, 5, 7, 9, 11)

    def __post_init__(self):
        if not isinstance(self.root_pitch_class, int) or not 0 <= self.root_pitch_class <= 11:
            raise ModelError("scale root must be a pitch class within 0..11")
        self.intervals = tuple(self.intervals)
        if not self.intervals or self.intervals[0] != 0:
            raise ModelError("scale intervals must be non-empty and start at 0")
        if any(b <= a for a, b in zip(self.intervals, self.intervals[1:])):
            raise ModelError("scale intervals must be strictly increasing")
        if any(not 0 <= x < 12 for x in self.intervals):
            raise ModelError("scale intervals must lie within 0..11")

    def pitch_classes(self) -> set[int]:
        return {(self.root_pitch_class + i) % 12 for i in self.intervals}


@dataclass
class Contexts:
    """Labels and environment information attached to a primitive or group."""

    labels: set[str] = field(default_factory=set)
    scale: Scale | None = None
    volume: int | None = None
    extra: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.labels = set(self.labels)
        if any(not tag for tag in self.labels):
            raise ModelError("context labels must be non-empty strings")
        if self.volume is not None and not 0 <= self.volume <= 127:
            raise ModelError("volume must be within 0..127")


@dataclass
class Pitch:
    pitch_class: int | None = None
    octave: int | None = None

    def __post_init__(self):
        if self.pitch_class is not None and not 0 <= self.pitch_class <= 11:
            raise ModelError("pitch class must be within 0..11")
        if self.octave is not None and not MIN_OCTAVE <= self.octave <= MAX_OCTAVE:
            raise ModelError(f"octave must be within {MIN_OCTAVE}..{MAX_OCTAVE}")

    @property
    def is_concrete(self) -> bool:
        return self.pitch_class is not None and self.octave is not None


@dataclass
class ScaleIndex:
    """Position along a scale; the scale itself lives in the contexts."""

    degree: int
    contexts: Contexts = field(default_factory=Contexts)


@dataclass
class Onset:
    measure: int | None = None
    beat: float | None = None

    def __post_init__(self):
        if self.measure is not None and self.measure < 0:
            raise ModelError("measure must be non-negative")
        if self.beat is not None:
            self.beat = float(self.beat)
            if not math.isfinite(self.beat) or self.beat < 0:
                raise ModelError("beat must be finite and non-negative")

    @property
    def is_concrete(self) -> bool:
        return self.measure is not None and self.beat is not None


@dataclass
class Duration:
    beats: float

    def __post_init__(self):
        self.beats = float(self.beats)
        if not math.isfinite(self.beats) or self.beats <= 0:
            raise ModelError("duration must be positive and finite")


@dataclass
class Note:
    pitch: Pitch | None = None
    duration: Duration | None = None
    onset: Onset | None = None
    contexts: Contexts = field(default_factory=Contexts)

    @property
    def is_concrete(self) -> bool:
        return (
            self.pitch is not None
            and self.pitch.is_concrete
            and self.duration is not None
            and self.onset is not None
            and self.onset.is_concrete
        )


@dataclass
class Rest:
    duration: Duration | None = None
    onset: Onset | None = None
    contexts: Contexts = field(default_factory=Contexts)

    @property
    def is_concrete(self) -> bool:
        return self.duration is not None and self.onset is not None and self.onset.is_concrete


@dataclass
class Seq:
    """Children interpreted as consecutive in time."""

    children: list["Music"]
    contexts: Contexts = field(default_factory=Contexts)

    def __post_init__(self):
        self.children = list(self.children)
        if not self.children:
            raise ModelError("group must have at least one child")


@dataclass
class Par:
    """Children interpreted as overlapping in time."""

    children: list["Music"]
    contexts: Contexts = field(default_factory=Contexts)

    def __post_init__(self):
        self.children = list(self.children)
        if not self.children:
            raise ModelError("group must have at least one child")


Music = Union[Note, Rest, Seq, Par]


@dataclass
class ScoreMeta:
    """Per-score conventions: one global meter, a tempo, and the octave
    numbering offset ``k`` used when converting pitches to pitch numbers
    (``k = 1`` makes (C,4) pitch number 60)."""

    beats_per_measure: float = 4.0
    tempo_bpm: float = 120.0
    octave_offset_k: int = 1

    def __post_init__(self):
        self.beats_per_measure = float(self.beats_per_measure)
        self.tempo_bpm = float(self.tempo_bpm)
        if self.beats_per_measure <= 0:
            raise ModelError("beats per measure must be positive")
        if self.tempo_bpm <= 0:
            raise ModelError("tempo must be positive")


@dataclass
class TimedEvent:
    """Flat view of one leaf: absolute beat onset plus duration."""

    kind: str
    onset_beats: float
    duration_beats: float
    pitch_number: int | None = None
    contexts: Contexts = field(default_factory=Contexts)

    def __post_init__(self):
        if self.kind not in (NOTE, REST):
            raise ModelError(f"unknown event kind {self.kind!r}")
        if self.kind == NOTE and self.pitch_number is None:
            raise ModelError("note events carry a pitch number")
        self.onset_beats = float(self.onset_beats)
        self.duration_beats = float(self.duration_beats)
        if self.onset_beats < 0:
            raise ModelError("event onset must be non-negative")
        if self.duration_beats <= 0:
            raise ModelError("event duration must be positive")

    @property
    def end_beats(self) -> float:
        return self.onset_beats + self.duration_beats


def pitch_number(p: Pitch | None, k: int) -> int:
    """Absolute chromatic index of a pitch: class + 12 * (octave + k)."""
    if p is None or not p.is_concrete:
        raise ModelError("incomplete pitch")
    return p.pitch_class + 12 * (p.octave + k)


def pitch_from_number(n: int, k: int) -> Pitch:
    octave, pc = divmod(n, 12)
    octave -= k
    if not MIN_OCTAVE <= octave <= MAX_OCTAVE:
        raise ModelError("pitch out of range")
    return Pitch(pc, octave)


def pitch_label(n: int, k: int) -> str:
    """Display name for a pitch number, e.g. 67 -> 'G4' (sharps by default)."""
    p = pitch_from_number(n, k)
    return f"{PITCH_NAMES[p.pitch_class]}{p.octave}"


def absolute_beat(o: Onset | None, meta: ScoreMeta) -> float:
    """Beats elapsed from the start of the score to an onset."""
    if o is None or not o.is_concrete:
        raise ModelError("incomplete onset")
    return o.measure * meta.beats_per_measure + o.beat


def onset_from_absolute(b: float, meta: ScoreMeta) -> Onset:
    if b < 0:
        raise ModelError("negative time")
    measure = int(b // meta.beats_per_measure)
    beat = b - measure * meta.beats_per_measure
    if meta.beats_per_measure - beat <= BEAT_EPS:
        measure += 1
        beat = 0.0
    elif beat < BEAT_EPS:
        beat = 0.0
    return Onset(measure, beat)


def scale_index_to_pitch(si: ScaleIndex, reference_octave: int, k: int) -> Pitch:
    """Resolve a scale degree to a pitch, wrapping octaves past the scale end."""
    scale = si.contexts.scale
    if scale is None:
        raise ModelError("no scale in context")
    length = len(scale.intervals)
    base = pitch_number(Pitch(scale.root_pitch_class, reference_octave), k)
    n = base + 12 * (si.degree // length) + scale.intervals[si.degree % length]
    return pitch_from_number(n, k)


def iter_nodes(m: Music) -> Iterator[tuple[tuple[int, ...], Music]]:
    """Pre-order traversal yielding (path, node) pairs, root included."""
    stack = [((), m)]
    while stack:
        path, node = stack.pop()
        yield path, node
        if isinstance(node, (Seq, Par)):
            for i in range(len(node.children) - 1, -1, -1):
                stack.append((path + (i,), node.children[i]))


def iter_leaves(m: Music) -> Iterator[tuple[tuple[int, ...], Note | Rest]]:
    for path, node in iter_nodes(m):
        if isinstance(node, (Note, Rest)):
            yield path, node


def node_at(m: Music, path: tuple[int, ...]) -> Music:
    node = m
    for idx in path:
        if not isinstance(node, (Seq, Par)) or not 0 <= idx < len(node.children):
            raise QueryError("invalid path")
        node = node.children[idx]
    return node


def leaf_event(leaf: Note | Rest, meta: ScoreMeta) -> TimedEvent:
    """Flat event for one concrete leaf."""
    if isinstance(leaf, Note):
        if not leaf.is_concrete:
            raise ModelError("abstract leaf in concrete score")
        return TimedEvent(
            NOTE,
            absolute_beat(leaf.onset, meta),
            leaf.duration.beats,
            pitch_number(leaf.pitch, meta.octave_offset_k),
            leaf.contexts,
        )
    if isinstance(leaf, Rest):
        if not leaf.is_concrete:
            raise ModelError("abstract leaf in concrete score")
        return TimedEvent(REST, absolute_beat(leaf.onset, meta), leaf.duration.beats, None, leaf.contexts)
    raise ModelError("not a leaf")


def flatten(m: Music, meta: ScoreMeta) -> list[TimedEvent]:
    """All leaves as timed events, ordered by onset, then rests before
    notes, then ascending pitch number, then tree order."""
    events = [leaf_event(leaf, meta) for _, leaf in iter_leaves(m)]
    events.sort(
        key=lambda e: (
            beat_key(e.onset_beats),
            0 if e.kind == REST else 1,
            e.pitch_number if e.pitch_number is not None else -1,
        )
    )
    return events
