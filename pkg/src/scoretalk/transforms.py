"""Edit operations over selections.

Pitch-only operations (transposition, inversion, scale-step motion)
rewrite pitches in place and leave the tree shape alone, so existing
selections stay valid.  Time-changing operations (retrograde and the two
deletion flavors) work on the flat event view and rebuild the tree, with
explicit rest spans carried through so vacated time stays audible.

Every operation is all-or-nothing: it validates the whole edit before
touching the score, and raises ``TransformError`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import model, normalform
from .errors import ModelError, TransformError
from .model import (
    BEAT_EPS,
    NOTE,
    Music,
    Note,
    Pitch,
    Rest,
    ScoreMeta,
    Seq,
    TimedEvent,
    beat_key,
)
from .query import Selection

OPERATION_KINDS = (
    "transpose",
    "transposeDiatonic",
    "invert",
    "invertAt",
    "retrograde",
    "deleteAsRest",
    "deleteAndShift",
)


@dataclass
class OperationDescriptor:
    """What to do to a selection, as produced by command translation."""

    kind: str
    semitones: int | None = None
    degrees: int | None = None
    axis_pitch: Pitch | None = None

    def __post_init__(self):
        if self.kind not in OPERATION_KINDS:
            raise TransformError(f"unknown operation {self.kind!r}")


@dataclass
class EditResult:
    """Outcome of one edit: the resulting tree, the post-edit events of
    the notes that changed, and whether tree paths were invalidated."""

    score: Music
    changed: list[TimedEvent] = field(default_factory=list)
    structural: bool = False


def descriptor_to_json(desc: OperationDescriptor) -> dict:
    out: dict = {"kind": desc.kind}
    if desc.semitones is not None:
        out["semitones"] = desc.semitones
    if desc.degrees is not None:
        out["degrees"] = desc.degrees
    if desc.axis_pitch is not None:
        out["axis"] = {"pc": desc.axis_pitch.pitch_class, "oct": desc.axis_pitch.octave}
    return out


def descriptor_from_json(obj: dict) -> OperationDescriptor:
    axis = obj.get("axis")
    return OperationDescriptor(
        obj.get("kind", ""),
        semitones=obj.get("semitones"),
        degrees=obj.get("degrees"),
        axis_pitch=Pitch(axis["pc"], axis["oct"]) if axis else None,
    )


def _selected_notes(sel: Selection, score: Music) -> list[tuple[tuple[int, ...], Note]]:
    leaves = [(path, model.node_at(score, path)) for path in sel.hits]
    notes = [(path, leaf) for path, leaf in leaves if isinstance(leaf, Note)]
    if not notes:
        raise TransformError("nothing selected")
    return notes


def _note_event(leaf: Note, meta: ScoreMeta) -> TimedEvent:
    return model.leaf_event(leaf, meta)


def _set_pitches(notes, new_numbers, meta) -> list[TimedEvent]:
    """Validate then apply a full pitch assignment; returns changed events."""
    k = meta.octave_offset_k
    pitches = []
    for n in new_numbers:
        try:
            pitches.append(model.pitch_from_number(n, k))
        except ModelError:
            raise TransformError("pitch out of range") from None
    for (_, leaf), pitch in zip(notes, pitches):
        leaf.pitch = pitch
    return [_note_event(leaf, meta) for _, leaf in notes]


def transpose(semitones: int, sel: Selection, score: Music, meta: ScoreMeta) -> EditResult:
    """Shift every selected note by a signed number of half steps."""
    notes = _selected_notes(sel, score)
    k = meta.octave_offset_k
    changed = _set_pitches(notes, [model.pitch_number(n.pitch, k) + semitones for _, n in notes], meta)
    return EditResult(score, changed)


def invert_at(axis: Pitch, sel: Selection, score: Music, meta: ScoreMeta) -> EditResult:
    """Reflect every selected note's pitch number around an axis pitch."""
    if axis is None or not axis.is_concrete:
        raise TransformError("axis pitch must be concrete")
    notes = _selected_notes(sel, score)
    k = meta.octave_offset_k
    center = 2 * model.pitch_number(axis, k)
    changed = _set_pitches(notes, [center - model.pitch_number(n.pitch, k) for _, n in notes], meta)
    return EditResult(score, changed)


def first_pitch(sel: Selection, score: Music, meta: ScoreMeta) -> Pitch:
    """Pitch of the earliest selected note (ties: lowest pitch, then
    document order)."""
    notes = _selected_notes(sel, score)
    k = meta.octave_offset_k

    def order(item):
        _, leaf = item
        return (beat_key(model.absolute_beat(leaf.onset, meta)), model.pitch_number(leaf.pitch, k))

    _, earliest = min(notes, key=order)
    return Pitch(earliest.pitch.pitch_class, earliest.pitch.octave)


def invert(sel: Selection, score: Music, meta: ScoreMeta) -> EditResult:
    """Reflect selected pitches around the selection's first pitch."""
    return invert_at(first_pitch(sel, score, meta), sel, score, meta)


def transpose_diatonic(degrees: int, sel: Selection, score: Music, meta: ScoreMeta) -> EditResult:
    """Move every selected note along the scale in its context."""
    notes = _selected_notes(sel, score)
    k = meta.octave_offset_k
    targets = []
    for _, leaf in notes:
        scale = leaf.contexts.scale
        if scale is None:
            raise TransformError("no tonal context")
        pn = model.pitch_number(leaf.pitch, k)
        rel = (pn - scale.root_pitch_class) % 12
        if rel not in scale.intervals:
            raise TransformError("note not in scale")
        length = len(scale.intervals)
        step = scale.intervals.index(rel)
        octaves = (pn - scale.root_pitch_class - rel) // 12
        position = octaves * length + step + degrees
        targets.append(
            scale.root_pitch_class + scale.intervals[position % length] + 12 * (position // length)
        )
    changed = _set_pitches(notes, targets, meta)
    return EditResult(score, changed)


def _leaf_records(score: Music, meta: ScoreMeta):
    """(path, leaf, event) for every leaf, in document order."""
    return [(path, leaf, model.leaf_event(leaf, meta)) for path, leaf in model.iter_leaves(score)]


def retrograde(sel: Selection, score: Music, meta: ScoreMeta) -> EditResult:
    """Mirror the selected notes in time within their overall span.

    Structural rests are recomputed from the mirrored note layout, so a
    reversed gap comes back as a gap in the mirrored position.
    """
    selected_paths = set(p for p, _ in _selected_notes(sel, score))
    records = _leaf_records(score, meta)
    span_start = min(e.onset_beats for p, _, e in records if p in selected_paths)
    span_end = max(e.end_beats for p, _, e in records if p in selected_paths)

    note_events: list[TimedEvent] = []
    moved: list[TimedEvent] = []
    kept: list[TimedEvent] = []
    for path, leaf, event in records:
        if isinstance(leaf, Rest):
            continue
        if path in selected_paths:
            onset = span_start + span_end - event.end_beats
            new = TimedEvent(NOTE, onset, event.duration_beats, event.pitch_number, event.contexts)
            moved.append(new)
            note_events.append(new)
        else:
            kept.append(event)
            note_events.append(event)
    for new in moved:
        for other in kept:
            if (
                abs(new.onset_beats - other.onset_beats) <= BEAT_EPS
                and new.pitch_number == other.pitch_number
                and abs(new.duration_beats - other.duration_beats) <= BEAT_EPS
            ):
                raise TransformError("retrograde collision")
    new_score = normalform.rebuild(note_events, [], meta)
    return EditResult(new_score, moved, structural=True)


def _chain_of(score: Music, leaf_path: tuple[int, ...]) -> tuple[int, ...]:
    """Path of the innermost sequential group containing a leaf; the root
    path when the leaf sits under no sequence."""
    node = score
    chain: tuple[int, ...] = ()
    for depth, idx in enumerate(leaf_path):
        if isinstance(node, Seq):
            chain = leaf_path[:depth]
        node = node.children[idx]
    return chain


def _in_scope(scope: tuple[int, ...], leaf_path: tuple[int, ...]) -> bool:
    """Whether a leaf lies inside the subtree rooted at the scope path."""
    return leaf_path[: len(scope)] == scope


def _delete_plan(sel: Selection, score: Music, meta: ScoreMeta):
    selected_paths = set(p for p, _ in _selected_notes(sel, score))
    records = _leaf_records(score, meta)
    remaining = [r for r in records if r[0] not in selected_paths]
    if not any(isinstance(leaf, Note) for _, leaf, _ in remaining):
        raise TransformError("empty score not allowed")
    deleted = [r for r in records if r[0] in selected_paths]
    return records, remaining, deleted


def _vacated_by_scope(score, remaining, deleted):
    """Per affected chain (keyed by the innermost sequence's path), the
    time the deletion actually frees: the union of the deleted spans minus
    whatever the chain's surviving notes still cover (a removed chord
    member whose sibling keeps sounding frees nothing)."""
    deleted_spans: dict[tuple[int, ...], list] = {}
    for path, _, event in deleted:
        deleted_spans.setdefault(_chain_of(score, path), []).append((event.onset_beats, event.end_beats))
    vacated = {}
    for scope, spans in deleted_spans.items():
        kept = [
            (e.onset_beats, e.end_beats)
            for path, leaf, e in remaining
            if isinstance(leaf, Note) and _in_scope(scope, path)
        ]
        vacated[scope] = normalform.subtract_spans(spans, kept)
    return vacated


def delete_as_rest(sel: Selection, score: Music, meta: ScoreMeta) -> EditResult:
    """Remove the selected notes, keeping their freed time as rests."""
    _, remaining, deleted = _delete_plan(sel, score, meta)
    rest_spans = [(e.onset_beats, e.end_beats) for _, leaf, e in remaining if isinstance(leaf, Rest)]
    for spans in _vacated_by_scope(score, remaining, deleted).values():
        rest_spans.extend(spans)
    notes = [e for _, leaf, e in remaining if isinstance(leaf, Note)]
    new_score = normalform.rebuild(notes, rest_spans, meta)
    return EditResult(new_score, [], structural=True)


def delete_and_shift(sel: Selection, score: Music, meta: ScoreMeta) -> EditResult:
    """Remove the selected notes and close the freed gaps by moving the
    rest of the affected sequential chain earlier."""
    _, remaining, deleted = _delete_plan(sel, score, meta)
    vacated = _vacated_by_scope(score, remaining, deleted)

    def shifted_onset(path, event) -> float:
        shift = 0.0
        for scope, spans in vacated.items():
            if not _in_scope(scope, path):
                continue
            shift += sum(end - start for start, end in spans if end <= event.onset_beats + BEAT_EPS)
        return event.onset_beats - shift

    notes = []
    rest_spans = []
    for path, leaf, event in remaining:
        onset = shifted_onset(path, event)
        if isinstance(leaf, Rest):
            rest_spans.append((onset, onset + event.duration_beats))
        else:
            notes.append(TimedEvent(NOTE, onset, event.duration_beats, event.pitch_number, event.contexts))
    new_score = normalform.rebuild(notes, rest_spans, meta)
    return EditResult(new_score, [], structural=True)


def apply_operation(desc: OperationDescriptor, sel: Selection, score: Music, meta: ScoreMeta) -> EditResult:
    """Dispatch a descriptor to its operation, all-or-nothing."""
    if desc.kind == "transpose":
        if desc.semitones is None:
            raise TransformError("transpose needs a semitone count")
        return transpose(desc.semitones, sel, score, meta)
    if desc.kind == "transposeDiatonic":
        if desc.degrees is None:
            raise TransformError("diatonic transposition needs a degree count")
        return transpose_diatonic(desc.degrees, sel, score, meta)
    if desc.kind == "invert":
        return invert(sel, score, meta)
    if desc.kind == "invertAt":
        return invert_at(desc.axis_pitch, sel, score, meta)
    if desc.kind == "retrograde":
        return retrograde(sel, score, meta)
    if desc.kind == "deleteAsRest":
        return delete_as_rest(sel, score, meta)
    return delete_and_shift(sel, score, meta)
