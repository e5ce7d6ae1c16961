"""Canonical score trees from flat event lists.

The tree shape for a given set of note events is fixed by four greedy
passes: notes sharing an exact onset and duration fuse into parallel
chords; exactly adjacent structures chain into sequences; remaining
sequenceable structures join into rest-filled sequences; anything still
overlapping lands under one top-level parallel group.

Rests are structural.  Plain normalization derives them purely from the
gaps between note structures, making the normal form a function of the
note multiset alone.  ``rebuild`` additionally accepts explicit rest
spans (used by editing operations that must keep vacated time audible);
spans covered by sounding notes are discarded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import model
from .errors import ModelError
from .model import BEAT_EPS, NOTE, Music, Note, Par, Rest, ScoreMeta, Seq, TimedEvent, beat_key

Span = tuple[float, float]


def note_from_event(e: TimedEvent, meta: ScoreMeta) -> Note:
    return Note(
        model.pitch_from_number(e.pitch_number, meta.octave_offset_k),
        model.Duration(e.duration_beats),
        model.onset_from_absolute(e.onset_beats, meta),
        e.contexts,
    )


def rest_from_span(start: float, end: float, meta: ScoreMeta) -> Rest:
    return Rest(model.Duration(end - start), model.onset_from_absolute(start, meta))


def merge_spans(spans: Iterable[Span]) -> list[Span]:
    """Union of spans: sorted, with touching or overlapping spans fused."""
    out: list[Span] = []
    for start, end in sorted(spans):
        if end - start <= BEAT_EPS:
            continue
        if out and start - out[-1][1] <= BEAT_EPS:
            out[-1] = (out[-1][0], max(out[-1][1], end))
        else:
            out.append((start, end))
    return out


def subtract_spans(spans: Iterable[Span], holes: Iterable[Span]) -> list[Span]:
    """Parts of ``spans`` not covered by ``holes``; slivers below tolerance drop."""
    holes = merge_spans(holes)
    out: list[Span] = []
    for start, end in merge_spans(spans):
        cursor = start
        for h_start, h_end in holes:
            if h_end <= cursor or h_start >= end:
                continue
            if h_start - cursor > BEAT_EPS:
                out.append((cursor, h_start))
            cursor = max(cursor, h_end)
        if end - cursor > BEAT_EPS:
            out.append((cursor, end))
    return out


@dataclass
class _Struct:
    start: float
    end: float
    low: int  # lowest pitch number inside; -1 for rests
    node: Music


def _chord_structs(note_events: Sequence[TimedEvent], meta: ScoreMeta) -> list[_Struct]:
    """First pass: fuse notes sharing exact onset and duration into chords."""
    ordered = sorted(
        note_events,
        key=lambda e: (beat_key(e.onset_beats), e.pitch_number, beat_key(e.duration_beats)),
    )
    cells: dict[tuple[float, float], list[TimedEvent]] = {}
    for e in ordered:
        cells.setdefault((beat_key(e.onset_beats), beat_key(e.duration_beats)), []).append(e)
    structs = []
    for group in cells.values():
        notes = [note_from_event(e, meta) for e in group]
        node: Music = notes[0] if len(notes) == 1 else Par(notes)
        first = group[0]
        structs.append(_Struct(first.onset_beats, first.end_beats, first.pitch_number, node))
    return structs


def _chain_adjacent(structs: list[_Struct]) -> list[_Struct]:
    """Second pass: chain exactly adjacent structures into sequences.

    The chain seed is always the earliest-starting unconsumed structure
    (ties broken by lowest pitch), and each extension picks the adjacent
    candidate with the lowest pitch, so the output is deterministic.
    """
    pending = sorted(structs, key=lambda s: (beat_key(s.start), s.low, beat_key(s.end)))
    chains = []
    while pending:
        parts = [pending.pop(0)]
        end = parts[-1].end
        while True:
            adjacent = [s for s in pending if abs(s.start - end) <= BEAT_EPS]
            if not adjacent:
                break
            pick = min(adjacent, key=lambda s: (s.low, beat_key(s.end)))
            pending.remove(pick)
            parts.append(pick)
            end = pick.end
        node = parts[0].node if len(parts) == 1 else Seq([p.node for p in parts])
        chains.append(_Struct(parts[0].start, end, min(p.low for p in parts), node))
    return chains


def _fill_sequences(chains: list[_Struct], meta: ScoreMeta) -> list[_Struct]:
    """Third pass: join non-overlapping structures, filling gaps with rests."""
    pending = sorted(chains, key=lambda s: (beat_key(s.start), s.low, beat_key(s.end)))
    groups = []
    while pending:
        seed = pending.pop(0)
        members: list[Music] = [seed.node]
        start, end, low = seed.start, seed.end, seed.low
        while True:
            eligible = [s for s in pending if s.start >= end - BEAT_EPS]
            if not eligible:
                break
            pick = min(eligible, key=lambda s: (beat_key(s.start), s.low))
            pending.remove(pick)
            if pick.start - end > BEAT_EPS:
                members.append(rest_from_span(end, pick.start, meta))
            members.append(pick.node)
            end = pick.end
            low = min(low, pick.low)
        node = members[0] if len(members) == 1 else Seq(members)
        groups.append(_Struct(start, end, low, node))
    return groups


def rebuild(note_events: Sequence[TimedEvent], rest_spans: Iterable[Span], meta: ScoreMeta) -> Music:
    """Build the canonical tree for a set of note events plus explicit
    rest spans (already reduced to the time the caller wants held)."""
    notes = [e for e in note_events if e.kind == NOTE]
    if not notes:
        raise ModelError("cannot build a score from zero note events")
    structs = _chord_structs(notes, meta)
    for start, end in merge_spans(rest_spans):
        structs.append(_Struct(start, end, -1, rest_from_span(start, end, meta)))
    groups = _fill_sequences(_chain_adjacent(structs), meta)
    if len(groups) == 1:
        return groups[0].node
    return Par([g.node for g in groups])


def normalize(events: Sequence[TimedEvent], meta: ScoreMeta) -> Music:
    """Canonical tree for a flat event list; any incoming rests are dropped
    and re-derived from the gaps between note structures."""
    return rebuild(events, [], meta)


def renormalize(m: Music, meta: ScoreMeta) -> Music:
    """Re-establish the canonical shape of an existing tree."""
    return normalize(model.flatten(m, meta), meta)
