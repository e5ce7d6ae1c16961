"""Shared fixtures, generators, and independent oracles for the suite."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from scoretalk import model, normalform
from scoretalk.model import (
    BEAT_EPS,
    NOTE,
    REST,
    Music,
    Note,
    Par,
    ScoreMeta,
    Seq,
    TimedEvent,
    beat_key,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

TWINKLE_PITCHES = [60, 60, 67, 67, 69, 69, 67]
DEMO_PITCHES = [60, 62, 64, 65, 72, 71, 69, 67]  # m0: C D E F, m1: C5 B A G


def quarter_notes(pitch_numbers, start=0.0, duration=1.0) -> list[TimedEvent]:
    return [
        TimedEvent(NOTE, start + i * duration, duration, pn)
        for i, pn in enumerate(pitch_numbers)
    ]


def event_triples(events, notes_only=True):
    """(onset, pitch, duration) multiset key for comparisons."""
    out = []
    for e in events:
        if notes_only and e.kind != NOTE:
            continue
        out.append((beat_key(e.onset_beats), e.pitch_number, beat_key(e.duration_beats)))
    return sorted(out)


@pytest.fixture
def meta() -> ScoreMeta:
    return ScoreMeta()


@pytest.fixture
def twinkle(meta) -> Music:
    return normalform.normalize(quarter_notes(TWINKLE_PITCHES), meta)


@pytest.fixture
def demo_melody(meta) -> Music:
    return normalform.normalize(quarter_notes(DEMO_PITCHES), meta)


def random_events(rng: random.Random, max_events: int = 40, max_cells: int = 80) -> list[TimedEvent]:
    """Random note events on a quarter-beat grid with distinct
    (onset, pitch, duration) triples."""
    wanted = rng.randint(1, max_events)
    seen = set()
    events = []
    while len(events) < wanted:
        onset = rng.randrange(0, max_cells) * 0.25
        duration = rng.randrange(1, 17) * 0.25
        pn = rng.randint(36, 84)
        key = (beat_key(onset), pn, beat_key(duration))
        if key in seen:
            wanted -= 1
            continue
        seen.add(key)
        events.append(TimedEvent(NOTE, onset, duration, pn))
    if not events:
        events.append(TimedEvent(NOTE, 0.0, 1.0, 60))
    return events


def subtree_span(node: Music, meta: ScoreMeta) -> tuple[float, float]:
    events = [model.leaf_event(leaf, meta) for _, leaf in model.iter_leaves(node)]
    return min(e.onset_beats for e in events), max(e.end_beats for e in events)


def assert_normal_form(tree: Music, meta: ScoreMeta):
    """Structural invariants of canonical trees: no singleton groups,
    chord groups are uniform, parallel children overlap pairwise, and
    sequence children are exactly adjacent in increasing onset order."""
    for _, node in model.iter_nodes(tree):
        if isinstance(node, (Seq, Par)):
            assert len(node.children) >= 2, "singleton group survived"
        if isinstance(node, Par):
            spans = [subtree_span(child, meta) for child in node.children]
            cells = {(beat_key(s), beat_key(e)) for s, e in spans}
            if all(isinstance(child, Note) for child in node.children) and len(cells) == 1:
                continue  # a chord: uniform onset and duration
            for i in range(len(spans)):
                for j in range(i + 1, len(spans)):
                    (s1, e1), (s2, e2) = spans[i], spans[j]
                    assert s1 < e2 - BEAT_EPS and s2 < e1 - BEAT_EPS, "sequenceable parallel children"
            leaf_cells = [
                (beat_key(s), beat_key(e))
                for (s, e), child in zip(spans, node.children)
                if isinstance(child, Note)
            ]
            assert len(leaf_cells) == len(set(leaf_cells)), "chord notes left ungrouped"
        if isinstance(node, Seq):
            spans = [subtree_span(child, meta) for child in node.children]
            for (s1, e1), (s2, _) in zip(spans, spans[1:]):
                assert s2 > s1 + BEAT_EPS, "sequence onsets not strictly increasing"
                assert abs(e1 - s2) <= BEAT_EPS, "sequence children not adjacent"


def merged_rest_coverage(tree: Music, meta: ScoreMeta):
    spans = [
        (e.onset_beats, e.end_beats)
        for e in model.flatten(tree, meta)
        if e.kind == REST
    ]
    return normalform.merge_spans(spans)
