"""Canonical tree construction: grouping passes and round-trip laws."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from scoretalk import model, normalform
from scoretalk.errors import ModelError
from scoretalk.model import NOTE, Note, Par, Rest, Seq, TimedEvent

from conftest import assert_normal_form, event_triples, quarter_notes, random_events

grid_events = st.lists(
    st.tuples(st.integers(0, 63), st.integers(1, 16), st.integers(36, 84)).map(
        lambda t: TimedEvent(NOTE, t[0] * 0.25, t[1] * 0.25, t[2])
    ),
    min_size=1,
    max_size=20,
)


def ev(onset, dur, pn):
    return TimedEvent(NOTE, onset, dur, pn)


class TestGroupingShapes:
    def test_chord(self, meta):
        tree = normalform.normalize([ev(0.0, 1.0, 60), ev(0.0, 1.0, 64)], meta)
        assert isinstance(tree, Par)
        assert [n.pitch.pitch_class for n in tree.children] == [0, 4]

    def test_adjacent_chain(self, meta):
        tree = normalform.normalize([ev(0.0, 1.0, 60), ev(1.0, 1.0, 62), ev(2.0, 1.0, 64)], meta)
        assert isinstance(tree, Seq)
        assert len(tree.children) == 3
        assert all(isinstance(c, Note) for c in tree.children)

    def test_gap_filled_with_rest(self, meta):
        tree = normalform.normalize([ev(0.0, 1.0, 60), ev(3.0, 1.0, 62)], meta)
        assert isinstance(tree, Seq)
        first, middle, last = tree.children
        assert isinstance(middle, Rest)
        assert middle.duration.beats == 2.0
        assert (middle.onset.measure, middle.onset.beat) == (0, 1.0)

    def test_overlap_becomes_parallel(self, meta):
        tree = normalform.normalize([ev(0.0, 2.0, 60), ev(1.0, 2.0, 72)], meta)
        assert isinstance(tree, Par)
        assert len(tree.children) == 2

    def test_single_note_no_wrapper(self, meta):
        tree = normalform.normalize([ev(0.0, 1.0, 60)], meta)
        assert isinstance(tree, Note)

    def test_chord_then_note_chains(self, meta):
        tree = normalform.normalize([ev(0.0, 1.0, 60), ev(0.0, 1.0, 64), ev(1.0, 1.0, 67)], meta)
        assert isinstance(tree, Seq)
        assert isinstance(tree.children[0], Par)
        assert isinstance(tree.children[1], Note)

    def test_incoming_rests_dropped(self, meta):
        events = [ev(0.0, 1.0, 60), TimedEvent("rest", 1.0, 5.0, None), ev(2.0, 1.0, 62)]
        tree = normalform.normalize(events, meta)
        rests = [leaf for _, leaf in model.iter_leaves(tree) if isinstance(leaf, Rest)]
        assert len(rests) == 1
        assert rests[0].duration.beats == 1.0

    def test_no_events(self, meta):
        with pytest.raises(ModelError):
            normalform.normalize([], meta)


class TestDeterminism:
    def test_input_order_irrelevant(self, meta):
        rng = random.Random(7)
        for _ in range(20):
            events = random_events(rng, max_events=15)
            shuffled = events[:]
            rng.shuffle(shuffled)
            assert normalform.normalize(events, meta) == normalform.normalize(shuffled, meta)

    def test_equal_trees_for_equal_multisets(self, meta):
        events = [ev(0.0, 1.0, 60), ev(1.0, 1.0, 62)]
        again = [ev(1.0, 1.0, 62), ev(0.0, 1.0, 60)]
        assert normalform.normalize(events, meta) == normalform.normalize(again, meta)


class TestRoundTrip:
    @settings(max_examples=60, deadline=None)
    @given(grid_events)
    def test_round_trip_property(self, events):
        meta = model.ScoreMeta()
        tree = normalform.normalize(events, meta)
        notes = [e for e in model.flatten(tree, meta) if e.kind == NOTE]
        assert event_triples(notes) == event_triples(events)
        assert_normal_form(tree, meta)

    def test_note_multiset_preserved(self, meta):
        rng = random.Random(21)
        for _ in range(50):
            events = random_events(rng, max_events=25)
            tree = normalform.normalize(events, meta)
            assert event_triples(model.flatten(tree, meta)) == event_triples(events)
            assert_normal_form(tree, meta)

    def test_rests_sit_between_structures(self, meta):
        # Gap rests are interior: never the first or last child of their
        # sequence, and never anywhere else in the tree.
        rng = random.Random(5)
        for _ in range(25):
            events = random_events(rng, max_events=12)
            tree = normalform.normalize(events, meta)
            for path, leaf in model.iter_leaves(tree):
                if not isinstance(leaf, Rest):
                    continue
                assert path, "bare rest at the root"
                parent = model.node_at(tree, path[:-1])
                assert isinstance(parent, Seq)
                assert 0 < path[-1] < len(parent.children) - 1


class TestRenormalize:
    def test_idempotent_on_normal_form(self, meta):
        rng = random.Random(3)
        for _ in range(25):
            tree = normalform.normalize(random_events(rng, max_events=20), meta)
            assert normalform.renormalize(tree, meta) == tree

    def test_rebuilds_out_of_order_sequence(self, meta):
        melody = normalform.normalize(quarter_notes([60, 62, 64]), meta)
        scrambled = Seq([melody.children[2], melody.children[0], melody.children[1]])
        assert normalform.renormalize(scrambled, meta) == melody

    def test_single_note(self, meta):
        note = normalform.normalize([ev(0.0, 1.0, 60)], meta)
        assert normalform.renormalize(note, meta) == note


class TestSpanHelpers:
    def test_merge(self):
        assert normalform.merge_spans([(2.0, 3.0), (0.0, 1.0), (1.0, 2.0)]) == [(0.0, 3.0)]
        assert normalform.merge_spans([(0.0, 1.0), (2.0, 3.0)]) == [(0.0, 1.0), (2.0, 3.0)]

    def test_subtract(self):
        assert normalform.subtract_spans([(0.0, 4.0)], [(1.0, 2.0)]) == [(0.0, 1.0), (2.0, 4.0)]
        assert normalform.subtract_spans([(0.0, 1.0)], [(0.0, 2.0)]) == []
        assert normalform.subtract_spans([(0.0, 1.0)], []) == [(0.0, 1.0)]
