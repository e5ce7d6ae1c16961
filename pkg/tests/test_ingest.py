"""Ingest dispatch: format detection, part grouping, file round trips."""

import pytest

from scoretalk import ingest, model, normalform
from scoretalk.errors import IngestError
from scoretalk.model import NOTE, Contexts, Par, ScoreMeta, Seq, TimedEvent
from scoretalk.query import NotePattern, StructPattern, select

from conftest import FIXTURES, quarter_notes


def labeled(pn, onset, label):
    return TimedEvent(NOTE, onset, 1.0, pn, Contexts(labels={label}))


class TestDetectFormat:
    @pytest.mark.parametrize(
        "name,fmt",
        [("a.mid", "midi"), ("a.MIDI", "midi"), ("a.xml", "musicxml"),
         ("a.musicxml", "musicxml"), ("a.json", "json")],
    )
    def test_known(self, name, fmt):
        assert ingest.detect_format(name) == fmt

    def test_unknown(self):
        with pytest.raises(IngestError, match="unsupported file extension"):
            ingest.detect_format("score.wav")


class TestScoreFromEvents:
    def test_single_part_stays_flat(self, meta):
        tree = ingest.score_from_events(quarter_notes([60, 62, 64]), meta)
        assert isinstance(tree, Seq)

    def test_parts_split_into_parallel_branches(self, meta):
        events = [labeled(60, 0.0, "Treble"), labeled(62, 1.0, "Treble"),
                  labeled(48, 0.0, "Bass"), labeled(50, 1.0, "Bass")]
        tree = ingest.score_from_events(events, meta)
        assert isinstance(tree, Par)
        assert [sorted(c.contexts.labels) for c in tree.children] == [["Treble"], ["Bass"]]

    def test_labeled_branch_answers_structural_query(self, meta):
        events = [labeled(60, 0.0, "Part B"), labeled(62, 1.0, "Part B"),
                  labeled(64, 2.0, "Part B"), labeled(48, 0.0, "Part A")]
        tree = ingest.score_from_events(events, meta)
        pattern = StructPattern("seq", (NotePattern(), NotePattern(), NotePattern()), {"Part B"})
        sel = select(pattern, tree)
        assert len(sel.runs) == 1
        assert len(sel.hits) == 3

    def test_same_onset_notes_in_different_parts_stay_apart(self, meta):
        # Same onset and duration, but chords never form across parts.
        events = [labeled(60, 0.0, "One"), labeled(64, 0.0, "Two")]
        tree = ingest.score_from_events(events, meta)
        assert isinstance(tree, Par)
        assert all(not isinstance(c, Par) for c in tree.children)


class TestFiles:
    def test_load_path_musicxml(self):
        music, meta, report = ingest.load_path(FIXTURES / "two_measure.musicxml")
        assert report.source_format == "musicxml"
        assert report.event_count == 5
        notes = [e for e in model.flatten(music, meta) if e.kind == NOTE]
        assert len(notes) == 5
        assert all(e.contexts.labels == {"Lead"} for e in notes)

    def test_save_and_reload_json(self, meta, tmp_path):
        tree = normalform.normalize(quarter_notes([60, 64, 67]), meta)
        target = tmp_path / "trio.json"
        ingest.save_path(tree, meta, target)
        back, back_meta, report = ingest.load_path(target)
        assert back == tree
        assert back_meta == meta
        assert report.event_count == 3

    def test_save_and_reload_midi(self, meta, tmp_path):
        tree = normalform.normalize(quarter_notes([60, 64, 67]), meta)
        target = tmp_path / "trio.mid"
        ingest.save_path(tree, meta, target)
        back, _, report = ingest.load_path(target)
        assert report.source_format == "midi"
        assert [e.pitch_number for e in model.flatten(back, ScoreMeta())] == [60, 64, 67]

    def test_missing_file(self):
        with pytest.raises(IngestError, match="cannot read"):
            ingest.load_path("/nonexistent/score.json")

    def test_load_bytes_bad_format(self):
        with pytest.raises(IngestError, match="unknown input format"):
            ingest.load_bytes(b"", "wav")
