"""HTTP endpoints: session lifecycle, commands, ambiguity, and export."""

import threading
import time

import pytest
from fastapi.testclient import TestClient

from scoretalk import midi, model, scorejson
from scoretalk.model import ScoreMeta
from scoretalk.normalform import normalize
from scoretalk.service import create_app

from conftest import FIXTURES, TWINKLE_PITCHES, quarter_notes


@pytest.fixture
def client():
    return TestClient(create_app())


@pytest.fixture
def session_id(client):
    response = client.post("/sessions")
    assert response.status_code == 201
    return response.json()["sessionId"]


def upload_twinkle(client, session_id):
    data = (FIXTURES / "twinkle.json").read_bytes()
    response = client.post(
        f"/sessions/{session_id}/score", content=data, headers={"X-Score-Format": "json"}
    )
    assert response.status_code == 200
    return response.json()


class TestSessions:
    def test_create_distinct_ids(self, client):
        first = client.post("/sessions").json()["sessionId"]
        second = client.post("/sessions").json()["sessionId"]
        assert first != second

    def test_unknown_session(self, client):
        assert client.get("/sessions/nope/score").status_code == 404

    def test_upload_json(self, client, session_id):
        payload = upload_twinkle(client, session_id)
        assert payload["report"]["eventCount"] == 7
        assert len(payload["events"]) == 7

    def test_upload_musicxml(self, client, session_id):
        data = (FIXTURES / "two_measure.musicxml").read_bytes()
        response = client.post(
            f"/sessions/{session_id}/score",
            content=data,
            headers={"Content-Type": "application/xml"},
        )
        assert response.status_code == 200
        assert response.json()["report"]["eventCount"] == 5

    def test_upload_midi(self, client, session_id):
        meta = ScoreMeta()
        data = midi.export_midi(normalize(quarter_notes([60, 64]), meta), meta)
        response = client.post(
            f"/sessions/{session_id}/score", content=data, headers={"X-Score-Format": "midi"}
        )
        assert response.status_code == 200
        assert response.json()["report"]["eventCount"] == 2

    def test_bad_bytes(self, client, session_id):
        response = client.post(
            f"/sessions/{session_id}/score", content=b"garbage", headers={"X-Score-Format": "midi"}
        )
        assert response.status_code == 422

    def test_unknown_format(self, client, session_id):
        response = client.post(f"/sessions/{session_id}/score", content=b"x")
        assert response.status_code == 422


class TestCommands:
    def test_octave_move(self, client, session_id):
        meta = ScoreMeta()
        score = normalize(quarter_notes([60, 62, 64, 65, 71, 69, 67, 65]), meta)
        client.post(
            f"/sessions/{session_id}/score",
            content=scorejson.export_json(score, meta).encode(),
            headers={"X-Score-Format": "json"},
        )
        response = client.post(
            f"/sessions/{session_id}/command",
            json={"text": "Move the B in measure 2 up an octave."},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["outcome"]["status"] == "applied"
        assert "transpose(12" in body["echo"]
        pitches = [e["pitch"] for e in body["events"]]
        assert 83 in pitches and 71 not in pitches

    def test_ambiguous_command(self, client, session_id):
        upload_twinkle(client, session_id)
        response = client.post(
            f"/sessions/{session_id}/command", json={"text": "move the G up a half step"}
        )
        body = response.json()
        assert body["outcome"]["status"] == "ambiguous"
        assert len(body["outcome"]["candidates"]) == 3
        assert body["outcome"]["candidates"][0]["describe"] == "G4, measure 0, beat 2"

    def test_program_wire_encoding(self, client, session_id):
        upload_twinkle(client, session_id)
        body = client.post(
            f"/sessions/{session_id}/command", json={"text": "move the G up a half step"}
        ).json()
        assert body["program"] == {
            "pattern": {"note": {"pc": 7}},
            "operation": {"kind": "transpose", "semitones": 1},
        }

    def test_embedded_scores_stay_normal_form(self, client, session_id):
        from conftest import assert_normal_form

        upload_twinkle(client, session_id)
        for text in (
            "move the C on the first beat up a whole step",
            "Reverse the notes in measure one.",
            "delete the A on the first beat of measure two",
        ):
            body = client.post(f"/sessions/{session_id}/command", json={"text": text}).json()
            assert body["outcome"]["status"] == "applied"
            music = scorejson.music_from_dict(body["score"])
            meta = scorejson.meta_from_dict(body["meta"])
            assert_normal_form(music, meta)

    def test_gibberish(self, client, session_id):
        upload_twinkle(client, session_id)
        response = client.post(f"/sessions/{session_id}/command", json={"text": "louder please"})
        assert response.status_code == 200
        assert response.json()["outcome"]["status"] == "error"

    def test_pending_blocks_with_409(self, client, session_id):
        upload_twinkle(client, session_id)
        client.post(f"/sessions/{session_id}/command", json={"text": "move the G up a half step"})
        response = client.post(
            f"/sessions/{session_id}/command", json={"text": "move the A up a half step"}
        )
        assert response.status_code == 409

    def test_errors_do_not_mutate(self, client, session_id):
        upload_twinkle(client, session_id)
        before = client.get(f"/sessions/{session_id}/score").json()
        client.post(f"/sessions/{session_id}/command", json={"text": "move the D up a half step"})
        after = client.get(f"/sessions/{session_id}/score").json()
        assert before == after


class TestResolve:
    def test_resolve_applies_single_note(self, client, session_id):
        upload_twinkle(client, session_id)
        client.post(f"/sessions/{session_id}/command", json={"text": "move the G up a half step"})
        response = client.post(f"/sessions/{session_id}/resolve", json={"index": 2})
        assert response.status_code == 200
        body = response.json()
        assert body["outcome"]["status"] == "applied"
        pitches = [e["pitch"] for e in body["events"]]
        assert pitches == [60, 60, 67, 67, 69, 69, 68]

    def test_out_of_range(self, client, session_id):
        upload_twinkle(client, session_id)
        client.post(f"/sessions/{session_id}/command", json={"text": "move the G up a half step"})
        assert client.post(f"/sessions/{session_id}/resolve", json={"index": 9}).status_code == 400

    def test_without_pending(self, client, session_id):
        upload_twinkle(client, session_id)
        assert client.post(f"/sessions/{session_id}/resolve", json={"index": 0}).status_code == 409


class TestStateEndpoints:
    def test_undo_restores_snapshot(self, client, session_id):
        upload_twinkle(client, session_id)
        before = client.get(f"/sessions/{session_id}/score").json()["events"]
        client.post(f"/sessions/{session_id}/command", json={"text": "move the A on the first beat of measure two up a half step"})
        response = client.post(f"/sessions/{session_id}/undo")
        assert response.json()["events"] == before

    def test_history(self, client, session_id):
        upload_twinkle(client, session_id)
        client.post(f"/sessions/{session_id}/command", json={"text": "show"})
        client.post(f"/sessions/{session_id}/command", json={"text": "move the C on the first beat up a half step"})
        history = client.get(f"/sessions/{session_id}/history").json()["history"]
        assert [h["text"] for h in history] == [
            "show",
            "move the C on the first beat up a half step",
        ]

    def test_export_json_round_trips(self, client, session_id):
        upload_twinkle(client, session_id)
        response = client.get(f"/sessions/{session_id}/export", params={"format": "json"})
        assert response.status_code == 200
        music, meta = scorejson.import_json(response.text)
        assert len(model.flatten(music, meta)) == 7

    def test_export_midi_parses_back(self, client, session_id):
        upload_twinkle(client, session_id)
        response = client.get(f"/sessions/{session_id}/export", params={"format": "midi"})
        assert response.status_code == 200
        assert response.headers["content-type"].startswith("audio/midi")
        events, _, _ = midi.parse_midi(response.content)
        assert [e.pitch_number for e in events] == TWINKLE_PITCHES

    def test_export_without_score(self, client, session_id):
        assert client.get(f"/sessions/{session_id}/export").status_code == 409

    def test_bad_export_format(self, client, session_id):
        upload_twinkle(client, session_id)
        response = client.get(f"/sessions/{session_id}/export", params={"format": "wav"})
        assert response.status_code == 400


class TestLifecycleAndConcurrency:
    def test_idle_sessions_expire(self):
        client = TestClient(create_app(session_ttl=0.0))
        session_id = client.post("/sessions").json()["sessionId"]
        time.sleep(0.01)
        assert client.get(f"/sessions/{session_id}/score").status_code == 404

    def test_commands_on_one_session_serialize(self, client, session_id):
        initial = upload_twinkle(client, session_id)
        base_version = initial["version"]
        barrier = threading.Barrier(8)
        statuses = []

        def flip():
            barrier.wait()
            response = client.post(
                f"/sessions/{session_id}/command",
                json={"text": "Reverse the notes in measure one."},
            )
            statuses.append(response.json()["outcome"]["status"])

        threads = [threading.Thread(target=flip) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        # every edit applied, none lost or interleaved
        assert statuses.count("applied") == 8
        snapshot = client.get(f"/sessions/{session_id}/score").json()
        assert snapshot["version"] == base_version + 8
        assert snapshot["events"] == initial["events"]  # an even number of reversals


class TestUiLoop:
    def test_upload_command_resolve_undo(self, client, session_id):
        # The companion UI's full loop, exercised at the API level.
        initial = upload_twinkle(client, session_id)["events"]
        body = client.post(
            f"/sessions/{session_id}/command", json={"text": "move the G up a half step"}
        ).json()
        assert body["outcome"]["status"] == "ambiguous"
        assert len(body["outcome"]["candidates"]) == 3
        assert body["events"] == initial  # nothing changed yet
        resolved = client.post(f"/sessions/{session_id}/resolve", json={"index": 1}).json()
        changed = [
            (a, b) for a, b in zip(initial, resolved["events"]) if a != b
        ]
        assert len(changed) == 1
        undone = client.post(f"/sessions/{session_id}/undo").json()
        assert undone["events"] == initial
