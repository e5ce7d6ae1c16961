"""Stable JSON encoding of scores, metadata, and timed events.

The note/rest/group encodings keep a fixed key order and serialize
contexts with sorted keys, so exporting the same tree twice yields
byte-identical text.  Decoding reports problems with a JSON-pointer
style location.
"""

from __future__ import annotations

import json

from . import model
from .errors import IngestError, ModelError
from .model import Contexts, Music, Note, Par, Rest, Scale, ScoreMeta, Seq, TimedEvent


def _fail(path: str, why: str):
    raise IngestError(f"invalid score JSON at {path}: {why}")


def _get_int(obj: dict, key: str, path: str, nullable: bool = True):
    value = obj.get(key)
    if value is None:
        if nullable:
            return None
        _fail(f"{path}/{key}", "expected an integer")
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(f"{path}/{key}", "expected an integer")
    return value


def _get_number(obj: dict, key: str, path: str):
    value = obj.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(f"{path}/{key}", "expected a number")
    return float(value)


def contexts_to_dict(contexts: Contexts) -> dict:
    out: dict = {}
    if contexts.extra:
        out["extra"] = {k: contexts.extra[k] for k in sorted(contexts.extra)}
    if contexts.labels:
        out["labels"] = sorted(contexts.labels)
    if contexts.scale is not None:
        out["scale"] = {"intervals": list(contexts.scale.intervals), "root": contexts.scale.root_pitch_class}
    if contexts.volume is not None:
        out["volume"] = contexts.volume
    return out


def contexts_from_dict(obj, path: str) -> Contexts:
    if obj is None:
        return Contexts()
    if not isinstance(obj, dict):
        _fail(path, "expected an object")
    unknown = set(obj) - {"extra", "labels", "scale", "volume"}
    if unknown:
        _fail(f"{path}/{sorted(unknown)[0]}", "unknown key")
    scale = None
    if obj.get("scale") is not None:
        raw = obj["scale"]
        if not isinstance(raw, dict):
            _fail(f"{path}/scale", "expected an object")
        try:
            scale = Scale(raw.get("root", 0), tuple(raw.get("intervals", ())))
        except (ModelError, TypeError) as exc:
            _fail(f"{path}/scale", str(exc))
    try:
        return Contexts(
            labels=set(obj.get("labels", ())),
            scale=scale,
            volume=_get_int(obj, "volume", path),
            extra=dict(obj.get("extra", {})),
        )
    except (ModelError, TypeError) as exc:
        _fail(path, str(exc))


def _pitch_or_none(pc, octave):
    if pc is None and octave is None:
        return None
    return model.Pitch(pc, octave)


def _onset_or_none(measure, beat):
    if measure is None and beat is None:
        return None
    return model.Onset(measure, beat)


def music_to_dict(m: Music) -> dict:
    if isinstance(m, Note):
        return {
            "type": "note",
            "pc": m.pitch.pitch_class if m.pitch else None,
            "oct": m.pitch.octave if m.pitch else None,
            "measure": m.onset.measure if m.onset else None,
            "beat": m.onset.beat if m.onset else None,
            "dur": m.duration.beats if m.duration else None,
            "contexts": contexts_to_dict(m.contexts),
        }
    if isinstance(m, Rest):
        return {
            "type": "rest",
            "measure": m.onset.measure if m.onset else None,
            "beat": m.onset.beat if m.onset else None,
            "dur": m.duration.beats if m.duration else None,
            "contexts": contexts_to_dict(m.contexts),
        }
    kind = "seq" if isinstance(m, Seq) else "par"
    return {
        "type": kind,
        "children": [music_to_dict(c) for c in m.children],
        "contexts": contexts_to_dict(m.contexts),
    }


_NOTE_KEYS = {"type", "pc", "oct", "measure", "beat", "dur", "contexts"}
_REST_KEYS = {"type", "measure", "beat", "dur", "contexts"}
_GROUP_KEYS = {"type", "children", "contexts"}


def music_from_dict(obj, path: str = "/music") -> Music:
    if not isinstance(obj, dict):
        _fail(path, "expected an object")
    kind = obj.get("type")
    if kind == "note":
        unknown = set(obj) - _NOTE_KEYS
        if unknown:
            _fail(f"{path}/{sorted(unknown)[0]}", "unknown key")
        pc = _get_int(obj, "pc", path)
        octave = _get_int(obj, "oct", path)
        measure = _get_int(obj, "measure", path)
        beat = _get_number(obj, "beat", path)
        dur = _get_number(obj, "dur", path)
        try:
            return Note(
                _pitch_or_none(pc, octave),
                model.Duration(dur) if dur is not None else None,
                _onset_or_none(measure, beat),
                contexts_from_dict(obj.get("contexts"), f"{path}/contexts"),
            )
        except ModelError as exc:
            _fail(path, str(exc))
    if kind == "rest":
        unknown = set(obj) - _REST_KEYS
        if unknown:
            _fail(f"{path}/{sorted(unknown)[0]}", "unknown key")
        measure = _get_int(obj, "measure", path)
        beat = _get_number(obj, "beat", path)
        dur = _get_number(obj, "dur", path)
        try:
            return Rest(
                model.Duration(dur) if dur is not None else None,
                _onset_or_none(measure, beat),
                contexts_from_dict(obj.get("contexts"), f"{path}/contexts"),
            )
        except ModelError as exc:
            _fail(path, str(exc))
    if kind in ("seq", "par"):
        unknown = set(obj) - _GROUP_KEYS
        if unknown:
            _fail(f"{path}/{sorted(unknown)[0]}", "unknown key")
        raw_children = obj.get("children")
        if not isinstance(raw_children, list) or not raw_children:
            _fail(f"{path}/children", "expected a non-empty array")
        children = [music_from_dict(c, f"{path}/children/{i}") for i, c in enumerate(raw_children)]
        contexts = contexts_from_dict(obj.get("contexts"), f"{path}/contexts")
        return Seq(children, contexts) if kind == "seq" else Par(children, contexts)
    _fail(f"{path}/type", f"unknown node type {kind!r}")


def meta_to_dict(meta: ScoreMeta) -> dict:
    return {
        "beatsPerMeasure": meta.beats_per_measure,
        "octaveOffsetK": meta.octave_offset_k,
        "tempoBPM": meta.tempo_bpm,
    }


def meta_from_dict(obj, path: str = "/meta") -> ScoreMeta:
    if obj is None:
        return ScoreMeta()
    if not isinstance(obj, dict):
        _fail(path, "expected an object")
    unknown = set(obj) - {"beatsPerMeasure", "octaveOffsetK", "tempoBPM"}
    if unknown:
        _fail(f"{path}/{sorted(unknown)[0]}", "unknown key")
    try:
        return ScoreMeta(
            beats_per_measure=obj.get("beatsPerMeasure", 4.0),
            tempo_bpm=obj.get("tempoBPM", 120.0),
            octave_offset_k=obj.get("octaveOffsetK", 1),
        )
    except (ModelError, TypeError) as exc:
        _fail(path, str(exc))


def export_json(m: Music, meta: ScoreMeta) -> str:
    payload = {"meta": meta_to_dict(meta), "music": music_to_dict(m)}
    return json.dumps(payload, indent=2) + "\n"


def import_json(text: str) -> tuple[Music, ScoreMeta]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestError(f"invalid score JSON at /: {exc}") from None
    if not isinstance(obj, dict) or "music" not in obj:
        _fail("/", "expected an object with a 'music' key")
    meta = meta_from_dict(obj.get("meta"))
    return music_from_dict(obj["music"]), meta


def timed_event_to_dict(event: TimedEvent) -> dict:
    return {
        "kind": event.kind,
        "pitch": event.pitch_number,
        "onset": event.onset_beats,
        "dur": event.duration_beats,
        "labels": sorted(event.contexts.labels),
    }
