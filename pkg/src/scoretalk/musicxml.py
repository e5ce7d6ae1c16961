"""MusicXML (score-partwise) reading into timed events.

Supported content: the part list, parts, measures, divisions and time
attributes, and notes with pitch (step/alter/octave), duration, rest,
chord, and tie markings.  Part names become context labels on every
event of the part.  Tied notes merge into one event; rests only advance
the running position, since rests are re-derived structurally later.
Anything else is skipped with a warning.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from . import model
from .errors import IngestError
from .ingest import IngestReport
from .model import NOTE, Contexts, ScoreMeta, TimedEvent

_STEP_TO_PC = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}

_SILENT_TAGS = {"print", "barline"}  # purely visual; skipped without a warning


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _find(el: ET.Element, name: str) -> ET.Element | None:
    for child in el:
        if _local(child.tag) == name:
            return child
    return None


def _text(el: ET.Element | None) -> str | None:
    if el is None or el.text is None:
        return None
    return el.text.strip()


def _int_text(el: ET.Element, name: str, where: str) -> int:
    raw = _text(_find(el, name))
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise IngestError(f"malformed MusicXML: bad <{name}> in {where}") from None


def parse_musicxml(text: str) -> tuple[list[TimedEvent], ScoreMeta, IngestReport]:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise IngestError(f"malformed MusicXML: {exc}") from None
    if _local(root.tag) != "score-partwise":
        raise IngestError("unsupported MusicXML root (expected score-partwise)")

    part_names: dict[str, str] = {}
    part_list = _find(root, "part-list")
    if part_list is not None:
        for child in part_list:
            if _local(child.tag) == "score-part":
                pid = child.get("id", "")
                name = _text(_find(child, "part-name"))
                if pid and name:
                    part_names[pid] = name

    warnings: list[str] = []
    skipped: set[str] = set()
    events: list[TimedEvent] = []
    beats_per_measure: float | None = None

    for part_index, part in enumerate(child for child in root if _local(child.tag) == "part"):
        pid = part.get("id", "")
        label = part_names.get(pid) or pid or f"part {part_index + 1}"
        divisions: int | None = None
        position = 0.0
        last_note_onset = 0.0
        pending_ties: dict[int, TimedEvent] = {}

        for measure in (child for child in part if _local(child.tag) == "measure"):
            for element in measure:
                tag = _local(element.tag)
                if tag == "attributes":
                    div_el = _find(element, "divisions")
                    if div_el is not None:
                        divisions = _int_text(element, "divisions", label)
                        if divisions <= 0:
                            raise IngestError("malformed MusicXML: divisions must be positive")
                    time_el = _find(element, "time")
                    if time_el is not None:
                        beats = _int_text(time_el, "beats", label)
                        beat_type = _int_text(time_el, "beat-type", label)
                        if beat_type <= 0:
                            raise IngestError("malformed MusicXML: bad beat-type")
                        value = beats * 4.0 / beat_type
                        if beats_per_measure is None:
                            beats_per_measure = value
                        elif abs(beats_per_measure - value) > 1e-9:
                            raise IngestError("unsupported meter change")
                    continue
                if tag != "note":
                    if tag not in _SILENT_TAGS and tag not in skipped:
                        skipped.add(tag)
                        warnings.append(f"skipped unsupported element <{tag}>")
                    continue

                if _find(element, "grace") is not None:
                    if "grace" not in skipped:
                        skipped.add("grace")
                        warnings.append("skipped grace notes")
                    continue
                duration_el = _find(element, "duration")
                if duration_el is None:
                    warnings.append(f"skipped a note without duration in {label}")
                    continue
                if divisions is None:
                    raise IngestError("missing divisions")
                duration = _int_text(element, "duration", label) / divisions
                is_chord = _find(element, "chord") is not None
                onset = last_note_onset if is_chord else position
                if not is_chord:
                    position += duration

                if _find(element, "rest") is not None:
                    continue
                pitch_el = _find(element, "pitch")
                if pitch_el is None:
                    warnings.append(f"skipped an unpitched note in {label}")
                    continue
                if not is_chord:
                    last_note_onset = onset
                step = _text(_find(pitch_el, "step"))
                if step not in _STEP_TO_PC:
                    raise IngestError(f"malformed MusicXML: bad <step> in {label}")
                alter_text = _text(_find(pitch_el, "alter"))
                alter = 0
                if alter_text:
                    alter_value = float(alter_text)
                    if alter_value != int(alter_value):
                        warnings.append(f"skipped a microtonal note in {label}")
                        continue
                    alter = int(alter_value)
                octave = _int_text(pitch_el, "octave", label)
                pn = _STEP_TO_PC[step] + alter + 12 * (octave + 1)

                tie_types = {t.get("type") for t in element if _local(t.tag) == "tie"}
                if "stop" in tie_types and pn in pending_ties:
                    held = pending_ties[pn]
                    held.duration_beats += duration
                    if "start" not in tie_types:
                        events.append(pending_ties.pop(pn))
                    continue
                event = TimedEvent(NOTE, onset, duration, pn, Contexts(labels={label}))
                if "start" in tie_types:
                    if pn in pending_ties:
                        warnings.append(f"overlapping tie on the same pitch in {label}")
                        events.append(pending_ties.pop(pn))
                    pending_ties[pn] = event
                else:
                    if "stop" in tie_types:
                        warnings.append(f"tie stop without a matching start in {label}")
                    events.append(event)

        for event in pending_ties.values():
            warnings.append(f"unterminated tie in {label}")
            events.append(event)

    meta = ScoreMeta(beats_per_measure=beats_per_measure if beats_per_measure is not None else 4.0)
    events.sort(key=lambda e: (model.beat_key(e.onset_beats), e.pitch_number, e.duration_beats))
    return events, meta, IngestReport("musicxml", len(events), warnings, meta)
