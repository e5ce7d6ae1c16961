"""File ingestion and export: format detection, reports, score building.

Incoming events are grouped by their part labels; each part is put into
normal form on its own and multiple parts join under one top-level
parallel group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import model, normalform, scorejson
from .errors import IngestError
from .model import Music, Note, Par, ScoreMeta, Seq, TimedEvent


@dataclass
class IngestReport:
    source_format: str
    event_count: int
    warnings: list[str] = field(default_factory=list)
    meta: ScoreMeta = field(default_factory=ScoreMeta)

    def to_json(self) -> dict:
        return {
            "sourceFormat": self.source_format,
            "eventCount": self.event_count,
            "warnings": list(self.warnings),
            "meta": scorejson.meta_to_dict(self.meta),
        }


FORMATS = ("midi", "musicxml", "json")

_EXTENSIONS = {
    ".mid": "midi",
    ".midi": "midi",
    ".xml": "musicxml",
    ".musicxml": "musicxml",
    ".json": "json",
}


def detect_format(path: str | Path) -> str:
    suffix = Path(path).suffix.lower()
    fmt = _EXTENSIONS.get(suffix)
    if fmt is None:
        raise IngestError(f"unsupported file extension {suffix!r}")
    return fmt


def score_from_events(events: list[TimedEvent], meta: ScoreMeta) -> Music:
    """Normal-form tree for a flat event list, one branch per part label."""
    keys: list[frozenset[str]] = []
    groups: dict[frozenset[str], list[TimedEvent]] = {}
    for event in events:
        key = frozenset(event.contexts.labels)
        if key not in groups:
            groups[key] = []
            keys.append(key)
        groups[key].append(event)
    if len(keys) <= 1:
        return normalform.normalize(events, meta)
    parts = []
    for key in keys:
        part = normalform.normalize(groups[key], meta)
        if isinstance(part, (Seq, Par)):
            part.contexts.labels |= set(key)
        parts.append(part)
    return Par(parts)


def load_bytes(data: bytes, fmt: str) -> tuple[Music, ScoreMeta, IngestReport]:
    """Parse raw bytes in the named format into a normal-form score."""
    if fmt == "midi":
        from .midi import parse_midi

        events, meta, report = parse_midi(data)
        return score_from_events(events, meta), meta, report
    if fmt == "musicxml":
        from .musicxml import parse_musicxml

        events, meta, report = parse_musicxml(data.decode("utf-8"))
        return score_from_events(events, meta), meta, report
    if fmt == "json":
        music, meta = scorejson.import_json(data.decode("utf-8"))
        count = sum(1 for _, leaf in model.iter_leaves(music) if isinstance(leaf, Note))
        return music, meta, IngestReport("json", count, [], meta)
    raise IngestError(f"unknown input format {fmt!r}")


def load_path(path: str | Path) -> tuple[Music, ScoreMeta, IngestReport]:
    fmt = detect_format(path)
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from None
    return load_bytes(data, fmt)


def save_path(m: Music, meta: ScoreMeta, path: str | Path):
    fmt = detect_format(path)
    if fmt == "json":
        Path(path).write_text(scorejson.export_json(m, meta))
        return
    if fmt == "midi":
        from .midi import export_midi

        Path(path).write_bytes(export_midi(m, meta))
        return
    raise IngestError(f"cannot write format {fmt!r}")
