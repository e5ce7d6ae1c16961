"""Standard MIDI File reading and writing (formats 0 and 1).

Only note content survives the trip: note-on/note-off pairs become timed
events, the first tempo and time-signature meta events populate the
score metadata, and everything else is skipped.  Onsets and durations
quantize to multiples of 1/480 beat, the same resolution used when
writing files back out.
"""

from __future__ import annotations

from collections import deque

from . import model
from .errors import IngestError
from .ingest import IngestReport
from .model import NOTE, Contexts, Music, ScoreMeta, TimedEvent

DIVISION = 480
QUANTUM = 1.0 / DIVISION

_CHANNEL_DATA_BYTES = {0x80: 2, 0x90: 2, 0xA0: 2, 0xB0: 2, 0xC0: 1, 0xD0: 1, 0xE0: 2}


class _Reader:
    def __init__(self, data: bytes, start: int = 0, end: int | None = None):
        self.data = data
        self.pos = start
        self.end = len(data) if end is None else end

    @property
    def remaining(self) -> int:
        return self.end - self.pos

    def read(self, n: int) -> bytes:
        if self.pos + n > self.end:
            raise IngestError("malformed MIDI: truncated chunk")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return self.read(1)[0]

    def u16(self) -> int:
        return int.from_bytes(self.read(2), "big")

    def u32(self) -> int:
        return int.from_bytes(self.read(4), "big")

    def varlen(self) -> int:
        value = 0
        for _ in range(4):
            byte = self.u8()
            value = (value << 7) | (byte & 0x7F)
            if not byte & 0x80:
                return value
        raise IngestError("malformed MIDI: variable-length value too long")


def _quantize(beats: float) -> float:
    return round(beats * DIVISION) / DIVISION


def parse_midi(data: bytes) -> tuple[list[TimedEvent], ScoreMeta, IngestReport]:
    """Decode note events, tempo, and meter from a format 0/1 file."""
    r = _Reader(data)
    if r.read(4) != b"MThd":
        raise IngestError("malformed MIDI: missing MThd header")
    header_len = r.u32()
    if header_len < 6:
        raise IngestError("malformed MIDI: short header")
    smf_format = r.u16()
    track_count = r.u16()
    division = r.u16()
    r.read(header_len - 6)
    if smf_format not in (0, 1):
        raise IngestError("unsupported SMF format")
    if division & 0x8000:
        raise IngestError("unsupported SMPTE division")
    if division == 0:
        raise IngestError("malformed MIDI: zero division")

    warnings: list[str] = []
    raw_notes: list[tuple[int, int, int, int]] = []  # (on_tick, dur_ticks, key, velocity)
    tempo_candidates: list[tuple[int, int, float]] = []  # (tick, order, bpm)
    meter: float | None = None
    order = 0

    for index in range(track_count):
        magic = r.read(4)
        length = r.u32()
        if magic != b"MTrk":
            warnings.append(f"skipped non-track chunk {magic!r}")
            r.read(length)
            continue
        track = _Reader(data, r.pos, r.pos + length)
        r.read(length)
        tick = 0
        running: int | None = None
        open_notes: dict[tuple[int, int], deque[tuple[int, int]]] = {}
        while track.remaining > 0:
            tick += track.varlen()
            first = track.u8()
            if first < 0x80:
                status = running
                data1: int | None = first
                if status is None:
                    raise IngestError("malformed MIDI: data byte without running status")
            else:
                status = first
                data1 = None
                if status < 0xF0:
                    running = status
            if status == 0xFF:
                meta_type = track.u8()
                payload = track.read(track.varlen())
                if meta_type == 0x51 and len(payload) == 3:
                    mpqn = int.from_bytes(payload, "big")
                    if mpqn > 0:
                        tempo_candidates.append((tick, order, 60_000_000.0 / mpqn))
                        order += 1
                elif meta_type == 0x58 and len(payload) >= 2:
                    beats = payload[0] * 4.0 / (1 << payload[1])
                    if meter is None:
                        meter = beats
                    elif abs(meter - beats) > 1e-9:
                        raise IngestError("unsupported meter change")
                elif meta_type == 0x2F:
                    track.pos = track.end
                continue
            if status in (0xF0, 0xF7):
                track.read(track.varlen())
                continue
            size = _CHANNEL_DATA_BYTES.get(status & 0xF0)
            if size is None:
                raise IngestError(f"malformed MIDI: unexpected status byte 0x{status:02x}")
            if data1 is None:
                data1 = track.u8()
            data2 = track.u8() if size == 2 else 0
            kind = status & 0xF0
            channel = status & 0x0F
            if kind == 0x90 and data2 > 0:
                open_notes.setdefault((channel, data1), deque()).append((tick, data2))
            elif kind == 0x80 or (kind == 0x90 and data2 == 0):
                pending = open_notes.get((channel, data1))
                if pending:
                    on_tick, velocity = pending.popleft()
                    raw_notes.append((on_tick, tick - on_tick, data1, velocity))
                else:
                    warnings.append(f"note-off without matching note-on (key {data1}, track {index})")
        for (channel, key), pending in open_notes.items():
            for on_tick, velocity in pending:
                warnings.append(f"unmatched note-on closed at track end (key {key}, track {index})")
                if tick > on_tick:
                    raw_notes.append((on_tick, tick - on_tick, key, velocity))

    tempo = 120.0
    if tempo_candidates:
        tempo_candidates.sort(key=lambda t: (t[0], t[1]))
        tempo = tempo_candidates[0][2]
    meta = ScoreMeta(beats_per_measure=meter if meter is not None else 4.0, tempo_bpm=tempo)

    events = []
    for on_tick, dur_ticks, key, velocity in raw_notes:
        onset = _quantize(on_tick / division)
        duration = _quantize(dur_ticks / division)
        if duration <= 0:
            duration = QUANTUM
            warnings.append(f"zero-length note stretched to one tick (key {key})")
        events.append(TimedEvent(NOTE, onset, duration, key, Contexts(volume=velocity)))
    events.sort(key=lambda e: (model.beat_key(e.onset_beats), e.pitch_number, e.duration_beats))
    return events, meta, IngestReport("midi", len(events), warnings, meta)


def _encode_varlen(value: int) -> bytes:
    chunks = [value & 0x7F]
    value >>= 7
    while value:
        chunks.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(chunks))


def _time_signature(beats_per_measure: float) -> bytes | None:
    for denominator in (4, 8, 2, 16, 1, 32, 64):
        numerator = beats_per_measure * denominator / 4
        if abs(numerator - round(numerator)) < 1e-9 and 1 <= round(numerator) <= 255:
            power = denominator.bit_length() - 1
            return bytes([0xFF, 0x58, 0x04, round(numerator), power, 24, 8])
    return None


def export_midi(m: Music, meta: ScoreMeta) -> bytes:
    """Write a format 0 file at division 480 for a concrete score."""
    events = [e for e in model.flatten(m, meta) if e.kind == NOTE]
    messages: list[tuple[int, int, bytes]] = []
    mpqn = max(1, min(0xFFFFFF, round(60_000_000 / meta.tempo_bpm)))
    messages.append((0, -2, bytes([0xFF, 0x51, 0x03]) + mpqn.to_bytes(3, "big")))
    signature = _time_signature(meta.beats_per_measure)
    if signature is not None:
        messages.append((0, -1, signature))
    last_tick = 0
    # Overlapping notes of the same pitch go to different channels, so the
    # note-off pairing stays unambiguous on the way back in.
    lane_busy_until: dict[tuple[int, int], int] = {}
    for event in events:
        if not 0 <= event.pitch_number <= 127:
            raise IngestError("unrepresentable pitch")
        on_tick = round(event.onset_beats * DIVISION)
        off_tick = round(event.end_beats * DIVISION)
        if off_tick <= on_tick:
            off_tick = on_tick + 1
        channel = 15
        for candidate in range(16):
            if lane_busy_until.get((candidate, event.pitch_number), 0) <= on_tick:
                channel = candidate
                break
        lane_busy_until[(channel, event.pitch_number)] = off_tick
        velocity = event.contexts.volume if event.contexts.volume else 64
        velocity = max(1, min(127, velocity))
        messages.append((on_tick, 1, bytes([0x90 | channel, event.pitch_number, velocity])))
        messages.append((off_tick, 0, bytes([0x80 | channel, event.pitch_number, 0])))
        last_tick = max(last_tick, off_tick)
    messages.sort(key=lambda msg: (msg[0], msg[1], msg[2]))
    body = bytearray()
    tick = 0
    for at, _, payload in messages:
        body += _encode_varlen(at - tick)
        body += payload
        tick = at
    body += _encode_varlen(last_tick - tick) + bytes([0xFF, 0x2F, 0x00])
    header = b"MThd" + (6).to_bytes(4, "big") + (0).to_bytes(2, "big") + (1).to_bytes(2, "big") + DIVISION.to_bytes(2, "big")
    return header + b"MTrk" + len(body).to_bytes(4, "big") + bytes(body)
