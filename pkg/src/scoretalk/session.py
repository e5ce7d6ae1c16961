"""Stateful conversational editing.

A session owns one mutable score and runs the query-then-edit workflow:
parse the command, translate it to a pattern and an operation, select,
then apply.  Singular references that match several notes go through the
assumer, which consults a bounded memory of recently edited notes and
either picks the unique remembered candidate or asks the user to choose.
Every successful edit pushes a snapshot for undo.
"""

from __future__ import annotations

import copy
import itertools
import uuid
from collections import deque
from dataclasses import dataclass

from . import commands, model, transforms
from .errors import CommandParseError, ScoreTalkError
from .model import Music, ScoreMeta, beats_equal
from .query import Selection, pattern_to_json, select
from .transforms import descriptor_to_json


@dataclass
class Candidate:
    index: int
    describe: str
    path: tuple[int, ...]


@dataclass
class Outcome:
    status: str  # applied | ambiguous | clarificationNeeded | error
    message: str
    candidates: list[Candidate] | None = None
    echo: str | None = None
    program: dict | None = None  # wire encoding of the translated pattern/operation

    def __post_init__(self):
        if self.status == "ambiguous" and (self.candidates is None or len(self.candidates) < 2):
            raise ScoreTalkError("ambiguous outcomes carry at least two candidates")


def outcome_to_json(outcome: Outcome) -> dict:
    out: dict = {"status": outcome.status, "message": outcome.message}
    if outcome.candidates is not None:
        out["candidates"] = [
            {"index": c.index, "describe": c.describe, "path": list(c.path)} for c in outcome.candidates
        ]
    return out


@dataclass
class _Pending:
    descriptor: transforms.OperationDescriptor
    candidates: list[Candidate]
    structure_version: int
    echo: str | None
    program: dict | None = None


@dataclass
class _MemoryEntry:
    stamp: int
    measure: int
    beat: float
    pitch_number: int


@dataclass
class HistoryEntry:
    text: str
    status: str
    message: str


class Session:
    """One logical owner of one score; callers serialize access."""

    def __init__(
        self,
        score: Music | None = None,
        meta: ScoreMeta | None = None,
        *,
        memory_capacity: int = 5,
        undo_capacity: int = 100,
    ):
        self.id = uuid.uuid4().hex
        self.score = score
        self.meta = meta if meta is not None else ScoreMeta()
        self.version = 0
        self.structure_version = 0
        self.working_memory: deque[_MemoryEntry] = deque(maxlen=memory_capacity)
        self.undo_capacity = undo_capacity
        self.undo_stack: list[Music] = []
        self.pending: _Pending | None = None
        self.history: list[HistoryEntry] = []
        self._clock = itertools.count()

    # -- state --------------------------------------------------------

    def load(self, score: Music, meta: ScoreMeta):
        """Replace the score, dropping undo history and working memory."""
        self.score = score
        self.meta = meta
        self.version += 1
        self.structure_version += 1
        self.undo_stack.clear()
        self.working_memory.clear()
        self.history.clear()
        self.pending = None

    def events(self) -> list[model.TimedEvent]:
        if self.score is None:
            return []
        return model.flatten(self.score, self.meta)

    def describe_score(self) -> str:
        events = self.events()
        if not events:
            return "(empty score)"
        lines = [f"{len(events)} events"]
        for e in events:
            onset = model.onset_from_absolute(e.onset_beats, self.meta)
            if e.kind == model.NOTE:
                what = model.pitch_label(e.pitch_number, self.meta.octave_offset_k)
            else:
                what = "rest"
            lines.append(
                f"  {what:>5} measure {onset.measure} beat {onset.beat:g} dur {e.duration_beats:g}"
            )
        return "\n".join(lines)

    # -- commands -----------------------------------------------------

    def apply_command(self, text: str) -> Outcome:
        """Parse, translate, select, and apply one command."""
        try:
            ast = commands.parse_command(text)
        except CommandParseError as exc:
            return self._record(text, Outcome("error", str(exc)))
        if self.pending is not None and ast.action not in ("undo", "show"):
            return self._record(text, Outcome("error", "resolve pending ambiguity first"))
        if ast.action == "undo":
            self.pending = None
            return self._record(text, self.undo())
        if ast.action == "show":
            self.pending = None
            return self._record(text, Outcome("applied", self.describe_score()))
        if self.score is None:
            return self._record(text, Outcome("error", "no score loaded"))
        pattern, desc = commands.to_query(ast)
        echo = commands.program_notation(pattern, desc)
        program = {"pattern": pattern_to_json(pattern), "operation": descriptor_to_json(desc)}
        sel = select(pattern, self.score, version=self.structure_version)
        if not sel.hits:
            return self._record(text, Outcome("error", "no match", echo=echo, program=program))
        if not commands.is_plural(ast) and len(sel.hits) > 1:
            return self._record(text, self._assume(desc, sel, echo, program))
        return self._record(text, self._apply(desc, sel, echo, program=program))

    def resolve_choice(self, index: int) -> Outcome:
        """Apply the pending operation to one chosen candidate."""
        if self.pending is None:
            return self._record(f"(choice {index})", Outcome("error", "no pending ambiguity"))
        if not 0 <= index < len(self.pending.candidates):
            # The ambiguity stays pending so the user can pick again.
            return self._record(f"(choice {index})", Outcome("error", "choice out of range"))
        pend = self.pending
        self.pending = None
        chosen = pend.candidates[index]
        single = Selection(score_version=pend.structure_version, hits=[chosen.path])
        outcome = self._apply(
            pend.descriptor, single, pend.echo, note=f"chose {chosen.describe}; ", program=pend.program
        )
        return self._record(f"(choice {index})", outcome)

    def undo(self) -> Outcome:
        if not self.undo_stack:
            return Outcome("error", "nothing to undo")
        self.score = self.undo_stack.pop()
        self.version += 1
        self.structure_version += 1
        self.pending = None
        self._prune_memory()
        return Outcome("applied", "undid last edit")

    # -- internals ----------------------------------------------------

    def _record(self, text: str, outcome: Outcome) -> Outcome:
        self.history.append(HistoryEntry(text, outcome.status, outcome.message))
        return outcome

    def _apply(
        self, desc, sel: Selection, echo: str | None, note: str = "", program: dict | None = None
    ) -> Outcome:
        snapshot = copy.deepcopy(self.score)
        try:
            result = transforms.apply_operation(desc, sel, self.score, self.meta)
        except ScoreTalkError as exc:
            self.score = snapshot
            return Outcome("error", str(exc), echo=echo, program=program)
        self.score = result.score
        self.undo_stack.append(snapshot)
        if len(self.undo_stack) > self.undo_capacity:
            self.undo_stack.pop(0)
        self.version += 1
        if result.structural:
            self.structure_version += 1
        for event in result.changed:
            onset = model.onset_from_absolute(event.onset_beats, self.meta)
            self.working_memory.append(
                _MemoryEntry(next(self._clock), onset.measure, onset.beat, event.pitch_number)
            )
        count = len(sel.hits)
        message = f"{note}applied to {count} note{'s' if count != 1 else ''}"
        return Outcome("applied", message, echo=echo, program=program)

    def _assume(self, desc, sel: Selection, echo: str | None, program: dict | None = None) -> Outcome:
        candidates = [Candidate(i, self._describe_path(p), p) for i, p in enumerate(sel.hits)]
        remembered = [c for c in candidates if self._in_memory(c.path)]
        if len(remembered) == 1:
            chosen = remembered[0]
            single = Selection(score_version=sel.score_version, hits=[chosen.path])
            return self._apply(desc, single, echo, note=f"assuming {chosen.describe}; ", program=program)
        self.pending = _Pending(desc, candidates, self.structure_version, echo, program)
        return Outcome(
            "ambiguous",
            f"ambiguous reference: {len(candidates)} matches",
            candidates=candidates,
            echo=echo,
            program=program,
        )

    def _describe_path(self, path: tuple[int, ...]) -> str:
        leaf = model.node_at(self.score, path)
        label = model.pitch_label(
            model.pitch_number(leaf.pitch, self.meta.octave_offset_k), self.meta.octave_offset_k
        )
        return f"{label}, measure {leaf.onset.measure}, beat {leaf.onset.beat:g}"

    def _in_memory(self, path: tuple[int, ...]) -> bool:
        leaf = model.node_at(self.score, path)
        pn = model.pitch_number(leaf.pitch, self.meta.octave_offset_k)
        return any(
            entry.measure == leaf.onset.measure
            and beats_equal(entry.beat, leaf.onset.beat)
            and entry.pitch_number == pn
            for entry in self.working_memory
        )

    def _prune_memory(self):
        """Drop memory entries that no longer name a note in the score."""
        if self.score is None:
            self.working_memory.clear()
            return
        alive = set()
        for _, leaf in model.iter_leaves(self.score):
            if isinstance(leaf, model.Note):
                alive.add(
                    (
                        leaf.onset.measure,
                        model.beat_key(leaf.onset.beat),
                        model.pitch_number(leaf.pitch, self.meta.octave_offset_k),
                    )
                )
        kept = [
            e for e in self.working_memory if (e.measure, model.beat_key(e.beat), e.pitch_number) in alive
        ]
        self.working_memory.clear()
        self.working_memory.extend(kept)
