"""Conversational command parsing and translation to queries and edits.

The parser is a hand-written recursive descent over a closed grammar
(case-insensitive, terminal period optional)::

    command  = move | invert | reverse | delete | "undo" | "show"
    move     = "move the" PITCH locator* ("up" | "down") interval
    invert   = "invert the notes in measure" NUM ["around" PITCHOCT]
    reverse  = "reverse the notes in measure" NUM
    delete   = "delete the" PITCH locator*
               ["and" ("close the gap" | "leave a rest")]
    locator  = "in measure" NUM
             | "on the" ORDINAL "beat" ["of measure" NUM]
    interval = "a half step" | "a whole step" | "an octave"
             | NUM "half" ("step" | "steps")
    PITCH    = letter A..G with optional accidental
               ("sharp", "flat", "#", trailing "b")
    PITCHOCT = glued pitch-with-octave token such as "G4" or "F#3"
    NUM      = digits, or a number word "one".."twenty"
    ORDINAL  = "first".."twentieth"

Measures and beats are spoken one-based and stored zero-based, so
"measure two" parses to measure index 1 and "the first beat" to beat 0.
Parse results are role-structured ASTs (action, referent, direction,
magnitude, axis) that ``to_query`` turns into a (pattern, operation)
pair for the query-then-edit workflow.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import CommandParseError
from .model import PITCH_NAMES, Pitch
from .query import NotePattern, eq
from .transforms import OperationDescriptor

_WORD_NUMBERS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
    "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14, "fifteen": 15,
    "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19, "twenty": 20,
}

_ORDINALS = {
    "first": 1, "second": 2, "third": 3, "fourth": 4, "fifth": 5,
    "sixth": 6, "seventh": 7, "eighth": 8, "ninth": 9, "tenth": 10,
    "eleventh": 11, "twelfth": 12, "thirteenth": 13, "fourteenth": 14, "fifteenth": 15,
    "sixteenth": 16, "seventeenth": 17, "eighteenth": 18, "nineteenth": 19, "twentieth": 20,
}

_PITCH_LETTERS = {"c": 0, "d": 2, "e": 4, "f": 5, "g": 7, "a": 9, "b": 11}

_ACCIDENTAL_WORDS = {"sharp": 1, "flat": -1}

_PITCH_OCT_RE = re.compile(r"([a-g])(#|b)?(-?\d+)")


@dataclass
class NoteRef:
    """A spoken reference to one note ('the F', 'the C on the first beat')."""

    pitch_class: int | None = None
    measure: int | None = None
    beat: float | None = None
    plural: bool = False


@dataclass
class MeasureRef:
    """A spoken reference to all notes of one measure."""

    measure: int


@dataclass
class CommandAST:
    action: str  # move | invert | reverse | delete | undo | show
    referent: NoteRef | MeasureRef | None = None
    direction: str | None = None  # up | down
    magnitude: int | None = None  # semitone count
    axis: Pitch | None = None
    delete_mode: str | None = None  # asRest | shift


@dataclass
class _Token:
    text: str
    start: int


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = [_Token(m.group(0).lower(), m.start()) for m in re.finditer(r"\S+", text)]
        if self.tokens:
            last = self.tokens[-1]
            trimmed = last.text.rstrip(".")
            if not trimmed:
                self.tokens.pop()
            else:
                self.tokens[-1] = _Token(trimmed, last.start)
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos].text if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            self.fail("cannot parse command")
        self.pos += 1
        return tok

    def expect(self, *words: str) -> str:
        tok = self.peek()
        if tok not in words:
            self.fail("cannot parse command")
        return self.take()

    def position(self) -> int:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos].start
        return len(self.text)

    def fail(self, message: str):
        raise CommandParseError(f"{message} (at position {self.position()})", self.position())

    def done(self):
        if self.peek() is not None:
            self.fail("cannot parse command")

    def number(self) -> int:
        tok = self.peek()
        if tok is None:
            self.fail("cannot parse command")
        if tok.isdigit():
            return int(self.take())
        if tok in _WORD_NUMBERS:
            self.take()
            return _WORD_NUMBERS[tok]
        self.fail("cannot parse command")

    def measure_number(self) -> int:
        n = self.number()
        if n < 1:
            self.fail("measure numbers are spoken starting at one")
        return n - 1

    def ordinal(self) -> int:
        tok = self.peek()
        if tok in _ORDINALS:
            self.take()
            return _ORDINALS[tok] - 1
        self.fail("cannot parse command")

    def pitch_class(self) -> int:
        tok = self.peek()
        if tok is None:
            self.fail("cannot parse command")
        base = tok
        glued = 0
        if len(tok) == 2 and tok[1] in "#b":
            base, glued = tok[0], (1 if tok[1] == "#" else -1)
        if len(base) != 1 or not base.isalpha():
            self.fail("cannot parse command")
        if base not in _PITCH_LETTERS:
            self.fail("unknown note name")
        self.take()
        shift = glued
        if not glued and self.peek() in _ACCIDENTAL_WORDS:
            shift = _ACCIDENTAL_WORDS[self.take()]
        return (_PITCH_LETTERS[base] + shift) % 12

    def pitch_with_octave(self) -> Pitch:
        tok = self.peek()
        match = _PITCH_OCT_RE.fullmatch(tok) if tok else None
        if match is None:
            self.fail("cannot parse command")
        letter, accidental, octave = match.groups()
        if letter not in _PITCH_LETTERS:
            self.fail("unknown note name")
        self.take()
        shift = {"#": 1, "b": -1}.get(accidental, 0)
        return Pitch((_PITCH_LETTERS[letter] + shift) % 12, int(octave))

    def locators(self, ref: NoteRef):
        while True:
            tok = self.peek()
            if tok == "in":
                self.take()
                self.expect("measure")
                ref.measure = self.measure_number()
            elif tok == "on":
                self.take()
                self.expect("the")
                ref.beat = float(self.ordinal())
                self.expect("beat")
                if self.peek() == "of":
                    self.take()
                    self.expect("measure")
                    ref.measure = self.measure_number()
            else:
                return

    def interval(self) -> int:
        tok = self.peek()
        if tok in ("a", "an"):
            self.take()
            word = self.take()
            if word == "octave":
                return 12
            if word in ("half", "whole"):
                self.expect("step", "steps")
                return 1 if word == "half" else 2
            self.fail("cannot parse command")
        count = self.number()
        word = self.take()
        if word == "half":
            self.expect("step", "steps")
            return count
        if word == "octave" or word == "octaves":
            return 12 * count
        self.fail("cannot parse command")


def parse_command(text: str) -> CommandAST:
    """Parse one conversational edit command into its role structure."""
    p = _Parser(text)
    head = p.peek()
    if head is None:
        p.fail("cannot parse command")
    if head == "undo":
        p.take()
        p.done()
        return CommandAST("undo")
    if head == "show":
        p.take()
        p.done()
        return CommandAST("show")
    if head == "move":
        p.take()
        p.expect("the")
        ref = NoteRef(pitch_class=p.pitch_class())
        p.locators(ref)
        direction = p.expect("up", "down")
        magnitude = p.interval()
        p.done()
        return CommandAST("move", ref, direction=direction, magnitude=magnitude)
    if head == "invert":
        p.take()
        p.expect("the")
        p.expect("notes")
        p.expect("in")
        p.expect("measure")
        ref = MeasureRef(p.measure_number())
        axis = None
        if p.peek() == "around":
            p.take()
            axis = p.pitch_with_octave()
        p.done()
        return CommandAST("invert", ref, axis=axis)
    if head == "reverse":
        p.take()
        p.expect("the")
        p.expect("notes")
        p.expect("in")
        p.expect("measure")
        ref = MeasureRef(p.measure_number())
        p.done()
        return CommandAST("reverse", ref)
    if head == "delete":
        p.take()
        p.expect("the")
        ref = NoteRef(pitch_class=p.pitch_class())
        p.locators(ref)
        mode = None
        if p.peek() == "and":
            p.take()
            word = p.expect("close", "leave")
            if word == "close":
                p.expect("the")
                p.expect("gap")
                mode = "shift"
            else:
                p.expect("a")
                p.expect("rest")
                mode = "asRest"
        p.done()
        return CommandAST("delete", ref, delete_mode=mode)
    p.fail("cannot parse command")


def interval_to_semitones(phrase: str) -> int:
    """Semitone count of an interval phrase such as 'a whole step'."""
    p = _Parser(phrase)
    value = p.interval()
    p.done()
    return value


def _referent_pattern(referent: NoteRef | MeasureRef) -> NotePattern:
    if isinstance(referent, MeasureRef):
        return NotePattern(measure=eq(referent.measure))
    fields = {}
    if referent.pitch_class is not None:
        fields["pitch_class"] = eq(referent.pitch_class)
    if referent.measure is not None:
        fields["measure"] = eq(referent.measure)
    if referent.beat is not None:
        fields["beat"] = eq(referent.beat)
    return NotePattern(**fields)


def to_query(ast: CommandAST) -> tuple[NotePattern, OperationDescriptor]:
    """Turn a command parse into a note pattern and an operation."""
    if ast.action == "move":
        sign = -1 if ast.direction == "down" else 1
        return _referent_pattern(ast.referent), OperationDescriptor("transpose", semitones=sign * ast.magnitude)
    if ast.action == "invert":
        if ast.axis is not None:
            return _referent_pattern(ast.referent), OperationDescriptor("invertAt", axis_pitch=ast.axis)
        return _referent_pattern(ast.referent), OperationDescriptor("invert")
    if ast.action == "reverse":
        return _referent_pattern(ast.referent), OperationDescriptor("retrograde")
    if ast.action == "delete":
        kind = "deleteAndShift" if ast.delete_mode == "shift" else "deleteAsRest"
        return _referent_pattern(ast.referent), OperationDescriptor(kind)
    raise CommandParseError(f"no query for action {ast.action!r}")


def is_plural(ast: CommandAST) -> bool:
    if isinstance(ast.referent, MeasureRef):
        return True
    return bool(ast.referent is not None and ast.referent.plural)


def pattern_notation(pattern: NotePattern) -> str:
    """Compact constructor-style rendering of a note pattern."""
    if pattern.pitch_class.op == "eq":
        pitch = f"({PITCH_NAMES[pattern.pitch_class.value]}, _)"
    else:
        pitch = "_"
    if pattern.measure.op == "any" and pattern.beat.op == "any":
        onset = "_"
    else:
        measure = str(pattern.measure.value) if pattern.measure.op == "eq" else "_"
        beat = f"{pattern.beat.value:g}" if pattern.beat.op == "eq" else "_"
        onset = f"({measure},{beat})"
    return f"N({pitch}, _, {onset}, ...)"


def program_notation(pattern: NotePattern, desc: OperationDescriptor) -> str:
    """The code-style line echoed back for a translated command."""
    selection = f"select({pattern_notation(pattern)}, m)"
    if desc.kind == "transpose":
        return f"transpose({desc.semitones}, {selection})"
    if desc.kind == "invertAt":
        axis = desc.axis_pitch
        return f"invertAt(({PITCH_NAMES[axis.pitch_class]},{axis.octave}), {selection})"
    if desc.kind == "invert":
        return f"invert({selection})"
    if desc.kind == "retrograde":
        return f"retro({selection})"
    return f"{desc.kind}({selection})"
