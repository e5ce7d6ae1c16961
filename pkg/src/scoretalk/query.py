"""Patterns with wildcards and predicates, and selection into score trees.

A pattern mirrors the shape of the value it matches: every scalar field
of a note or rest pattern is a ``FieldPattern`` (wildcard by default),
and structural patterns describe a contiguous run of children inside a
sequential or parallel group.  ``select`` walks a tree and returns paths
to everything that matched, so callers can edit the score in place.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import model
from .errors import QueryError, StaleSelectionError
from .model import BEAT_EPS, Music, Note, Par, Rest, Seq

Path = tuple[int, ...]


def _scalar_eq(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return abs(a - b) <= BEAT_EPS
    return a == b


@dataclass(frozen=True)
class FieldPattern:
    """Constraint on one scalar field: wildcard, constant, or predicate."""

    op: str = "any"  # any | eq | lt | gt | ge | le | in
    value: object = None

    def __post_init__(self):
        if self.op not in ("any", "eq", "lt", "gt", "ge", "le", "in"):
            raise QueryError(f"unknown field pattern {self.op!r}")

    def matches(self, x) -> bool:
        if self.op == "any":
            return True
        if x is None:
            return False
        if self.op == "eq":
            return _scalar_eq(x, self.value)
        if self.op == "in":
            return any(_scalar_eq(x, v) for v in self.value)
        if self.op == "lt":
            return x < self.value
        if self.op == "gt":
            return x > self.value
        if self.op == "ge":
            return x >= self.value
        return x <= self.value


ANY = FieldPattern()


def eq(value) -> FieldPattern:
    return FieldPattern("eq", value)


def lt(value) -> FieldPattern:
    return FieldPattern("lt", value)


def gt(value) -> FieldPattern:
    return FieldPattern("gt", value)


def at_least(value) -> FieldPattern:
    return FieldPattern("ge", value)


def at_most(value) -> FieldPattern:
    return FieldPattern("le", value)


def one_of(*values) -> FieldPattern:
    return FieldPattern("in", tuple(values))


@dataclass(frozen=True)
class NotePattern:
    pitch_class: FieldPattern = ANY
    octave: FieldPattern = ANY
    duration: FieldPattern = ANY
    measure: FieldPattern = ANY
    beat: FieldPattern = ANY
    required_labels: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "required_labels", frozenset(self.required_labels))


@dataclass(frozen=True)
class RestPattern:
    duration: FieldPattern = ANY
    measure: FieldPattern = ANY
    beat: FieldPattern = ANY
    required_labels: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "required_labels", frozenset(self.required_labels))


@dataclass(frozen=True)
class StructPattern:
    kind: str  # "seq" | "par"
    child_patterns: tuple = ()
    required_labels: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.kind not in ("seq", "par"):
            raise QueryError("structural pattern kind must be 'seq' or 'par'")
        object.__setattr__(self, "child_patterns", tuple(self.child_patterns))
        object.__setattr__(self, "required_labels", frozenset(self.required_labels))
        if not self.child_patterns:
            raise QueryError("structural pattern needs at least one child pattern")


Pattern = NotePattern | RestPattern | StructPattern


@dataclass
class Run:
    """One structural match: a contiguous child range of a group node."""

    path: Path
    start: int
    length: int


@dataclass
class Selection:
    """Addressable references into a score: leaf paths in document order,
    plus matched child ranges for structural queries."""

    score_version: int = 0
    hits: list[Path] = field(default_factory=list)
    runs: list[Run] = field(default_factory=list)


def match_leaf(pattern: NotePattern | RestPattern, leaf: Note | Rest) -> bool:
    """True when every constrained field holds on the leaf and the leaf
    carries all required labels.  Note patterns never match rests."""
    if isinstance(pattern, NotePattern):
        if not isinstance(leaf, Note):
            return False
        pitch = leaf.pitch if leaf.pitch is not None else model.Pitch()
        onset = leaf.onset if leaf.onset is not None else model.Onset()
        duration = leaf.duration.beats if leaf.duration is not None else None
        return (
            pattern.pitch_class.matches(pitch.pitch_class)
            and pattern.octave.matches(pitch.octave)
            and pattern.duration.matches(duration)
            and pattern.measure.matches(onset.measure)
            and pattern.beat.matches(onset.beat)
            and pattern.required_labels <= leaf.contexts.labels
        )
    if isinstance(pattern, RestPattern):
        if not isinstance(leaf, Rest):
            return False
        onset = leaf.onset if leaf.onset is not None else model.Onset()
        duration = leaf.duration.beats if leaf.duration is not None else None
        return (
            pattern.duration.matches(duration)
            and pattern.measure.matches(onset.measure)
            and pattern.beat.matches(onset.beat)
            and pattern.required_labels <= leaf.contexts.labels
        )
    raise QueryError("not a leaf pattern")


def _matches_child(pattern, child: Music) -> bool:
    if isinstance(pattern, (NotePattern, RestPattern)):
        return isinstance(child, (Note, Rest)) and match_leaf(pattern, child)
    if isinstance(pattern, StructPattern):
        if not _kind_matches(pattern, child):
            return False
        if len(child.children) != len(pattern.child_patterns):
            return False
        return all(_matches_child(p, c) for p, c in zip(pattern.child_patterns, child.children))
    raise QueryError("not a pattern")


def _kind_matches(pattern: StructPattern, node: Music) -> bool:
    wanted = Seq if pattern.kind == "seq" else Par
    return isinstance(node, wanted) and pattern.required_labels <= node.contexts.labels


def select(pattern: Pattern, m: Music, version: int = 0) -> Selection:
    """All matches of a pattern in a tree.

    Leaf patterns list every matching leaf.  Structural patterns list
    leftmost-greedy, non-overlapping child runs per node, and the hits
    additionally include every leaf inside a matched run.
    """
    sel = Selection(score_version=version)
    if isinstance(pattern, (NotePattern, RestPattern)):
        sel.hits = [path for path, leaf in model.iter_leaves(m) if match_leaf(pattern, leaf)]
        return sel
    if not isinstance(pattern, StructPattern):
        raise QueryError("not a pattern")
    seen: set[Path] = set()
    for path, node in model.iter_nodes(m):
        if not isinstance(node, (Seq, Par)) or not _kind_matches(pattern, node):
            continue
        width = len(pattern.child_patterns)
        i = 0
        while i + width <= len(node.children):
            window = node.children[i : i + width]
            if all(_matches_child(p, c) for p, c in zip(pattern.child_patterns, window)):
                sel.runs.append(Run(path, i, width))
                for j in range(width):
                    for sub_path, _ in model.iter_leaves(node.children[i + j]):
                        seen.add(path + (i + j,) + sub_path)
                i += width
            else:
                i += 1
    sel.hits = sorted(seen)
    return sel


def resolve_paths(sel: Selection, m: Music, current_version: int | None = None) -> list[Note | Rest]:
    """The leaves a selection addresses, for in-place update."""
    if current_version is not None and sel.score_version != current_version:
        raise StaleSelectionError("stale selection")
    out = []
    for path in sel.hits:
        node = model.node_at(m, path)
        if not isinstance(node, (Note, Rest)):
            raise QueryError("invalid path")
        out.append(node)
    return out


_FIELD_OPS = {"eq": "eq", "lt": "lt", "gt": "gt", "ge": "ge", "le": "le", "in": "in"}


def _field_to_json(fp: FieldPattern):
    if fp.op == "any":
        return None
    if fp.op == "eq":
        return fp.value
    if fp.op == "in":
        return {"in": list(fp.value)}
    return {fp.op: fp.value}


def _field_from_json(obj) -> FieldPattern:
    if isinstance(obj, dict):
        if len(obj) != 1:
            raise QueryError("field predicate must have exactly one operator")
        op, value = next(iter(obj.items()))
        if op not in _FIELD_OPS:
            raise QueryError(f"unknown field predicate {op!r}")
        if op == "in":
            return one_of(*value)
        return FieldPattern(op, value)
    return eq(obj)


_NOTE_KEYS = {"pc": "pitch_class", "oct": "octave", "dur": "duration", "measure": "measure", "beat": "beat"}
_REST_KEYS = {"dur": "duration", "measure": "measure", "beat": "beat"}


def pattern_to_json(pattern: Pattern) -> dict:
    """Wire encoding: absent keys mean wildcard, ``{"gt": 3}`` objects
    encode predicates."""
    if isinstance(pattern, NotePattern):
        body = {}
        for key, attr in _NOTE_KEYS.items():
            encoded = _field_to_json(getattr(pattern, attr))
            if encoded is not None:
                body[key] = encoded
        if pattern.required_labels:
            body["labels"] = sorted(pattern.required_labels)
        return {"note": body}
    if isinstance(pattern, RestPattern):
        body = {}
        for key, attr in _REST_KEYS.items():
            encoded = _field_to_json(getattr(pattern, attr))
            if encoded is not None:
                body[key] = encoded
        if pattern.required_labels:
            body["labels"] = sorted(pattern.required_labels)
        return {"rest": body}
    body = {"children": [pattern_to_json(p) for p in pattern.child_patterns]}
    if pattern.required_labels:
        body["labels"] = sorted(pattern.required_labels)
    return {pattern.kind: body}


def pattern_from_json(obj: dict) -> Pattern:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise QueryError("pattern object must have exactly one top-level key")
    kind, body = next(iter(obj.items()))
    if not isinstance(body, dict):
        raise QueryError("pattern body must be an object")
    if kind == "note":
        fields = {}
        for key, attr in _NOTE_KEYS.items():
            if key in body:
                fields[attr] = _field_from_json(body[key])
        return NotePattern(**fields, required_labels=frozenset(body.get("labels", ())))
    if kind == "rest":
        fields = {}
        for key, attr in _REST_KEYS.items():
            if key in body:
                fields[attr] = _field_from_json(body[key])
        return RestPattern(**fields, required_labels=frozenset(body.get("labels", ())))
    if kind in ("seq", "par"):
        children = tuple(pattern_from_json(c) for c in body.get("children", ()))
        return StructPattern(kind, children, frozenset(body.get("labels", ())))
    raise QueryError(f"unknown pattern kind {kind!r}")
