"""Score-level symbolic music with conversational editing.

The pieces compose as a pipeline: parse a MIDI/MusicXML/JSON file into
flat timed events, build the canonical Seq/Par tree, query it with
patterns, and edit the matches — driven either programmatically or by
the conversational command language through the CLI and HTTP service.
"""

from .errors import (
    CommandParseError,
    IngestError,
    ModelError,
    QueryError,
    ScoreTalkError,
    SessionError,
    StaleSelectionError,
    TransformError,
)
from .model import (
    Contexts,
    Duration,
    Music,
    Note,
    Onset,
    Par,
    Pitch,
    Rest,
    Scale,
    ScaleIndex,
    ScoreMeta,
    Seq,
    TimedEvent,
    absolute_beat,
    flatten,
    onset_from_absolute,
    pitch_from_number,
    pitch_number,
    scale_index_to_pitch,
)
from .normalform import normalize, renormalize
from .query import (
    FieldPattern,
    NotePattern,
    RestPattern,
    Selection,
    StructPattern,
    at_least,
    at_most,
    eq,
    gt,
    lt,
    match_leaf,
    one_of,
    resolve_paths,
    select,
)
from .session import Outcome, Session
from .transforms import OperationDescriptor, apply_operation

__version__ = "0.1.0"

__all__ = [
    "CommandParseError",
    "Contexts",
    "Duration",
    "FieldPattern",
    "IngestError",
    "ModelError",
    "Music",
    "Note",
    "NotePattern",
    "Onset",
    "OperationDescriptor",
    "Outcome",
    "Par",
    "Pitch",
    "QueryError",
    "Rest",
    "RestPattern",
    "Scale",
    "ScaleIndex",
    "ScoreMeta",
    "ScoreTalkError",
    "Selection",
    "Seq",
    "Session",
    "SessionError",
    "StaleSelectionError",
    "StructPattern",
    "TimedEvent",
    "TransformError",
    "absolute_beat",
    "apply_operation",
    "at_least",
    "at_most",
    "eq",
    "flatten",
    "gt",
    "lt",
    "match_leaf",
    "normalize",
    "one_of",
    "onset_from_absolute",
    "pitch_from_number",
    "pitch_number",
    "renormalize",
    "resolve_paths",
    "scale_index_to_pitch",
    "select",
]
