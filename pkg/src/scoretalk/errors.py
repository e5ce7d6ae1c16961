"""Exception types shared across the package."""


class ScoreTalkError(Exception):
    """Base class for every error raised by this package."""


class ModelError(ScoreTalkError):
    """Invalid or incomplete musical value."""


class IngestError(ScoreTalkError):
    """Input could not be parsed or converted."""


class QueryError(ScoreTalkError):
    """Selection could not be resolved against the current score."""


class StaleSelectionError(QueryError):
    """Selection was made against an older version of the score."""


class TransformError(ScoreTalkError):
    """Edit operation rejected; the score is left unchanged."""


class CommandParseError(ScoreTalkError):
    """Conversational command text could not be parsed.

    ``position`` is the character offset of the furthest point reached
    before parsing failed.
    """

    def __init__(self, message: str, position: int = 0):
        super().__init__(message)
        self.position = position


class SessionError(ScoreTalkError):
    """Session workflow violation."""
