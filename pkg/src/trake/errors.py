"""Exception types shared across the package.

Every error carries a stable ``code`` string; the HTTP layer maps codes to
status codes in one table, and the CLI prints them as diagnostics.
"""

from __future__ import annotations


class TrakeError(Exception):
    """Base class for all domain errors."""

    code = "TrakeError"


# --- catalog ---------------------------------------------------------------

class DuplicateVideo(TrakeError):
    code = "DuplicateVideo"


class EmptyScene(TrakeError):
    code = "EmptyScene"


class NonMonotonicFrames(TrakeError):
    code = "NonMonotonicFrames"


class UnknownVideo(TrakeError):
    code = "UnknownVideo"


class UnknownKeyframe(TrakeError):
    code = "UnknownKeyframe"

    def __init__(self, ids):
        self.ids = list(ids)
        super().__init__(f"unknown keyframe id(s): {self.ids}")


class CatalogFrozen(TrakeError):
    code = "CatalogFrozen"


# --- ingest ----------------------------------------------------------------

class InvalidRange(TrakeError):
    code = "InvalidRange"


class MissingEmbedding(TrakeError):
    code = "MissingEmbedding"


class DanglingRecord(TrakeError):
    code = "DanglingRecord"


class DimensionMismatch(TrakeError):
    code = "DimensionMismatch"


# --- embeddings ------------------------------------------------------------

class ZeroVector(TrakeError):
    code = "ZeroVector"


class EmptyInput(TrakeError):
    code = "EmptyInput"


# --- indexes ---------------------------------------------------------------

class EmptyStore(TrakeError):
    code = "EmptyStore"


class EmptyIndex(TrakeError):
    code = "EmptyIndex"


class EmptyQuery(TrakeError):
    code = "EmptyQuery"


# --- alignment -------------------------------------------------------------

class InfeasibleAlignment(TrakeError):
    code = "InfeasibleAlignment"


class InvalidSpan(TrakeError):
    code = "InvalidSpan"


class NoFeasibleVideo(TrakeError):
    code = "NoFeasibleVideo"


class TooLarge(TrakeError):
    code = "TooLarge"


# --- quest -----------------------------------------------------------------

class UnknownExemplar(TrakeError):
    code = "UnknownExemplar"


# --- api -------------------------------------------------------------------

class BadRequest(TrakeError):
    code = "BadRequest"
