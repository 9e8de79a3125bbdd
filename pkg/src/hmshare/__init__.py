"""Secret sharing with reusable shares built on hidden-multiplier encryption."""
from .errors import (
    DecodeError,
    DuplicateShare,
    GenerationFailed,
    InvalidGroupOrder,
    NotInvertible,
    ParameterError,
    SessionAborted,
)

__version__ = "0.1.0"

__all__ = [
    "DecodeError",
    "DuplicateShare",
    "GenerationFailed",
    "InvalidGroupOrder",
    "NotInvertible",
    "ParameterError",
    "SessionAborted",
]
