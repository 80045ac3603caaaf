"""Power-weighted line betweenness and transient screening for power grids."""

from ._gridrank import (
    Case,
    ConvergenceError,
    DisconnectedError,
    Error,
    MappingError,
    ParseError,
    ResourceError,
    SchemaError,
    SingularError,
    ValidationError,
    analyse,
    rank,
    sensitivity,
    simulate,
    stats,
)

__all__ = [
    "Case",
    "ConvergenceError",
    "DisconnectedError",
    "Error",
    "MappingError",
    "ParseError",
    "ResourceError",
    "SchemaError",
    "SingularError",
    "ValidationError",
    "analyse",
    "rank",
    "sensitivity",
    "simulate",
    "stats",
]
