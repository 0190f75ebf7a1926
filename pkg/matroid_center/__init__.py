"""Small-space streaming algorithms for matroid center and its variants."""

from .config import RunConfig
from .exceptions import (
    DegenerateInstanceError,
    InfeasibleInstanceError,
    InstanceParseError,
    MatroidCenterError,
    MetricViolationError,
    PreconditionError,
    ResourceCapError,
    UnknownElementError,
)
from .instance import Instance, parse_instance
from .report import Report
from .runner import run

__all__ = [
    "DegenerateInstanceError",
    "InfeasibleInstanceError",
    "Instance",
    "InstanceParseError",
    "MatroidCenterError",
    "MetricViolationError",
    "PreconditionError",
    "Report",
    "ResourceCapError",
    "RunConfig",
    "UnknownElementError",
    "parse_instance",
    "run",
]
