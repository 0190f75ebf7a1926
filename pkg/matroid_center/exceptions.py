"""Exception types raised by the matroid center library.

Algorithmic outcomes such as an aborted guess or a failed matroid
intersection are returned as values. The exceptions below signal input
problems, caller bugs and resource limits.
"""


class MatroidCenterError(ValueError):
    """Base class for all library errors."""


class UnknownElementError(MatroidCenterError):
    """An oracle was queried with an element outside its ground set."""

    def __init__(self, element, oracle: str = "oracle"):
        self.element = element
        super().__init__(f"Element {element!r} is not in the ground set of the {oracle}")


class PreconditionError(MatroidCenterError):
    """A caller violated the documented precondition of an operation."""


class DegenerateInstanceError(MatroidCenterError):
    """The instance is too small for the requested computation."""


class MetricViolationError(MatroidCenterError):
    """An explicit distance matrix is not a metric.

    Attributes:
        witness: The offending index pair or triple
    """

    def __init__(self, message: str, witness: tuple[int, ...]):
        self.witness = witness
        super().__init__(message)


class MatroidAxiomError(MatroidCenterError):
    """An explicit family of independent sets is not a matroid.

    Attributes:
        witness: Independent sets I and J with |I| < |J| where no element of
            J outside I extends I
    """

    def __init__(self, message: str, witness: tuple[frozenset, frozenset]):
        self.witness = witness
        super().__init__(message)


class InstanceParseError(MatroidCenterError):
    """An instance or configuration file could not be parsed.

    Attributes:
        line: 1-based line number of the offending record, if known
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ResourceCapError(MatroidCenterError):
    """An exhaustive enumeration would exceed its configured cap."""

    def __init__(self, what: str, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"{what}: {size} elements exceed the enumeration cap of {cap}")


class InfeasibleInstanceError(MatroidCenterError):
    """Every guess aborted, no feasible solution was produced."""
