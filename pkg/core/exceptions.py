"""
Exception hierarchy for the cube complex toolkit.

Invalid input raises a ``CubexError`` (a ``ValueError``), so callers that
only care about "bad data" can keep catching ``ValueError``.
"""
from typing import Optional


class CubexError(ValueError):
    """Base class for every input/data error raised by the toolkit."""


class ComplexFormatError(CubexError):
    """Syntax error in a .cux/.map/.goc/certificate text."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ComplexStructureError(CubexError):
    """Dangling identifier, corner incompatibility or missing face."""


class MapError(CubexError):
    """A cubical map does not commute with the face structure."""


class NotLocalIsometryError(MapError):
    """A map required to be a local isometry is not one."""


class GraphOfComplexesError(CubexError):
    """Invalid graph of cube complexes datum."""


class MonodromyError(CubexError):
    """Edge isomorphisms fail their compatibility requirements."""


class ConstantStructureError(CubexError):
    """psi maps fail the constant vertex space compatibility."""


class RetractionError(CubexError):
    """The retraction onto a vertex space fails one of its checks."""


class CoverError(CubexError):
    """Invalid voltage data or cover request."""


class GroupOrderCapExceeded(CoverError):
    """Permutation group generated by voltages is larger than the cap."""

    def __init__(self, order: int, cap: int):
        self.order = order
        self.cap = cap
        super().__init__(f"Group order {order} exceeds cap {cap}")


class CertificateError(CubexError):
    """Malformed or mismatching specialness certificate."""


class WorkspaceError(CubexError):
    """Unresolvable name or duplicate definition in a workspace."""


class InternalInvariantError(RuntimeError):
    """A proven statement was contradicted: an implementation defect."""
