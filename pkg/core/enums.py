"""
Enums shared across the toolkit.
"""
from enum import Enum, IntEnum


class LinkViolationKind(str, Enum):
    """Ways a vertex link can fail to be a flag simplicial complex."""
    LOOPED_LINK_EDGE = "LOOPED_LINK_EDGE"
    DOUBLE_LINK_EDGE = "DOUBLE_LINK_EDGE"
    DEGENERATE_LINK_TRIANGLE = "DEGENERATE_LINK_TRIANGLE"
    DOUBLE_LINK_TRIANGLE = "DOUBLE_LINK_TRIANGLE"
    EMPTY_TRIANGLE = "EMPTY_TRIANGLE"
    UNFILLED_TETRAHEDRON = "UNFILLED_TETRAHEDRON"


class LocalIsometryFailure(str, Enum):
    """Reasons an induced link map is not an embedding with full image."""
    COLLAPSED_EDGE = "COLLAPSED_EDGE"
    NOT_INJECTIVE = "NOT_INJECTIVE"
    NOT_FULL_EDGE = "NOT_FULL_EDGE"
    NOT_FULL_TRIANGLE = "NOT_FULL_TRIANGLE"


class Pathology(str, Enum):
    """Hyperplane pathologies excluded by specialness."""
    NOT_NPC = "NOT_NPC"
    SELF_CROSSING = "SELF_CROSSING"
    ONE_SIDED = "ONE_SIDED"
    DIRECT_SELF_OSCULATION = "DIRECT_SELF_OSCULATION"
    INTER_OSCULATION = "INTER_OSCULATION"


class CellLayer(str, Enum):
    """Where a total-space cell comes from inside a thickened edge space."""
    BOTTOM = "BOTTOM"
    TOP = "TOP"
    PRISM = "PRISM"


class HyperplaneKind(str, Enum):
    VERTICAL = "VERTICAL"
    NON_VERTICAL = "NON_VERTICAL"


class Stage(str, Enum):
    """Stages of the specialization pipeline."""
    TRIVIALIZE = "TRIVIALIZE"
    CONSTANT = "CONSTANT"
    IMMERSIONS = "IMMERSIONS"
    VERTEX_COVER = "VERTEX_COVER"
    FIBER_PRODUCT = "FIBER_PRODUCT"
    VERIFY = "VERIFY"


class OutputFormat(str, Enum):
    TABULAR = "tabular"
    STRUCTURED = "structured"


class ExitCode(IntEnum):
    """Process exit codes of the cubex command."""
    OK = 0
    VERDICT_FAILED = 1
    INCONCLUSIVE = 2
    INVALID_INPUT = 3
    USAGE = 64
