"""
Data Transfer Objects (DTOs) for reports, verdicts and witnesses.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .complexes.cells import DirectedEdge
from .enums import LinkViolationKind, LocalIsometryFailure, Pathology, Stage


def _tokens(ends) -> List[str]:
    return [d.token for d in ends]


@dataclass
class LinkViolation:
    """A failure of the flag condition in the link of ``vertex``."""
    kind: LinkViolationKind
    vertex: str
    ends: Tuple[DirectedEdge, ...]
    cells: Tuple[str, ...] = ()

    def describe(self) -> str:
        cells = f" [{', '.join(self.cells)}]" if self.cells else ""
        return f"{self.kind.value} at {self.vertex}: {' '.join(_tokens(self.ends))}{cells}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "vertex": self.vertex,
            "ends": _tokens(self.ends),
            "cells": list(self.cells),
        }


@dataclass
class ValidationReport:
    complex_name: str
    is_npc: bool
    cell_counts: Tuple[int, int, int, int]
    violations: List[LinkViolation] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "complex": self.complex_name,
            "npc": self.is_npc,
            "cells": list(self.cell_counts),
            "violations": [v.to_dict() for v in self.violations],
        }


@dataclass
class LocalIsometryViolation:
    kind: LocalIsometryFailure
    vertex: str
    ends: Tuple[DirectedEdge, ...]

    def describe(self) -> str:
        return f"{self.kind.value} at {self.vertex}: {' '.join(_tokens(self.ends))}"

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "vertex": self.vertex, "ends": _tokens(self.ends)}


@dataclass
class LocalIsometryReport:
    map_name: str
    is_local_isometry: bool
    violations: List[LocalIsometryViolation] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "map": self.map_name,
            "local_isometry": self.is_local_isometry,
            "violations": [v.to_dict() for v in self.violations],
        }


@dataclass(frozen=True)
class EndPair:
    """Two edge-ends at a common vertex; ``first < second``."""
    vertex: str
    first: DirectedEdge
    second: DirectedEdge

    @property
    def tokens(self) -> Tuple[str, str]:
        return (self.first.token, self.second.token)

    def describe(self) -> str:
        return f"({self.vertex}; {self.first.token}, {self.second.token})"


@dataclass(frozen=True)
class HyperplaneWitness:
    hyperplane: str
    pair: EndPair

    def describe(self) -> str:
        return f"{self.hyperplane} at {self.pair.describe()}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hyperplane": self.hyperplane,
            "vertex": self.pair.vertex,
            "ends": list(self.pair.tokens),
        }


@dataclass(frozen=True)
class InterOsculation:
    first: str
    second: str
    crossing: EndPair
    osculation: EndPair

    def describe(self) -> str:
        return (
            f"{self.first} and {self.second} cross at {self.crossing.describe()} "
            f"and osculate at {self.osculation.describe()}"
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hyperplanes": [self.first, self.second],
            "crossing": {"vertex": self.crossing.vertex, "ends": list(self.crossing.tokens)},
            "osculation": {"vertex": self.osculation.vertex, "ends": list(self.osculation.tokens)},
        }


@dataclass
class PathologyReport:
    self_crossings: List[HyperplaneWitness] = field(default_factory=list)
    one_sided: List[str] = field(default_factory=list)
    direct_self_osculations: List[HyperplaneWitness] = field(default_factory=list)
    inter_osculations: List[InterOsculation] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not (
            self.self_crossings or self.one_sided
            or self.direct_self_osculations or self.inter_osculations
        )

    @property
    def count(self) -> int:
        return (
            len(self.self_crossings) + len(self.one_sided)
            + len(self.direct_self_osculations) + len(self.inter_osculations)
        )

    def first_witness(self) -> Optional[Tuple[Pathology, str]]:
        if self.self_crossings:
            return Pathology.SELF_CROSSING, self.self_crossings[0].describe()
        if self.one_sided:
            return Pathology.ONE_SIDED, f"{self.one_sided[0]} is 1-sided"
        if self.direct_self_osculations:
            return Pathology.DIRECT_SELF_OSCULATION, self.direct_self_osculations[0].describe()
        if self.inter_osculations:
            return Pathology.INTER_OSCULATION, self.inter_osculations[0].describe()
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "self_crossings": [w.to_dict() for w in self.self_crossings],
            "one_sided": list(self.one_sided),
            "direct_self_osculations": [w.to_dict() for w in self.direct_self_osculations],
            "inter_osculations": [w.to_dict() for w in self.inter_osculations],
        }


@dataclass
class SpecialVerdict:
    complex_name: str
    special: bool
    pathology: Optional[Pathology] = None
    witness: str = ""
    report: Optional[PathologyReport] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "complex": self.complex_name,
            "special": self.special,
            "pathology": self.pathology.value if self.pathology else None,
            "witness": self.witness,
        }


@dataclass
class OsculationFinding:
    """How one hyperplane meets a subcomplex ``Y``."""
    hyperplane: str
    crossing_edge: Optional[str]
    osculations: List[Tuple[str, DirectedEdge]] = field(default_factory=list)

    @property
    def crosses(self) -> bool:
        return self.crossing_edge is not None

    @property
    def inter_osculates(self) -> bool:
        return self.crosses and bool(self.osculations)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hyperplane": self.hyperplane,
            "crossing_edge": self.crossing_edge,
            "osculations": [[v, d.token] for v, d in self.osculations],
            "inter_osculates": self.inter_osculates,
        }


@dataclass
class EdgeHypothesisResult:
    edge: str
    embedded: bool
    embedding_witness: str = ""
    inter_osculations: List[OsculationFinding] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.embedded and not self.inter_osculations


@dataclass
class CorollaryReport:
    passed: bool
    edges: List[EdgeHypothesisResult] = field(default_factory=list)

    def failures(self) -> List[str]:
        messages = []
        for result in self.edges:
            if not result.embedded:
                messages.append(f"{result.edge}: not an embedding ({result.embedding_witness})")
            for finding in result.inter_osculations:
                messages.append(
                    f"{result.edge}: {finding.hyperplane} crosses at {finding.crossing_edge} "
                    f"and osculates at {finding.osculations[0][0]} {finding.osculations[0][1].token}"
                )
        return messages


@dataclass
class ElevationFinding:
    edge: str
    component: int
    degree: int
    embedded: bool
    inter_osculations: int


@dataclass
class GoodCoverSearchResult:
    cover: Optional[Any] = None
    elevations: List[ElevationFinding] = field(default_factory=list)
    budget_exhausted: bool = False
    candidates_tried: int = 0

    @property
    def success(self) -> bool:
        return self.cover is not None and not self.budget_exhausted


@dataclass
class Inconclusive:
    """The pipeline stopped without a certificate."""
    stage: Stage
    reason: str
    transcript: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"stage": self.stage.value, "reason": self.reason, "transcript": list(self.transcript)}
