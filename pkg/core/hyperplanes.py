"""
Hyperplanes as parallelism classes of edges, and specialness pathologies.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Set, Tuple

from networkx.utils import UnionFind

from .complexes.cells import CubeComplex, DirectedEdge, Subcomplex
from .complexes.links import validate
from .dtos import (
    EndPair,
    HyperplaneWitness,
    InterOsculation,
    OsculationFinding,
    PathologyReport,
    SpecialVerdict,
)
from .enums import Pathology
from .exceptions import ComplexStructureError


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Hyperplane:
    id: str
    edges: Tuple[str, ...]
    directed_classes: Tuple[Tuple[DirectedEdge, ...], ...]
    two_sided: bool

    def __contains__(self, edge: str) -> bool:
        return edge in self.edges


class HyperplaneStructure:
    """
    Undirected and directed parallelism closures of a complex.

    Elementary parallelism identifies bottom with top and left with right
    in every square; the directed closure identifies the directed edges
    themselves, so it separates the two sides of a 2-sided hyperplane.
    """

    def __init__(self, c: CubeComplex):
        self.complex = c
        undirected = UnionFind(c.edge_ids)
        directed = UnionFind(
            [DirectedEdge(e, True) for e in c.edge_ids] + [DirectedEdge(e, False) for e in c.edge_ids]
        )
        for square in c.squares.values():
            for first, second in ((square.bottom, square.top), (square.left, square.right)):
                undirected.union(first.edge, second.edge)
                directed.union(first, second)
                directed.union(first.reversed(), second.reversed())

        self._directed = directed
        classes = sorted((tuple(sorted(group)) for group in undirected.to_sets()), key=lambda g: g[0])
        self.hyperplanes: List[Hyperplane] = []
        self._by_edge: Dict[str, Hyperplane] = {}
        for edges in classes:
            hyperplane = self._build(edges)
            self.hyperplanes.append(hyperplane)
            for edge in edges:
                self._by_edge[edge] = hyperplane

    def _build(self, edges: Tuple[str, ...]) -> Hyperplane:
        groups: Dict[DirectedEdge, List[DirectedEdge]] = {}
        for edge in edges:
            for forward in (True, False):
                d = DirectedEdge(edge, forward)
                groups.setdefault(self._directed[d], []).append(d)
        directed_classes = tuple(sorted((tuple(sorted(g)) for g in groups.values()), key=lambda g: g[0]))
        mixed = any(d.reversed() in group for group in directed_classes for d in group)
        return Hyperplane(
            id=f"H:{edges[0]}",
            edges=edges,
            directed_classes=directed_classes,
            two_sided=len(directed_classes) == 2 and not mixed,
        )

    def of(self, edge: str) -> Hyperplane:
        return self._by_edge[edge]

    def directed_class(self, d: DirectedEdge) -> DirectedEdge:
        """Representative of the directed parallelism class of ``d``."""
        return self._directed[d]

    def same_directed_class(self, first: DirectedEdge, second: DirectedEdge) -> bool:
        return self._directed[first] == self._directed[second]


def compute_hyperplanes(c: CubeComplex) -> List[Hyperplane]:
    """Hyperplanes ordered by their smallest edge identifier."""
    return HyperplaneStructure(c).hyperplanes


def hyperplane_of(c: CubeComplex, edge: str) -> Hyperplane:
    if edge not in c.edges:
        raise ComplexStructureError(f"{c.name}: unknown edge {edge}")
    return HyperplaneStructure(c).of(edge)


def crossing_pairs(c: CubeComplex, structure: Optional[HyperplaneStructure] = None) -> Set[Tuple[str, str]]:
    """Pairs of distinct hyperplanes dual to the two directions of some square."""
    hs = structure or HyperplaneStructure(c)
    pairs = set()
    for square in c.squares.values():
        first, second = hs.of(square.bottom.edge).id, hs.of(square.left.edge).id
        if first != second:
            pairs.add(tuple(sorted((first, second))))
    return pairs


def _witness_key(witness: HyperplaneWitness):
    return (witness.hyperplane, witness.pair.vertex, witness.pair.first.sort_key, witness.pair.second.sort_key)


def detect_pathologies(
    c: CubeComplex,
    strict: bool = False,
    structure: Optional[HyperplaneStructure] = None,
) -> PathologyReport:
    """
    Scan every unordered pair of edge-ends at every vertex.

    A pair is consecutive when it is a corner pair of some square. With
    ``strict`` the same-directed-class requirement of direct self-osculation
    is dropped.
    """
    hs = structure or HyperplaneStructure(c)
    report = PathologyReport()
    report.one_sided = [h.id for h in hs.hyperplanes if not h.two_sided]
    crossings: Dict[Tuple[str, str], EndPair] = {}
    osculations: Dict[Tuple[str, str], EndPair] = {}

    for vertex in c.vertices:
        for first, second in combinations(c.edge_ends(vertex), 2):
            h1, h2 = hs.of(first.edge).id, hs.of(second.edge).id
            pair = EndPair(vertex, first, second)
            consecutive = c.consecutive(vertex, first, second)
            if h1 == h2:
                if consecutive:
                    report.self_crossings.append(HyperplaneWitness(h1, pair))
                elif strict or hs.same_directed_class(first, second):
                    report.direct_self_osculations.append(HyperplaneWitness(h1, pair))
            else:
                key = tuple(sorted((h1, h2)))
                target = crossings if consecutive else osculations
                target.setdefault(key, pair)

    report.self_crossings.sort(key=_witness_key)
    report.direct_self_osculations.sort(key=_witness_key)
    for key in sorted(set(crossings) & set(osculations)):
        report.inter_osculations.append(InterOsculation(key[0], key[1], crossings[key], osculations[key]))

    logger.debug(f"detect_pathologies {c.name}: {report.count} finding(s)")
    return report


def check_special(c: CubeComplex, strict: bool = False) -> SpecialVerdict:
    validation = validate(c)
    if not validation.is_npc:
        return SpecialVerdict(
            complex_name=c.name,
            special=False,
            pathology=Pathology.NOT_NPC,
            witness=validation.violations[0].describe(),
        )
    report = detect_pathologies(c, strict=strict)
    first = report.first_witness()
    if first is None:
        return SpecialVerdict(c.name, True, report=report)
    pathology, witness = first
    return SpecialVerdict(c.name, False, pathology, witness, report)


def subcomplex_osculation(
    c: CubeComplex,
    y: Subcomplex,
    structure: Optional[HyperplaneStructure] = None,
) -> List[OsculationFinding]:
    """
    For every hyperplane: the first edge of ``y`` dual to it, and every edge-end
    at a vertex of ``y`` whose edge lies outside ``y`` and is dual to it.
    """
    missing = y.missing_faces(c)
    if missing:
        raise ComplexStructureError(f"{c.name}: subcomplex is not face-closed: {missing[0]}")
    hs = structure or HyperplaneStructure(c)
    findings = []
    for hyperplane in hs.hyperplanes:
        crossing = next((e for e in hyperplane.edges if e in y.edges), None)
        osculations = [
            (vertex, d)
            for vertex in sorted(y.vertices)
            for d in c.edge_ends(vertex)
            if d.edge not in y.edges and hs.of(d.edge).id == hyperplane.id
        ]
        findings.append(OsculationFinding(hyperplane.id, crossing, osculations))
    return findings
