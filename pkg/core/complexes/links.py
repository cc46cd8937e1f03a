"""
Vertex links and the nonpositive curvature (flag) check.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Tuple

import networkx as nx

from ..dtos import LinkViolation, ValidationReport
from ..enums import LinkViolationKind
from ..exceptions import ComplexStructureError
from .cells import CubeComplex, DirectedEdge


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinkComplex:
    """
    Link of a vertex: edge-ends as vertices, square corners as edges and
    3-cube corners as triangles. Edge and triangle tuples are sorted.
    """
    vertex: str
    vertices: Tuple[DirectedEdge, ...]
    edges: Tuple[Tuple[DirectedEdge, DirectedEdge], ...]
    triangles: Tuple[Tuple[DirectedEdge, DirectedEdge, DirectedEdge], ...]

    def graph(self) -> nx.Graph:
        """Simple graph underlying the link (looped link edges dropped)."""
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from((a, b) for a, b in self.edges if a != b)
        return g

    def is_adjacent(self, first: DirectedEdge, second: DirectedEdge) -> bool:
        return tuple(sorted((first, second))) in self.edges


def link(c: CubeComplex, vertex: str) -> LinkComplex:
    if vertex not in set(c.vertices):
        raise ComplexStructureError(f"{c.name}: unknown vertex {vertex}")
    edges = sorted({inc.ends for inc in c.corner_incidences if inc.vertex == vertex})
    triangles = sorted({corner.ends for corner in c.cube_corners if corner.vertex == vertex})
    return LinkComplex(vertex, c.edge_ends(vertex), tuple(edges), tuple(triangles))


def _vertex_violations(c: CubeComplex, vertex: str, incidences, corners) -> List[LinkViolation]:
    violations: List[LinkViolation] = []

    by_pair: Dict[Tuple[DirectedEdge, ...], List[str]] = {}
    for inc in incidences:
        by_pair.setdefault(inc.ends, []).append(f"{inc.square}@{inc.corner[0]}{inc.corner[1]}")
    for ends, cells in sorted(by_pair.items()):
        if ends[0] == ends[1]:
            violations.append(LinkViolation(LinkViolationKind.LOOPED_LINK_EDGE, vertex, ends, tuple(cells)))
    for ends, cells in sorted(by_pair.items()):
        if len(cells) > 1:
            violations.append(LinkViolation(LinkViolationKind.DOUBLE_LINK_EDGE, vertex, ends, tuple(cells)))

    by_triple: Dict[Tuple[DirectedEdge, ...], List[str]] = {}
    for corner in corners:
        by_triple.setdefault(corner.ends, []).append(corner.cube)
    for ends, cells in sorted(by_triple.items()):
        if len(set(ends)) < 3:
            violations.append(
                LinkViolation(LinkViolationKind.DEGENERATE_LINK_TRIANGLE, vertex, ends, tuple(cells))
            )
    for ends, cells in sorted(by_triple.items()):
        if len(cells) > 1:
            violations.append(
                LinkViolation(LinkViolationKind.DOUBLE_LINK_TRIANGLE, vertex, ends, tuple(cells))
            )

    graph = nx.Graph()
    graph.add_nodes_from(c.edge_ends(vertex))
    graph.add_edges_from(ends for ends in by_pair if ends[0] != ends[1])
    filled = set(by_triple)
    for clique in nx.enumerate_all_cliques(graph):
        if len(clique) == 3:
            triple = tuple(sorted(clique))
            if triple not in filled:
                violations.append(LinkViolation(LinkViolationKind.EMPTY_TRIANGLE, vertex, triple))
        elif len(clique) == 4:
            # Filling would need a 4-cube.
            violations.append(
                LinkViolation(LinkViolationKind.UNFILLED_TETRAHEDRON, vertex, tuple(sorted(clique)))
            )
        elif len(clique) > 4:
            break

    def order(v: LinkViolation):
        return (list(LinkViolationKind).index(v.kind), v.ends)

    return sorted(violations, key=order)


def validate(c: CubeComplex) -> ValidationReport:
    """Check that every vertex link is a flag simplicial complex."""
    incidences: Dict[str, list] = {v: [] for v in c.vertices}
    for inc in c.corner_incidences:
        incidences[inc.vertex].append(inc)
    corners: Dict[str, list] = {v: [] for v in c.vertices}
    for corner in c.cube_corners:
        corners[corner.vertex].append(corner)

    violations: List[LinkViolation] = []
    for vertex in c.vertices:
        violations.extend(_vertex_violations(c, vertex, incidences[vertex], corners[vertex]))

    report = ValidationReport(
        complex_name=c.name,
        is_npc=not violations,
        cell_counts=c.cell_counts(),
        violations=violations,
    )
    logger.debug(f"validate {c.name}: npc={report.is_npc}, {len(violations)} violation(s)")
    return report


def naive_empty_triangles(c: CubeComplex, vertex: str) -> List[Tuple[DirectedEdge, ...]]:
    """Brute-force flag check over all triples of edge-ends."""
    lk = link(c, vertex)
    missing = []
    for triple in combinations(lk.vertices, 3):
        a, b, d = triple
        if lk.is_adjacent(a, b) and lk.is_adjacent(a, d) and lk.is_adjacent(b, d):
            if tuple(sorted(triple)) not in lk.triangles:
                missing.append(tuple(sorted(triple)))
    return missing
