"""
Cubical maps between cube complexes.

A map is given on vertices and on edges (the image of an edge is a directed
edge of the target, so the image of the reversed edge is the reversed
image). Square and 3-cube images are derived from boundary images. A
*collapsing* map may send an edge to ``None`` (its endpoints then share an
image); it is used only for retractions that crush the interval direction
of a thickened edge space.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Callable, Dict, List, Optional, Tuple

from ..dtos import LocalIsometryReport, LocalIsometryViolation
from ..enums import LocalIsometryFailure
from ..exceptions import ComplexStructureError, MapError
from .cells import Cube3, CubeComplex, DirectedEdge, Edge, Square, Subcomplex


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CubicalMap:
    source: CubeComplex
    target: CubeComplex
    vertex_map: Dict[str, str]
    edge_map: Dict[str, Optional[DirectedEdge]]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertex_map", dict(sorted(self.vertex_map.items())))
        object.__setattr__(self, "edge_map", dict(sorted(self.edge_map.items())))
        self._check_domain()
        self._check_endpoints()
        # Derive eagerly so an inconsistent map fails at construction.
        self.square_map
        self.cube_map

    def _check_domain(self) -> None:
        label = self.name or f"{self.source.name}->{self.target.name}"
        if set(self.vertex_map) != set(self.source.vertices):
            missing = sorted(set(self.source.vertices) - set(self.vertex_map))
            raise MapError(f"{label}: vertex map does not cover the source (missing {missing[:3]})")
        if set(self.edge_map) != set(self.source.edges):
            missing = sorted(set(self.source.edges) - set(self.edge_map))
            raise MapError(f"{label}: edge map does not cover the source (missing {missing[:3]})")
        targets = set(self.target.vertices)
        for vertex, image in self.vertex_map.items():
            if image not in targets:
                raise MapError(f"{label}: vertex {vertex} maps to unknown vertex {image}")
        for edge, image in self.edge_map.items():
            if image is not None and image.edge not in self.target.edges:
                raise MapError(f"{label}: edge {edge} maps to unknown edge {image.edge}")

    def _check_endpoints(self) -> None:
        for edge_id, edge in self.source.edges.items():
            image = self.edge_map[edge_id]
            start, end = self.vertex_map[edge.initial], self.vertex_map[edge.terminal]
            if image is None:
                if start != end:
                    raise MapError(f"{self.label}: collapsed edge {edge_id} has distinct endpoint images")
                continue
            if self.target.initial(image) != start or self.target.terminal(image) != end:
                raise MapError(f"{self.label}: endpoints of edge {edge_id} do not commute with the map")

    @property
    def label(self) -> str:
        return self.name or f"{self.source.name}->{self.target.name}"

    @property
    def is_collapsing(self) -> bool:
        return any(image is None for image in self.edge_map.values())

    def vertex(self, v: str) -> str:
        return self.vertex_map[v]

    def directed(self, d: DirectedEdge) -> Optional[DirectedEdge]:
        image = self.edge_map[d.edge]
        if image is None or d.forward:
            return image
        return image.reversed()

    def image_frame(self, frame: Square) -> Square:
        return frame.map_sides(self.directed)

    @cached_property
    def square_map(self) -> Dict[str, Optional[Tuple[str, int]]]:
        """Square id -> (target square, frame index); ``None`` when the square collapses."""
        result: Dict[str, Optional[Tuple[str, int]]] = {}
        for square_id, square in self.source.squares.items():
            images = [self.directed(side) for side in square.sides]
            if any(image is None for image in images):
                self._check_collapsed_square(square_id, images)
                result[square_id] = None
                continue
            found = self.target.find_square(Square(*images))
            if found is None:
                tokens = " ".join(image.token for image in images)
                raise MapError(f"{self.label}: square {square_id} has no image square ({tokens})")
            result[square_id] = found
        return result

    def _check_collapsed_square(self, square_id: str, images) -> None:
        bottom, right, top, left = images
        if right is None and left is None and bottom == top:
            return
        if bottom is None and top is None and left == right:
            return
        raise MapError(f"{self.label}: square {square_id} collapses inconsistently")

    @cached_property
    def cube_map(self) -> Dict[str, Optional[str]]:
        result: Dict[str, Optional[str]] = {}
        for cube_id, cube in self.source.cubes.items():
            if any(self.directed(corner) is None for corner in cube.corners):
                bottom, top = self.source.cube_frames(cube)
                if self.image_frame(bottom) != self.image_frame(top):
                    raise MapError(f"{self.label}: cube3 {cube_id} collapses inconsistently")
                result[cube_id] = None
                continue
            images = set()
            for _, vertex, ends in self.source.cube_corner_ends(cube):
                images.add(self.target.find_cube(self.vertex(vertex), [self.directed(d) for d in ends]))
            if len(images) != 1 or None in images:
                raise MapError(f"{self.label}: cube3 {cube_id} has no consistent image cube")
            result[cube_id] = images.pop()
        return result

    @property
    def key(self) -> Tuple:
        return (
            tuple(self.vertex_map.items()),
            tuple((e, d.token if d else None) for e, d in self.edge_map.items()),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, CubicalMap):
            return NotImplemented
        return (
            self.source.name == other.source.name
            and self.target.name == other.target.name
            and self.key == other.key
        )

    def __hash__(self) -> int:
        return hash((self.source.name, self.target.name, self.key))

    def __repr__(self) -> str:
        return f"CubicalMap({self.label})"

    def renamed(self, name: str) -> "CubicalMap":
        return CubicalMap(self.source, self.target, self.vertex_map, self.edge_map, name)


def identity(c: CubeComplex) -> CubicalMap:
    return CubicalMap(
        source=c,
        target=c,
        vertex_map={v: v for v in c.vertices},
        edge_map={e: DirectedEdge(e, True) for e in c.edges},
        name=f"id_{c.name}",
    )


def _same_complex(a: CubeComplex, b: CubeComplex) -> bool:
    return a is b or a == b


def compose(f: CubicalMap, g: CubicalMap, name: str = "") -> CubicalMap:
    """The composite ``g after f``."""
    if not _same_complex(f.target, g.source):
        raise MapError(f"Cannot compose {f.label} with {g.label}: {f.target.name} != {g.source.name}")
    edge_map = {}
    for edge_id, image in f.edge_map.items():
        edge_map[edge_id] = None if image is None else g.directed(image)
    return CubicalMap(
        source=f.source,
        target=g.target,
        vertex_map={v: g.vertex(image) for v, image in f.vertex_map.items()},
        edge_map=edge_map,
        name=name or f"{g.label}*{f.label}",
    )


def compose_all(maps: List[CubicalMap], name: str = "") -> CubicalMap:
    """Compose a chain applied left to right: ``maps[-1] after ... after maps[0]``."""
    result = maps[0]
    for step in maps[1:]:
        result = compose(result, step)
    return result.renamed(name) if name else result


def _is_bijective(mapping: Dict, codomain) -> bool:
    values = list(mapping.values())
    return len(set(values)) == len(values) and set(values) == set(codomain)


def is_isomorphism(f: CubicalMap) -> bool:
    if f.is_collapsing:
        return False
    if not _is_bijective(f.vertex_map, f.target.vertices):
        return False
    if not _is_bijective({e: d.edge for e, d in f.edge_map.items()}, f.target.edges):
        return False
    if not _is_bijective({s: image[0] for s, image in f.square_map.items()}, f.target.squares):
        return False
    if not _is_bijective(f.cube_map, f.target.cubes):
        return False
    try:
        _inverse_unchecked(f)
    except MapError:
        return False
    return True


def _inverse_unchecked(f: CubicalMap) -> CubicalMap:
    edge_map = {d.edge: DirectedEdge(e, d.forward) for e, d in f.edge_map.items()}
    return CubicalMap(
        source=f.target,
        target=f.source,
        vertex_map={image: v for v, image in f.vertex_map.items()},
        edge_map=edge_map,
        name=f"{f.label}^-1",
    )


def inverse(f: CubicalMap) -> CubicalMap:
    if not is_isomorphism(f):
        raise MapError(f"{f.label} is not an isomorphism")
    return _inverse_unchecked(f)


def check_local_isometry(f: CubicalMap) -> LocalIsometryReport:
    """
    Check that every induced link map is injective with full image.

    Fullness is tested on link edges (square corners) and link triangles
    (3-cube corners): if images span one in the target, the preimages must
    span one in the source.
    """
    source, target = f.source, f.target
    violations: List[LocalIsometryViolation] = []
    for vertex in source.vertices:
        ends = source.edge_ends(vertex)
        image_vertex = f.vertex(vertex)
        images = {d: f.directed(d) for d in ends}
        for d in ends:
            if images[d] is None:
                violations.append(LocalIsometryViolation(LocalIsometryFailure.COLLAPSED_EDGE, vertex, (d,)))
        live = [d for d in ends if images[d] is not None]
        for first, second in combinations(live, 2):
            if images[first] == images[second]:
                violations.append(
                    LocalIsometryViolation(LocalIsometryFailure.NOT_INJECTIVE, vertex, (first, second))
                )
                continue
            if target.consecutive(image_vertex, images[first], images[second]) and not source.consecutive(
                vertex, first, second
            ):
                violations.append(
                    LocalIsometryViolation(LocalIsometryFailure.NOT_FULL_EDGE, vertex, (first, second))
                )
        if target.cubes:
            for triple in combinations(live, 3):
                image_ends = [images[d] for d in triple]
                if len(set(image_ends)) < 3:
                    continue
                if target.find_cube(image_vertex, image_ends) and not source.find_cube(vertex, triple):
                    violations.append(
                        LocalIsometryViolation(LocalIsometryFailure.NOT_FULL_TRIANGLE, vertex, triple)
                    )
    return LocalIsometryReport(
        map_name=f.label,
        is_local_isometry=not violations,
        violations=violations,
    )


def is_local_isometry(f: CubicalMap) -> bool:
    return check_local_isometry(f).is_local_isometry


def is_embedding(f: CubicalMap) -> bool:
    """Injective on cells of every dimension."""
    if f.is_collapsing:
        return False
    checks = (
        list(f.vertex_map.values()),
        [d.edge for d in f.edge_map.values()],
        [image[0] for image in f.square_map.values()],
        list(f.cube_map.values()),
    )
    return all(len(set(images)) == len(images) for images in checks)


def embedding_witness(f: CubicalMap) -> str:
    """First pair of cells sharing an image, or an empty string."""
    seen: Dict[str, str] = {}
    for vertex, image in f.vertex_map.items():
        if image in seen:
            return f"vertices {seen[image]} and {vertex} both map to {image}"
        seen[image] = vertex
    seen = {}
    for edge_id, image in f.edge_map.items():
        if image is None:
            return f"edge {edge_id} collapses"
        if image.edge in seen:
            return f"edges {seen[image.edge]} and {edge_id} both map to {image.edge}"
        seen[image.edge] = edge_id
    seen = {}
    for square_id, image in f.square_map.items():
        if image[0] in seen:
            return f"squares {seen[image[0]]} and {square_id} both map to {image[0]}"
        seen[image[0]] = square_id
    return ""


def image_subcomplex(f: CubicalMap) -> Subcomplex:
    return Subcomplex(
        vertices=frozenset(f.vertex_map.values()),
        edges=frozenset(d.edge for d in f.edge_map.values() if d is not None),
        squares=frozenset(image[0] for image in f.square_map.values() if image is not None),
        cubes=frozenset(image for image in f.cube_map.values() if image is not None),
    )


def relabel(
    c: CubeComplex,
    rename: Callable[[str], str],
    name: str,
) -> Tuple[CubeComplex, CubicalMap]:
    """Copy of ``c`` with every identifier renamed, plus the isomorphism onto it."""
    def moved(d: DirectedEdge) -> DirectedEdge:
        return DirectedEdge(rename(d.edge), d.forward)

    copy = CubeComplex(
        name=name,
        vertices=tuple(rename(v) for v in c.vertices),
        edges={rename(e): Edge(rename(edge.initial), rename(edge.terminal)) for e, edge in c.edges.items()},
        squares={rename(s): square.map_sides(moved) for s, square in c.squares.items()},
        cubes={
            rename(k): Cube3(rename(cube.bottom), rename(cube.top), tuple(moved(d) for d in cube.corners), cube.top_frame)
            for k, cube in c.cubes.items()
        },
    )
    iso = CubicalMap(
        source=c,
        target=copy,
        vertex_map={v: rename(v) for v in c.vertices},
        edge_map={e: DirectedEdge(rename(e), True) for e in c.edges},
        name=f"{c.name}->{name}",
    )
    return copy, iso


def find_isomorphism(
    a: CubeComplex,
    b: CubeComplex,
    prefer: Optional[Callable[[str], str]] = None,
) -> Optional[CubicalMap]:
    """
    Backtracking isomorphism search.

    Vertices are visited component by component; each new edge is reached
    through an edge-end at an already mapped vertex. ``prefer`` names the
    candidate to try first for a cell, which makes relabeled copies linear.
    """
    if a.cell_counts() != b.cell_counts():
        return None
    if sorted(len(a.edge_ends(v)) for v in a.vertices) != sorted(len(b.edge_ends(v)) for v in b.vertices):
        return None

    squares_by_edge: Dict[str, List[str]] = {e: [] for e in a.edges}
    for square_id, square in a.squares.items():
        for edge_id in {side.edge for side in square.sides}:
            squares_by_edge[edge_id].append(square_id)

    vertex_map: Dict[str, str] = {}
    edge_map: Dict[str, DirectedEdge] = {}
    used_vertices: set = set()
    used_edges: set = set()

    def ordered(candidates, source_id):
        candidates = list(candidates)
        if prefer is None:
            return candidates
        wanted = prefer(source_id)
        return sorted(candidates, key=lambda item: (item if isinstance(item, str) else item.edge) != wanted)

    def squares_ok(edge_id: str) -> bool:
        for square_id in squares_by_edge[edge_id]:
            square = a.squares[square_id]
            if all(side.edge in edge_map for side in square.sides):
                image = square.map_sides(
                    lambda d: edge_map[d.edge] if d.forward else edge_map[d.edge].reversed()
                )
                if b.find_square(image) is None:
                    return False
        return True

    def next_edge_end() -> Optional[DirectedEdge]:
        for vertex in vertex_map:
            for d in a.edge_ends(vertex):
                if d.edge not in edge_map:
                    return d
        return None

    def extend() -> Optional[CubicalMap]:
        d = next_edge_end()
        if d is None:
            unmapped = [v for v in a.vertices if v not in vertex_map]
            if not unmapped:
                try:
                    candidate = CubicalMap(a, b, dict(vertex_map), dict(edge_map), f"{a.name}~{b.name}")
                except MapError:
                    return None
                return candidate if is_isomorphism(candidate) else None
            root = unmapped[0]
            for target in ordered([v for v in b.vertices if v not in used_vertices], root):
                if len(a.edge_ends(root)) != len(b.edge_ends(target)):
                    continue
                vertex_map[root] = target
                used_vertices.add(target)
                found = extend()
                if found:
                    return found
                del vertex_map[root]
                used_vertices.discard(target)
            return None

        start = vertex_map[a.initial(d)]
        end_vertex = a.terminal(d)
        for image_end in ordered([e for e in b.edge_ends(start) if e.edge not in used_edges], d.edge):
            image_terminal = b.terminal(image_end)
            if end_vertex in vertex_map:
                if vertex_map[end_vertex] != image_terminal:
                    continue
                new_vertex = False
            else:
                if image_terminal in used_vertices:
                    continue
                if len(a.edge_ends(end_vertex)) != len(b.edge_ends(image_terminal)):
                    continue
                vertex_map[end_vertex] = image_terminal
                used_vertices.add(image_terminal)
                new_vertex = True
            edge_map[d.edge] = image_end if d.forward else image_end.reversed()
            used_edges.add(image_end.edge)
            if squares_ok(d.edge):
                found = extend()
                if found:
                    return found
            del edge_map[d.edge]
            used_edges.discard(image_end.edge)
            if new_vertex:
                del vertex_map[end_vertex]
                used_vertices.discard(image_terminal)
        return None

    result = extend()
    logger.debug(f"find_isomorphism {a.name} -> {b.name}: {'found' if result else 'none'}")
    return result


def restrict_map(f: CubicalMap, sub_complex: CubeComplex) -> CubicalMap:
    """Restriction of ``f`` to a subcomplex given as a complex with the same ids."""
    missing = set(sub_complex.vertices) - set(f.source.vertices)
    if missing:
        raise ComplexStructureError(f"{sub_complex.name} is not a subcomplex of {f.source.name}")
    return CubicalMap(
        source=sub_complex,
        target=f.target,
        vertex_map={v: f.vertex_map[v] for v in sub_complex.vertices},
        edge_map={e: f.edge_map[e] for e in sub_complex.edges},
        name=f"{f.label}|{sub_complex.name}",
    )
