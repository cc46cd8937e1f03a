"""
Cells and finite cube complexes of dimension at most 3.

A square is stored with a chosen parametrization ("frame"): bottom, right,
top, left directed edges as in the attaching map of ``[0,1]^2``. A 3-cube is
stored as a bottom square, a top square and the four corner edges joining
corresponding corners; the top square may be used in any of its eight
dihedral frames, recorded in ``Cube3.top_frame``.
"""
import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx

from ..exceptions import ComplexStructureError


logger = logging.getLogger(__name__)

Corner = Tuple[int, int]
CORNERS: Tuple[Corner, ...] = ((0, 0), (1, 0), (0, 1), (1, 1))


@dataclass(frozen=True)
class DirectedEdge:
    """An edge with a chosen direction; ``forward`` is the intrinsic one."""
    edge: str
    forward: bool = True

    def reversed(self) -> "DirectedEdge":
        return DirectedEdge(self.edge, not self.forward)

    @property
    def token(self) -> str:
        return f"{self.edge}{'+' if self.forward else '-'}"

    @property
    def sort_key(self) -> Tuple[str, bool]:
        return (self.edge, not self.forward)

    def __lt__(self, other: "DirectedEdge") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return self.token

    @classmethod
    def from_token(cls, token: str) -> "DirectedEdge":
        if len(token) < 2 or token[-1] not in "+-":
            raise ValueError(f"Bad directed edge token: {token!r}")
        return cls(token[:-1], token[-1] == "+")


@dataclass(frozen=True)
class Edge:
    initial: str
    terminal: str

    @property
    def is_loop(self) -> bool:
        return self.initial == self.terminal


@dataclass(frozen=True)
class Square:
    """Boundary of a parametrized square ``s: [0,1]^2 -> X``."""
    bottom: DirectedEdge
    right: DirectedEdge
    top: DirectedEdge
    left: DirectedEdge

    @property
    def sides(self) -> Tuple[DirectedEdge, DirectedEdge, DirectedEdge, DirectedEdge]:
        return (self.bottom, self.right, self.top, self.left)

    @property
    def tokens(self) -> Tuple[str, str, str, str]:
        return tuple(d.token for d in self.sides)

    def flip_x(self) -> "Square":
        return Square(self.bottom.reversed(), self.left, self.top.reversed(), self.right)

    def flip_y(self) -> "Square":
        return Square(self.top, self.right.reversed(), self.bottom, self.left.reversed())

    def transpose(self) -> "Square":
        return Square(self.left, self.top, self.right, self.bottom)

    def frames(self) -> Tuple["Square", ...]:
        """The eight dihedral reparametrizations, frame 0 being ``self``."""
        flipped = (self, self.flip_x(), self.flip_y(), self.flip_y().flip_x())
        return flipped + tuple(f.transpose() for f in flipped)

    def reframe(self, k: int) -> "Square":
        return self.frames()[k]

    def corner_ends(self, corner: Corner) -> Tuple[DirectedEdge, DirectedEdge]:
        """The two edge-ends leaving the given corner, in frame order."""
        if corner == (0, 0):
            return (self.bottom, self.left)
        if corner == (1, 0):
            return (self.bottom.reversed(), self.right)
        if corner == (0, 1):
            return (self.left.reversed(), self.top)
        return (self.top.reversed(), self.right.reversed())

    def map_sides(self, image) -> "Square":
        return Square(*(image(d) for d in self.sides))


@dataclass(frozen=True)
class Cube3:
    bottom: str
    top: str
    corners: Tuple[DirectedEdge, DirectedEdge, DirectedEdge, DirectedEdge]
    # None until resolved by the owning complex.
    top_frame: Optional[int] = None

    def corner_edge(self, corner: Corner) -> DirectedEdge:
        return self.corners[CORNERS.index(corner)]


@dataclass(frozen=True)
class CornerIncidence:
    """A corner of a square, seen as a link edge at ``vertex``."""
    vertex: str
    ends: Tuple[DirectedEdge, DirectedEdge]
    square: str
    corner: Corner


@dataclass(frozen=True)
class CubeCorner:
    """A corner of a 3-cube, seen as a link triangle at ``vertex``."""
    vertex: str
    ends: Tuple[DirectedEdge, DirectedEdge, DirectedEdge]
    cube: str
    corner: Tuple[int, int, int]


@dataclass(frozen=True)
class CubeComplex:
    """
    Finite cube complex with explicit face incidences.

    Construction resolves every face reference and checks square corner
    compatibility; nonpositive curvature is checked separately by
    ``links.validate``.
    """
    name: str
    vertices: Tuple[str, ...]
    edges: Dict[str, Edge]
    squares: Dict[str, Square] = field(default_factory=dict)
    cubes: Dict[str, Cube3] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ComplexStructureError(f"{self.name}: duplicate vertex identifiers")
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))
        object.__setattr__(self, "edges", dict(sorted(self.edges.items())))
        object.__setattr__(self, "squares", dict(sorted(self.squares.items())))
        self._check_edges()
        self._check_squares()
        object.__setattr__(self, "cubes", {
            cube_id: self._resolve_cube(cube_id, cube)
            for cube_id, cube in sorted(self.cubes.items())
        })

    # --- Construction checks ---

    def _check_edges(self) -> None:
        known = set(self.vertices)
        for edge_id, edge in self.edges.items():
            for endpoint in (edge.initial, edge.terminal):
                if endpoint not in known:
                    raise ComplexStructureError(
                        f"{self.name}: edge {edge_id} references unknown vertex {endpoint}"
                    )

    def _check_squares(self) -> None:
        for square_id, square in self.squares.items():
            for side in square.sides:
                if side.edge not in self.edges:
                    raise ComplexStructureError(
                        f"{self.name}: square {square_id} references unknown edge {side.edge}"
                    )
            bottom, right, top, left = square.sides
            checks = (
                (self.initial(bottom), self.initial(left), "initial(bottom) != initial(left)"),
                (self.terminal(bottom), self.initial(right), "terminal(bottom) != initial(right)"),
                (self.terminal(left), self.initial(top), "terminal(left) != initial(top)"),
                (self.terminal(right), self.terminal(top), "terminal(right) != terminal(top)"),
            )
            for a, b, message in checks:
                if a != b:
                    raise ComplexStructureError(
                        f"{self.name}: square {square_id} corner incompatibility: {message}"
                    )

    def _resolve_cube(self, cube_id: str, cube: Cube3) -> Cube3:
        for square_id in (cube.bottom, cube.top):
            if square_id not in self.squares:
                raise ComplexStructureError(
                    f"{self.name}: cube3 {cube_id} references unknown square {square_id}"
                )
        for corner_edge in cube.corners:
            if corner_edge.edge not in self.edges:
                raise ComplexStructureError(
                    f"{self.name}: cube3 {cube_id} references unknown edge {corner_edge.edge}"
                )
        candidates = range(8) if cube.top_frame is None else (cube.top_frame,)
        for k in candidates:
            resolved = replace(cube, top_frame=k)
            if self._cube_is_consistent(resolved):
                return resolved
        raise ComplexStructureError(
            f"{self.name}: cube3 {cube_id} has no consistent top frame or a missing side square"
        )

    def _cube_is_consistent(self, cube: Cube3) -> bool:
        bottom, top = self.cube_frames(cube)
        for corner in CORNERS:
            corner_edge = cube.corner_edge(corner)
            if self.initial(corner_edge) != self.corner_vertex(bottom, corner):
                return False
            if self.terminal(corner_edge) != self.corner_vertex(top, corner):
                return False
        return all(self.find_square(side) is not None for side in self.cube_side_frames(cube))

    # --- Incidence ---

    def initial(self, d: DirectedEdge) -> str:
        edge = self.edges[d.edge]
        return edge.initial if d.forward else edge.terminal

    def terminal(self, d: DirectedEdge) -> str:
        edge = self.edges[d.edge]
        return edge.terminal if d.forward else edge.initial

    def corner_vertex(self, frame: Square, corner: Corner) -> str:
        return self.initial(frame.corner_ends(corner)[0])

    @property
    def edge_ids(self) -> Tuple[str, ...]:
        return tuple(self.edges)

    @property
    def square_ids(self) -> Tuple[str, ...]:
        return tuple(self.squares)

    @property
    def cube_ids(self) -> Tuple[str, ...]:
        return tuple(self.cubes)

    @cached_property
    def _edge_ends(self) -> Dict[str, Tuple[DirectedEdge, ...]]:
        ends: Dict[str, List[DirectedEdge]] = {v: [] for v in self.vertices}
        for edge_id, edge in self.edges.items():
            ends[edge.initial].append(DirectedEdge(edge_id, True))
            ends[edge.terminal].append(DirectedEdge(edge_id, False))
        return {v: tuple(sorted(items)) for v, items in ends.items()}

    def edge_ends(self, vertex: str) -> Tuple[DirectedEdge, ...]:
        """Directed edges with initial vertex ``vertex``, sorted by (edge id, direction)."""
        return self._edge_ends[vertex]

    def cube_frames(self, cube: Cube3) -> Tuple[Square, Square]:
        top_frame = cube.top_frame or 0
        return self.squares[cube.bottom], self.squares[cube.top].reframe(top_frame)

    def cube_side_frames(self, cube: Cube3) -> Tuple[Square, Square, Square, Square]:
        bottom, top = self.cube_frames(cube)
        e00, e10, e01, e11 = cube.corners
        return (
            Square(bottom.bottom, e10, top.bottom, e00),
            Square(bottom.top, e11, top.top, e01),
            Square(bottom.left, e01, top.left, e00),
            Square(bottom.right, e11, top.right, e10),
        )

    def cube_corner_ends(self, cube: Cube3) -> List[Tuple[Tuple[int, int, int], str, Tuple[DirectedEdge, ...]]]:
        """Link triangles of a 3-cube: one triple of edge-ends per corner."""
        bottom, top = self.cube_frames(cube)
        result = []
        for corner in CORNERS:
            corner_edge = cube.corner_edge(corner)
            result.append((
                corner + (0,),
                self.corner_vertex(bottom, corner),
                bottom.corner_ends(corner) + (corner_edge,),
            ))
            result.append((
                corner + (1,),
                self.corner_vertex(top, corner),
                top.corner_ends(corner) + (corner_edge.reversed(),),
            ))
        return result

    @cached_property
    def corner_incidences(self) -> Tuple[CornerIncidence, ...]:
        incidences = []
        for square_id, square in self.squares.items():
            for corner in CORNERS:
                ends = square.corner_ends(corner)
                incidences.append(CornerIncidence(
                    vertex=self.initial(ends[0]),
                    ends=tuple(sorted(ends)),
                    square=square_id,
                    corner=corner,
                ))
        return tuple(incidences)

    @cached_property
    def corner_pairs(self) -> FrozenSet[Tuple[str, FrozenSet[DirectedEdge]]]:
        """(vertex, {end, end}) for every square corner: the consecutive pairs."""
        return frozenset((inc.vertex, frozenset(inc.ends)) for inc in self.corner_incidences)

    def consecutive(self, vertex: str, first: DirectedEdge, second: DirectedEdge) -> bool:
        return (vertex, frozenset((first, second))) in self.corner_pairs

    @cached_property
    def cube_corners(self) -> Tuple[CubeCorner, ...]:
        corners = []
        for cube_id, cube in self.cubes.items():
            for label, vertex, ends in self.cube_corner_ends(cube):
                corners.append(CubeCorner(vertex, tuple(sorted(ends)), cube_id, label))
        return tuple(corners)

    @cached_property
    def _frame_index(self) -> Dict[Square, Tuple[str, int]]:
        index: Dict[Square, Tuple[str, int]] = {}
        for square_id, square in self.squares.items():
            for k, frame in enumerate(square.frames()):
                index.setdefault(frame, (square_id, k))
        return index

    def find_square(self, frame: Square) -> Optional[Tuple[str, int]]:
        """Square id and frame index whose reparametrization equals ``frame``."""
        return self._frame_index.get(frame)

    @cached_property
    def _triangle_index(self) -> Dict[Tuple[str, FrozenSet[DirectedEdge]], str]:
        index = {}
        for corner in self.cube_corners:
            index.setdefault((corner.vertex, frozenset(corner.ends)), corner.cube)
        return index

    def find_cube(self, vertex: str, ends: Iterable[DirectedEdge]) -> Optional[str]:
        return self._triangle_index.get((vertex, frozenset(ends)))

    # --- Faces ---

    def square_vertices(self, square_id: str) -> FrozenSet[str]:
        square = self.squares[square_id]
        return frozenset(self.corner_vertex(square, corner) for corner in CORNERS)

    def square_edges(self, square_id: str) -> FrozenSet[str]:
        return frozenset(side.edge for side in self.squares[square_id].sides)

    def cube_squares(self, cube_id: str) -> FrozenSet[str]:
        cube = self.cubes[cube_id]
        sides = [self.find_square(frame)[0] for frame in self.cube_side_frames(cube)]
        return frozenset([cube.bottom, cube.top, *sides])

    # --- Invariants ---

    def cell_counts(self) -> Tuple[int, int, int, int]:
        return (len(self.vertices), len(self.edges), len(self.squares), len(self.cubes))

    def euler_characteristic(self) -> int:
        v, e, s, c = self.cell_counts()
        return v - e + s - c

    @property
    def dimension(self) -> int:
        if self.cubes:
            return 3
        if self.squares:
            return 2
        if self.edges:
            return 1
        return 0 if self.vertices else -1

    def one_skeleton(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        for edge_id, edge in self.edges.items():
            graph.add_edge(edge.initial, edge.terminal, key=edge_id)
        return graph

    def is_connected(self) -> bool:
        return bool(self.vertices) and nx.is_connected(self.one_skeleton())

    def with_name(self, name: str) -> "CubeComplex":
        return CubeComplex(name, self.vertices, self.edges, self.squares, self.cubes)

    def restrict(self, sub: "Subcomplex", name: str) -> "CubeComplex":
        """The subcomplex as a complex in its own right (same identifiers)."""
        missing = sub.missing_faces(self)
        if missing:
            raise ComplexStructureError(f"{self.name}: subcomplex is not face-closed: {missing[0]}")
        return CubeComplex(
            name=name,
            vertices=tuple(sorted(sub.vertices)),
            edges={e: self.edges[e] for e in sub.edges},
            squares={s: self.squares[s] for s in sub.squares},
            cubes={c: self.cubes[c] for c in sub.cubes},
        )

    def __repr__(self) -> str:
        v, e, s, c = self.cell_counts()
        return f"CubeComplex({self.name!r}, V={v}, E={e}, S={s}, C={c})"


@dataclass(frozen=True)
class Subcomplex:
    """A set of cells of an ambient complex; valid when closed under faces."""
    vertices: FrozenSet[str] = frozenset()
    edges: FrozenSet[str] = frozenset()
    squares: FrozenSet[str] = frozenset()
    cubes: FrozenSet[str] = frozenset()

    @classmethod
    def whole(cls, c: CubeComplex) -> "Subcomplex":
        return cls(frozenset(c.vertices), frozenset(c.edges), frozenset(c.squares), frozenset(c.cubes))

    @classmethod
    def closure(cls, c: CubeComplex, vertices=(), edges=(), squares=(), cubes=()) -> "Subcomplex":
        """Smallest face-closed subcomplex containing the given cells."""
        cube_set = set(cubes)
        square_set = set(squares)
        for cube_id in cube_set:
            square_set |= c.cube_squares(cube_id)
            for corner_edge in c.cubes[cube_id].corners:
                edges = (*edges, corner_edge.edge)
        edge_set = set(edges)
        for square_id in square_set:
            edge_set |= c.square_edges(square_id)
        vertex_set = set(vertices)
        for edge_id in edge_set:
            vertex_set |= {c.edges[edge_id].initial, c.edges[edge_id].terminal}
        return cls(frozenset(vertex_set), frozenset(edge_set), frozenset(square_set), frozenset(cube_set))

    def missing_faces(self, c: CubeComplex) -> List[str]:
        """Descriptions of every face reference leaving the subcomplex."""
        missing = []
        for edge_id in sorted(self.edges):
            for endpoint in (c.edges[edge_id].initial, c.edges[edge_id].terminal):
                if endpoint not in self.vertices:
                    missing.append(f"edge {edge_id} needs vertex {endpoint}")
        for square_id in sorted(self.squares):
            for edge_id in sorted(c.square_edges(square_id) - self.edges):
                missing.append(f"square {square_id} needs edge {edge_id}")
        for cube_id in sorted(self.cubes):
            for square_id in sorted(c.cube_squares(cube_id) - self.squares):
                missing.append(f"cube3 {cube_id} needs square {square_id}")
        return missing

    def is_face_closed(self, c: CubeComplex) -> bool:
        return not self.missing_faces(c)
