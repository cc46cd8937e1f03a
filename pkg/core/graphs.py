"""
Graphs of cube complexes.

A graph of complexes has a finite connected multigraph Gamma, a complex per
vertex and per edge, and locally isometric attaching maps
``minus: X_e -> X_{initial(e)}`` and ``plus: X_e -> X_{terminal(e)}``.
Its total space thickens every edge space to ``X_e x [0,1]``:

* ``u/c``  vertex-space cell ``c`` of ``X_u``;
* ``e/x``  horizontal edge over vertex ``x`` of ``X_e``, directed from the
  minus side to the plus side;
* ``e/f``  vertical square over edge ``f`` of ``X_e``;
* ``e/s``  prism (3-cube) over square ``s`` of ``X_e``.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import networkx as nx

from .complexes.cells import Cube3, CubeComplex, DirectedEdge, Edge, Square
from .complexes.links import validate
from .complexes.maps import (
    CubicalMap,
    check_local_isometry,
    compose,
    compose_all,
    embedding_witness,
    identity,
    image_subcomplex,
    inverse,
    is_embedding,
    is_isomorphism,
)
from .dtos import CorollaryReport, EdgeHypothesisResult, PathologyReport
from .enums import CellLayer, HyperplaneKind
from .exceptions import (
    ComplexStructureError,
    ConstantStructureError,
    GraphOfComplexesError,
    GroupOrderCapExceeded,
    InternalInvariantError,
    MapError,
    MonodromyError,
    NotLocalIsometryError,
    RetractionError,
)
from .groups import Perm, group_elements, group_order, identity_perm
from .hyperplanes import HyperplaneStructure, detect_pathologies, subcomplex_osculation


logger = logging.getLogger(__name__)


# --- Data ---

@dataclass(frozen=True, eq=False)
class GammaEdge:
    id: str
    initial: str
    terminal: str
    space: CubeComplex
    minus: CubicalMap
    plus: CubicalMap

    def attaching(self, layer: CellLayer) -> CubicalMap:
        return self.minus if layer == CellLayer.BOTTOM else self.plus


@dataclass(frozen=True, eq=False)
class GraphOfComplexes:
    name: str
    vertex_spaces: Dict[str, CubeComplex]
    edges: Dict[str, GammaEdge] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "vertex_spaces", dict(sorted(self.vertex_spaces.items())))
        object.__setattr__(self, "edges", dict(sorted(self.edges.items())))

    @property
    def vertices(self) -> Tuple[str, ...]:
        return tuple(self.vertex_spaces)

    def graph(self) -> nx.MultiGraph:
        gamma = nx.MultiGraph()
        gamma.add_nodes_from(self.vertex_spaces)
        for edge in self.edges.values():
            gamma.add_edge(edge.initial, edge.terminal, key=edge.id)
        return gamma

    def incident(self, vertex: str) -> List[Tuple[GammaEdge, bool]]:
        """Edges at ``vertex`` with True for the initial end; loops appear twice."""
        ends = []
        for edge in self.edges.values():
            if edge.initial == vertex:
                ends.append((edge, True))
            if edge.terminal == vertex:
                ends.append((edge, False))
        return ends


@dataclass(frozen=True, eq=False)
class LocallyConstantStructure:
    """theta_e: X_{initial(e)} -> X_{terminal(e)} with theta_e * minus_e = plus_e."""
    theta: Dict[str, CubicalMap]


@dataclass(frozen=True, eq=False)
class ConstantStructure:
    """psi_u: X_u -> X_V with psi_{initial(e)} * minus_e = psi_{terminal(e)} * plus_e."""
    constant_space: CubeComplex
    psi: Dict[str, CubicalMap]


@dataclass(frozen=True, eq=False)
class GocDatum:
    """A graph of complexes with whatever structure its source declared."""
    graph: GraphOfComplexes
    locally_constant: Optional[LocallyConstantStructure] = None
    constant: Optional[ConstantStructure] = None

    @property
    def name(self) -> str:
        return self.graph.name


def validate_goc(g: GraphOfComplexes) -> GraphOfComplexes:
    """Check connectivity, NPC spaces and locally isometric attaching maps."""
    if not g.vertex_spaces:
        raise GraphOfComplexesError(f"{g.name}: the underlying graph has no vertices")
    if not nx.is_connected(g.graph()):
        raise GraphOfComplexesError(f"{g.name}: the underlying graph is not connected")
    shared = set(g.vertex_spaces) & set(g.edges)
    if shared:
        raise GraphOfComplexesError(f"{g.name}: {sorted(shared)[0]} names both a vertex and an edge of Gamma")
    for u, space in g.vertex_spaces.items():
        if not space.is_connected():
            raise GraphOfComplexesError(f"{g.name}: vertex space {u} ({space.name}) is not connected")
        report = validate(space)
        if not report.is_npc:
            raise GraphOfComplexesError(
                f"{g.name}: vertex space {u} is not NPC: {report.violations[0].describe()}"
            )
    for edge in g.edges.values():
        for endpoint in (edge.initial, edge.terminal):
            if endpoint not in g.vertex_spaces:
                raise GraphOfComplexesError(f"{g.name}: edge {edge.id} references unknown vertex {endpoint}")
        if edge.space.cubes:
            raise GraphOfComplexesError(f"{g.name}: edge space of {edge.id} has 3-cubes; thickening exceeds dimension 3")
        if not edge.space.is_connected():
            raise GraphOfComplexesError(f"{g.name}: edge space of {edge.id} is not connected")
        for attaching, endpoint in ((edge.minus, edge.initial), (edge.plus, edge.terminal)):
            if attaching.source is not edge.space and attaching.source != edge.space:
                raise GraphOfComplexesError(f"{g.name}: {attaching.label} does not start at the space of {edge.id}")
            target = g.vertex_spaces[endpoint]
            if attaching.target is not target and attaching.target != target:
                raise GraphOfComplexesError(f"{g.name}: {attaching.label} does not land in X_{endpoint}")
            report = check_local_isometry(attaching)
            if not report.is_local_isometry:
                raise NotLocalIsometryError(
                    f"{g.name}: attaching map {attaching.label} of {edge.id} is not a local isometry: "
                    f"{report.violations[0].describe()}"
                )
    return g


def check_locally_constant(g: GraphOfComplexes, lc: LocallyConstantStructure) -> None:
    for edge in g.edges.values():
        theta = lc.theta.get(edge.id)
        if theta is None:
            raise MonodromyError(f"{g.name}: missing theta for edge {edge.id}")
        if not is_isomorphism(theta):
            raise MonodromyError(f"{g.name}: theta of {edge.id} is not an isomorphism")
        if theta.source != g.vertex_spaces[edge.initial] or theta.target != g.vertex_spaces[edge.terminal]:
            raise MonodromyError(f"{g.name}: theta of {edge.id} has the wrong source or target")
        if compose(edge.minus, theta) != edge.plus:
            raise MonodromyError(f"{g.name}: theta of {edge.id} does not carry minus to plus")


def check_constant(g: GraphOfComplexes, cs: ConstantStructure) -> None:
    for u, space in g.vertex_spaces.items():
        psi = cs.psi.get(u)
        if psi is None:
            raise ConstantStructureError(f"{g.name}: missing psi for vertex {u}")
        if psi.source != space or psi.target != cs.constant_space or not is_isomorphism(psi):
            raise ConstantStructureError(f"{g.name}: psi of {u} is not an isomorphism onto {cs.constant_space.name}")
    for edge in g.edges.values():
        left = compose(edge.minus, cs.psi[edge.initial])
        right = compose(edge.plus, cs.psi[edge.terminal])
        if left != right:
            raise ConstantStructureError(f"{g.name}: psi maps disagree on the two attachments of {edge.id}")


def locally_constant_from_constant(g: GraphOfComplexes, cs: ConstantStructure) -> LocallyConstantStructure:
    check_constant(g, cs)
    return LocallyConstantStructure({
        edge.id: compose(cs.psi[edge.initial], inverse(cs.psi[edge.terminal]), name=f"theta_{edge.id}")
        for edge in g.edges.values()
    })


def make_double(base: CubeComplex, edge_map: CubicalMap, name: Optional[str] = None) -> GocDatum:
    """Two copies of ``base`` joined along one edge space, both attached by ``edge_map``."""
    if edge_map.target != base:
        raise GraphOfComplexesError(f"{edge_map.label} does not land in {base.name}")
    g = GraphOfComplexes(
        name=name or f"double-{base.name}-{edge_map.label}",
        vertex_spaces={"left": base, "right": base},
        edges={"e": GammaEdge("e", "left", "right", edge_map.source, edge_map, edge_map)},
    )
    validate_goc(g)
    ident = identity(base)
    cs = ConstantStructure(base, {"left": ident, "right": ident})
    lc = LocallyConstantStructure({"e": ident})
    return GocDatum(g, lc, cs)


# --- Total space ---

@dataclass(frozen=True)
class CellOrigin:
    gamma: str
    cell: str
    layer: Optional[CellLayer] = None


@dataclass(frozen=True, eq=False)
class TotalSpace:
    graph: GraphOfComplexes
    complex: CubeComplex
    provenance: Dict[str, CellOrigin]
    horizontal_edges: Dict[str, str]

    def cell(self, gamma: str, cell: str, layer: Optional[CellLayer] = None) -> str:
        """Total-space id of a vertex-space cell, or of an edge-space cell at a layer."""
        if layer is None:
            return f"{gamma}/{cell}"
        edge = self.graph.edges[gamma]
        if layer == CellLayer.PRISM:
            return f"{gamma}/{cell}"
        attaching = edge.attaching(layer)
        side = edge.initial if layer == CellLayer.BOTTOM else edge.terminal
        space = edge.space
        if cell in space.edges:
            return f"{side}/{attaching.edge_map[cell].edge}"
        if cell in space.squares:
            return f"{side}/{attaching.square_map[cell][0]}"
        return f"{side}/{attaching.vertex(cell)}"

    def vertex_space_cells(self, u: str) -> Dict[str, List[str]]:
        prefix = f"{u}/"
        c = self.complex
        return {
            "vertices": [v for v in c.vertices if v.startswith(prefix)],
            "edges": [e for e in c.edges if e.startswith(prefix)],
            "squares": [s for s in c.squares if s.startswith(prefix)],
            "cubes": [k for k in c.cubes if k.startswith(prefix)],
        }


def _moved(gamma: str, attaching: CubicalMap, d: DirectedEdge) -> DirectedEdge:
    image = attaching.directed(d)
    return DirectedEdge(f"{gamma}/{image.edge}", image.forward)


def total_space(g: GraphOfComplexes, name: Optional[str] = None) -> TotalSpace:
    vertices: List[str] = []
    edges: Dict[str, Edge] = {}
    squares: Dict[str, Square] = {}
    cubes: Dict[str, Cube3] = {}
    provenance: Dict[str, CellOrigin] = {}
    horizontal: Dict[str, str] = {}

    for u, space in g.vertex_spaces.items():
        def moved(d: DirectedEdge, u=u) -> DirectedEdge:
            return DirectedEdge(f"{u}/{d.edge}", d.forward)

        for v in space.vertices:
            vertices.append(f"{u}/{v}")
            provenance[f"{u}/{v}"] = CellOrigin(u, v)
        for e, edge in space.edges.items():
            edges[f"{u}/{e}"] = Edge(f"{u}/{edge.initial}", f"{u}/{edge.terminal}")
            provenance[f"{u}/{e}"] = CellOrigin(u, e)
        for s, square in space.squares.items():
            squares[f"{u}/{s}"] = square.map_sides(moved)
            provenance[f"{u}/{s}"] = CellOrigin(u, s)
        for k, cube in space.cubes.items():
            cubes[f"{u}/{k}"] = Cube3(f"{u}/{cube.bottom}", f"{u}/{cube.top}", tuple(moved(d) for d in cube.corners), cube.top_frame)
            provenance[f"{u}/{k}"] = CellOrigin(u, k)

    for gamma_edge in g.edges.values():
        e, minus, plus = gamma_edge.id, gamma_edge.minus, gamma_edge.plus
        low, high = gamma_edge.initial, gamma_edge.terminal
        space = gamma_edge.space

        def h(x: str, e=e) -> DirectedEdge:
            return DirectedEdge(f"{e}/{x}", True)

        for x in space.vertices:
            edges[f"{e}/{x}"] = Edge(f"{low}/{minus.vertex(x)}", f"{high}/{plus.vertex(x)}")
            provenance[f"{e}/{x}"] = CellOrigin(e, x, CellLayer.PRISM)
            horizontal[f"{e}/{x}"] = e
        for f, edge in space.edges.items():
            forward = DirectedEdge(f, True)
            squares[f"{e}/{f}"] = Square(
                _moved(low, minus, forward), h(edge.terminal), _moved(high, plus, forward), h(edge.initial)
            )
            provenance[f"{e}/{f}"] = CellOrigin(e, f, CellLayer.PRISM)
        for s, square in space.squares.items():
            cubes[f"{e}/{s}"] = _prism(g, gamma_edge, s, square, h)
            provenance[f"{e}/{s}"] = CellOrigin(e, s, CellLayer.PRISM)

    try:
        complex_ = CubeComplex(name or f"X_{g.name}", tuple(vertices), edges, squares, cubes)
    except ComplexStructureError as e:
        raise GraphOfComplexesError(f"{g.name}: inconsistent identifications: {e}") from e
    report = validate(complex_)
    if not report.is_npc:
        raise InternalInvariantError(
            f"total space of {g.name} is not NPC: {report.violations[0].describe()}"
        )
    logger.debug(f"total_space {g.name}: {complex_!r}")
    return TotalSpace(g, complex_, provenance, horizontal)


def _prism(g: GraphOfComplexes, gamma_edge: GammaEdge, s: str, square: Square, h) -> Cube3:
    low, high = gamma_edge.initial, gamma_edge.terminal
    minus, plus, space = gamma_edge.minus, gamma_edge.plus, gamma_edge.space
    bottom_id, _ = minus.square_map[s]
    bottom_frame = g.vertex_spaces[low].squares[bottom_id]
    # Reparametrize s so that its minus image is the stored frame of the bottom square.
    frame = next(f for f in square.frames() if minus.image_frame(f) == bottom_frame)
    top_id, top_k = g.vertex_spaces[high].find_square(plus.image_frame(frame))
    corners = tuple(h(space.corner_vertex(frame, corner)) for corner in ((0, 0), (1, 0), (0, 1), (1, 1)))
    return Cube3(f"{low}/{bottom_id}", f"{high}/{top_id}", corners, top_k)


def euler_characteristic_formula(g: GraphOfComplexes) -> int:
    return sum(s.euler_characteristic() for s in g.vertex_spaces.values()) - sum(
        edge.space.euler_characteristic() for edge in g.edges.values()
    )


@dataclass
class HyperplaneClassification:
    kinds: Dict[str, HyperplaneKind]
    vertical_of: Dict[str, str]
    report: PathologyReport

    @property
    def vertical(self) -> List[str]:
        return sorted(self.vertical_of)

    def vertical_for(self, gamma_edge: str) -> List[str]:
        return sorted(h for h, e in self.vertical_of.items() if e == gamma_edge)


def classify_hyperplanes(t: TotalSpace) -> HyperplaneClassification:
    """
    Label every hyperplane vertical (dual to a horizontal edge) or not.
    Vertical hyperplanes never cross themselves and are 2-sided; a violation
    raises ``InternalInvariantError``.
    """
    hs = HyperplaneStructure(t.complex)
    kinds: Dict[str, HyperplaneKind] = {}
    vertical_of: Dict[str, str] = {}
    for hyperplane in hs.hyperplanes:
        gammas = {t.horizontal_edges[e] for e in hyperplane.edges if e in t.horizontal_edges}
        if gammas:
            if len(gammas) > 1 or any(e not in t.horizontal_edges for e in hyperplane.edges):
                raise InternalInvariantError(f"{hyperplane.id} mixes horizontal edges with other edges")
            kinds[hyperplane.id] = HyperplaneKind.VERTICAL
            vertical_of[hyperplane.id] = gammas.pop()
        else:
            kinds[hyperplane.id] = HyperplaneKind.NON_VERTICAL

    report = detect_pathologies(t.complex, structure=hs)
    for witness in report.self_crossings:
        if witness.hyperplane in vertical_of:
            raise InternalInvariantError(f"vertical hyperplane self-crosses: {witness.describe()}")
    for hyperplane_id in report.one_sided:
        if hyperplane_id in vertical_of:
            raise InternalInvariantError(f"vertical hyperplane {hyperplane_id} is 1-sided")
    return HyperplaneClassification(kinds, vertical_of, report)


# --- Monodromy ---

@dataclass(frozen=True, eq=False)
class MonodromyResult:
    base_vertex: str
    tree_edges: Tuple[str, ...]
    transports: Dict[str, CubicalMap]
    generator_images: Dict[str, CubicalMap]
    elements: Tuple[CubicalMap, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def trivial(self) -> bool:
        return self.order == 1

    def index(self, element: CubicalMap) -> int:
        return self.elements.index(element)


def gamma_spanning_tree(g: GraphOfComplexes, base: str) -> Tuple[Tuple[str, ...], Dict[str, Tuple[GammaEdge, bool]]]:
    """Breadth-first tree of Gamma; each reached vertex records (edge, traversed forward)."""
    if base not in g.vertex_spaces:
        raise GraphOfComplexesError(f"{g.name}: unknown vertex {base}")
    parent: Dict[str, Tuple[GammaEdge, bool]] = {}
    seen = {base}
    queue = deque([base])
    while queue:
        vertex = queue.popleft()
        for edge, forward in g.incident(vertex):
            other = edge.terminal if forward else edge.initial
            if other not in seen:
                seen.add(other)
                parent[other] = (edge, forward)
                queue.append(other)
    if len(seen) != len(g.vertex_spaces):
        raise GraphOfComplexesError(f"{g.name}: the underlying graph is not connected")
    return tuple(sorted(edge.id for edge, _ in parent.values())), parent


def _transports(g: GraphOfComplexes, lc: LocallyConstantStructure, base: str):
    """Maps X_base -> X_u along the tree path, by breadth-first order."""
    tree, parent = gamma_spanning_tree(g, base)
    transports = {base: identity(g.vertex_spaces[base])}
    queue = deque([base])
    while queue:
        vertex = queue.popleft()
        for other, (edge, forward) in parent.items():
            from_vertex = edge.initial if forward else edge.terminal
            if from_vertex != vertex or other in transports:
                continue
            step = lc.theta[edge.id] if forward else inverse(lc.theta[edge.id])
            transports[other] = compose(transports[vertex], step, name=f"Psi_{other}")
            queue.append(other)
    return tree, transports


def _cell_labels(c: CubeComplex) -> List[Tuple[str, object]]:
    labels: List[Tuple[str, object]] = [("v", v) for v in c.vertices]
    for e in c.edges:
        labels.append(("e", DirectedEdge(e, True)))
        labels.append(("e", DirectedEdge(e, False)))
    return labels


def _as_perm(f: CubicalMap, labels, index) -> Perm:
    images = []
    for kind, cell in labels:
        image = ("v", f.vertex(cell)) if kind == "v" else ("e", f.directed(cell))
        images.append(index[image])
    return tuple(images)


def _from_perm(perm: Perm, c: CubeComplex, labels, name: str) -> CubicalMap:
    vertex_map, edge_map = {}, {}
    for (kind, cell), image in zip(labels, perm):
        target = labels[image][1]
        if kind == "v":
            vertex_map[cell] = target
        elif cell.forward:
            edge_map[cell.edge] = target
    return CubicalMap(c, c, vertex_map, edge_map, name)


def compute_monodromy(
    g: GraphOfComplexes,
    lc: LocallyConstantStructure,
    base: Optional[str] = None,
    cap: Optional[int] = None,
) -> MonodromyResult:
    """
    Image of the fundamental group of Gamma in Aut(X_base): every non-tree
    edge ``e`` gives ``Psi_b^-1 * theta_e * Psi_a`` for ``a -> b`` its ends.
    """
    check_locally_constant(g, lc)
    base = base or g.vertices[0]
    tree, transports = _transports(g, lc, base)
    space = g.vertex_spaces[base]
    generators: Dict[str, CubicalMap] = {}
    for edge in g.edges.values():
        if edge.id in tree:
            continue
        loop = compose_all(
            [transports[edge.initial], lc.theta[edge.id], inverse(transports[edge.terminal])],
            name=f"theta_gamma_{edge.id}",
        )
        generators[edge.id] = loop

    labels = _cell_labels(space)
    index = {label: i for i, label in enumerate(labels)}
    perms = [_as_perm(f, labels, index) for f in generators.values()]
    n = len(labels)
    order = group_order(perms, n) if perms else 1
    if cap is not None and order > cap:
        raise GroupOrderCapExceeded(order, cap)
    elements = (
        [_from_perm(p, space, labels, f"m{i}") for i, p in enumerate(group_elements(perms, n))]
        if perms else [identity(space)]
    )
    logger.info(f"compute_monodromy {g.name} at {base}: order {len(elements)}")
    return MonodromyResult(base, tree, transports, generators, tuple(elements))


@dataclass(frozen=True, eq=False)
class TrivializedDatum:
    graph: GraphOfComplexes
    locally_constant: LocallyConstantStructure
    base_vertex: str
    degree: int
    voltages: Dict[str, Perm]
    monodromy: MonodromyResult


def lift_graph_of_complexes(
    g: GraphOfComplexes,
    lc: LocallyConstantStructure,
    voltages: Dict[str, Perm],
    degree: int,
    name: Optional[str] = None,
) -> Tuple[GraphOfComplexes, LocallyConstantStructure]:
    """
    Pull ``g`` back along the cover of Gamma given by edge permutations:
    vertex ``u.i`` carries X_u and edge ``e.i`` runs from ``initial(e).i``
    to ``terminal(e).sigma_e(i)``.
    """
    if set(voltages) != set(g.edges):
        raise GraphOfComplexesError(f"{g.name}: Gamma voltages do not match its edges")
    for e, perm in voltages.items():
        if sorted(perm) != list(range(degree)):
            raise GraphOfComplexesError(f"{g.name}: voltage of {e} is not a permutation of degree {degree}")
    vertex_spaces = {f"{u}.{i + 1}": space for u, space in g.vertex_spaces.items() for i in range(degree)}
    edges = {}
    theta = {}
    for edge in g.edges.values():
        for i in range(degree):
            lifted_id = f"{edge.id}.{i + 1}"
            edges[lifted_id] = GammaEdge(
                lifted_id,
                f"{edge.initial}.{i + 1}",
                f"{edge.terminal}.{voltages[edge.id][i] + 1}",
                edge.space,
                edge.minus,
                edge.plus,
            )
            theta[lifted_id] = lc.theta[edge.id]
    lifted = GraphOfComplexes(name or f"{g.name}^{degree}", vertex_spaces, edges)
    if not nx.is_connected(lifted.graph()):
        raise GraphOfComplexesError(f"{g.name}: Gamma voltages give a disconnected cover")
    return lifted, LocallyConstantStructure(theta)


def trivialize_monodromy(
    g: GraphOfComplexes,
    lc: LocallyConstantStructure,
    base: Optional[str] = None,
    cap: Optional[int] = None,
) -> TrivializedDatum:
    """Regular cover of Gamma with deck group the monodromy image."""
    base = base or g.vertices[0]
    monodromy = compute_monodromy(g, lc, base, cap)
    if monodromy.trivial:
        return TrivializedDatum(g, lc, base, 1, {e: (0,) for e in g.edges}, monodromy)

    elements = monodromy.elements
    voltages: Dict[str, Perm] = {}
    for edge in g.edges.values():
        if edge.id in monodromy.tree_edges:
            voltages[edge.id] = identity_perm(len(elements))
            continue
        step = monodromy.generator_images[edge.id]
        voltages[edge.id] = tuple(
            monodromy.index(compose(m, step)) for m in elements
        )
    lifted, lifted_lc = lift_graph_of_complexes(g, lc, voltages, len(elements))
    logger.info(f"trivialize_monodromy {g.name}: Gamma cover of degree {len(elements)}")
    return TrivializedDatum(lifted, lifted_lc, f"{base}.1", len(elements), voltages, monodromy)


def make_constant(
    g: GraphOfComplexes,
    lc: LocallyConstantStructure,
    base: Optional[str] = None,
) -> ConstantStructure:
    """psi_u = transport from u back to the base; requires trivial monodromy."""
    base = base or g.vertices[0]
    monodromy = compute_monodromy(g, lc, base)
    if not monodromy.trivial:
        raise ConstantStructureError(f"{g.name}: monodromy of order {monodromy.order} is not trivial")
    psi = {
        u: inverse(monodromy.transports[u]).renamed(f"psi_{u}") for u in g.vertex_spaces
    }
    for edge in g.edges.values():
        if compose(lc.theta[edge.id], psi[edge.terminal]) != psi[edge.initial]:
            raise ConstantStructureError(f"{g.name}: transport along {edge.id} is path dependent")
    cs = ConstantStructure(g.vertex_spaces[base], psi)
    check_constant(g, cs)
    return cs


# --- Retraction ---

@dataclass(frozen=True, eq=False)
class Retraction:
    map: CubicalMap
    section: CubicalMap
    total: TotalSpace
    base_vertex: str


def vertex_space_inclusion(t: TotalSpace, u: str) -> CubicalMap:
    space = t.graph.vertex_spaces[u]
    return CubicalMap(
        source=space,
        target=t.complex,
        vertex_map={v: f"{u}/{v}" for v in space.vertices},
        edge_map={e: DirectedEdge(f"{u}/{e}", True) for e in space.edges},
        name=f"incl_{u}",
    )


def build_retraction(
    g: GraphOfComplexes,
    cs: ConstantStructure,
    base: str,
    t: Optional[TotalSpace] = None,
) -> Retraction:
    """
    Collapse every thickened edge space onto its minus side and identify
    vertex spaces through the constant structure.
    """
    check_constant(g, cs)
    t = t or total_space(g)
    back = inverse(cs.psi[base])
    rho = {u: compose(cs.psi[u], back) for u in g.vertex_spaces}
    target = g.vertex_spaces[base]

    vertex_ids = set(t.complex.vertices)
    vertex_map: Dict[str, str] = {}
    edge_map: Dict[str, Optional[DirectedEdge]] = {}
    for cell, origin in t.provenance.items():
        if origin.layer is not None:
            continue
        if cell in t.complex.edges:
            edge_map[cell] = rho[origin.gamma].edge_map[origin.cell]
        elif cell in vertex_ids:
            vertex_map[cell] = rho[origin.gamma].vertex(origin.cell)
    for cell in t.horizontal_edges:
        edge_map[cell] = None

    try:
        r = CubicalMap(t.complex, target, vertex_map, edge_map, name=f"r_{g.name}")
    except MapError as e:
        raise RetractionError(f"{g.name}: retraction is not cellular: {e}") from e
    section = vertex_space_inclusion(t, base)

    if compose(section, r) != identity(target):
        raise RetractionError(f"{g.name}: r after the section is not the identity")
    for u in g.vertex_spaces:
        if not is_isomorphism(compose(vertex_space_inclusion(t, u), r)):
            raise RetractionError(f"{g.name}: r restricted to X_{u} is not an isomorphism")
    _check_parallel_images(t.complex, r)
    logger.debug(f"build_retraction {g.name} onto {base}")
    return Retraction(r, section, t, base)


def _check_parallel_images(total: CubeComplex, r: CubicalMap) -> None:
    """Directed edges parallel in the total space have parallel images when not collapsed."""
    source = HyperplaneStructure(total)
    target = HyperplaneStructure(r.target)
    seen: Dict[DirectedEdge, Tuple[DirectedEdge, DirectedEdge]] = {}
    for e in total.edges:
        for forward in (True, False):
            d = DirectedEdge(e, forward)
            image = r.directed(d)
            if image is None:
                continue
            root = source.directed_class(d)
            if root in seen:
                witness, witness_image = seen[root]
                if not target.same_directed_class(witness_image, image):
                    raise RetractionError(
                        f"parallel directed edges {witness.token} and {d.token} have "
                        f"non-parallel images {witness_image.token} and {image.token}"
                    )
            else:
                seen[root] = (d, image)


def parallel_pairs(total: CubeComplex) -> List[Tuple[DirectedEdge, DirectedEdge]]:
    """Every unordered pair of distinct directed edges in a common directed class."""
    hs = HyperplaneStructure(total)
    classes: Dict[DirectedEdge, List[DirectedEdge]] = {}
    for e in total.edges:
        for forward in (True, False):
            d = DirectedEdge(e, forward)
            classes.setdefault(hs.directed_class(d), []).append(d)
    pairs = []
    for members in classes.values():
        members.sort()
        pairs.extend((a, b) for i, a in enumerate(members) for b in members[i + 1:])
    return sorted(pairs)


# --- Corollary hypotheses ---

def check_corollary_hypotheses(g: GraphOfComplexes, cs: ConstantStructure) -> CorollaryReport:
    """
    Per edge: the minus attaching map is an embedding, and its image does not
    inter-osculate with any hyperplane of the vertex space.
    """
    check_constant(g, cs)
    results: List[EdgeHypothesisResult] = []
    structures: Dict[str, HyperplaneStructure] = {}
    for edge in g.edges.values():
        embedded = is_embedding(edge.minus)
        witness = "" if embedded else embedding_witness(edge.minus)
        space = g.vertex_spaces[edge.initial]
        if edge.initial not in structures:
            structures[edge.initial] = HyperplaneStructure(space)
        findings = subcomplex_osculation(space, image_subcomplex(edge.minus), structures[edge.initial])
        results.append(EdgeHypothesisResult(
            edge=edge.id,
            embedded=embedded,
            embedding_witness=witness,
            inter_osculations=[f for f in findings if f.inter_osculates],
        ))
    return CorollaryReport(passed=all(r.passed for r in results), edges=results)

