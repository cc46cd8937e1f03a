"""
Finite-sheeted covers from permutation voltages.

A cover of degree ``n`` is given by one permutation of ``{0..n-1}`` per
edge: the lift of edge ``e`` starting on sheet ``i`` ends on sheet
``sigma_e[i]``. Cells of the total space are named ``<cell>.<sheet>``
with 1-based sheets.
"""
import logging
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from networkx.utils import UnionFind

from .complexes.cells import Cube3, CubeComplex, DirectedEdge, Edge, Square, Subcomplex
from .complexes.formats import tokenize
from .complexes.links import validate
from .complexes.maps import CubicalMap, check_local_isometry
from .exceptions import (
    ComplexFormatError,
    ComplexStructureError,
    CoverError,
    GroupOrderCapExceeded,
    InternalInvariantError,
    NotLocalIsometryError,
)
from .groups import (
    Perm,
    compose_perm,
    format_cycles,
    group_elements,
    group_order,
    identity_perm,
    invert_perm,
    is_identity,
    is_permutation,
    is_transitive,
    orbits,
    parse_cycles,
    right_regular_action,
)


logger = logging.getLogger(__name__)


def sheet_id(cell: str, sheet: int) -> str:
    return f"{cell}.{sheet + 1}"


def square_word(square: Square) -> List[DirectedEdge]:
    """Boundary loop from corner (0,0): bottom, right, top reversed, left reversed."""
    return [square.bottom, square.right, square.top.reversed(), square.left.reversed()]


# --- Presentations ---

@dataclass(frozen=True)
class Presentation:
    base_vertex: str
    tree_edges: Tuple[str, ...]
    generators: Tuple[str, ...]
    relators: Tuple[Tuple[DirectedEdge, ...], ...]

    def format_relator(self, index: int) -> str:
        word = self.relators[index]
        if not word:
            return "1"
        return " ".join(d.edge if d.forward else f"{d.edge}^-1" for d in word)


def spanning_tree(c: CubeComplex, base: str) -> Tuple[str, ...]:
    """Breadth-first spanning tree by sorted identifiers."""
    if base not in set(c.vertices):
        raise ComplexStructureError(f"{c.name}: unknown vertex {base}")
    seen = {base}
    tree: List[str] = []
    queue = deque([base])
    while queue:
        vertex = queue.popleft()
        for d in c.edge_ends(vertex):
            end = c.terminal(d)
            if end not in seen:
                seen.add(end)
                tree.append(d.edge)
                queue.append(end)
    if len(seen) != len(c.vertices):
        raise ComplexStructureError(f"{c.name} is not connected")
    return tuple(sorted(tree))


def presentation(c: CubeComplex, base: Optional[str] = None) -> Presentation:
    base = base or c.vertices[0]
    tree = spanning_tree(c, base)
    tree_set = set(tree)
    relators = tuple(
        tuple(d for d in square_word(square) if d.edge not in tree_set) for square in c.squares.values()
    )
    return Presentation(
        base_vertex=base,
        tree_edges=tree,
        generators=tuple(e for e in c.edges if e not in tree_set),
        relators=relators,
    )


# --- Voltages ---

@dataclass(frozen=True)
class VoltageAssignment:
    degree: int
    perms: Dict[str, Perm]

    def of(self, d: DirectedEdge) -> Perm:
        perm = self.perms[d.edge]
        return perm if d.forward else invert_perm(perm)

    def word(self, word: Sequence[DirectedEdge]) -> Perm:
        result = identity_perm(self.degree)
        for d in word:
            result = compose_perm(result, self.of(d))
        return result

    def satisfies_relators(self, c: CubeComplex) -> bool:
        return all(is_identity(self.word(square_word(square))) for square in c.squares.values())

    def is_transitive(self) -> bool:
        return is_transitive(self.perms.values(), self.degree)

    def group_order(self) -> int:
        return group_order(self.perms.values(), self.degree)


def format_voltage_table(voltages: VoltageAssignment) -> str:
    lines = [f"cover {voltages.degree}"]
    lines.extend(f"perm {e} {format_cycles(p)}" for e, p in sorted(voltages.perms.items()))
    return "\n".join(lines) + "\n"


def parse_voltage_table(text: str) -> VoltageAssignment:
    degree: Optional[int] = None
    perms: Dict[str, Perm] = {}
    for line, tokens in tokenize(text):
        if tokens[0] == "cover":
            if degree is not None or len(tokens) != 2 or not tokens[1].isdigit() or int(tokens[1]) < 1:
                raise ComplexFormatError("expected a single 'cover DEGREE' line", line)
            degree = int(tokens[1])
        elif tokens[0] == "perm":
            if degree is None:
                raise ComplexFormatError("'perm' before 'cover'", line)
            if len(tokens) < 3:
                raise ComplexFormatError("expected 'perm EDGEID CYCLES'", line)
            if tokens[1] in perms:
                raise ComplexFormatError(f"duplicate perm for edge {tokens[1]}", line)
            try:
                perms[tokens[1]] = parse_cycles(" ".join(tokens[2:]), degree)
            except ComplexFormatError as e:
                raise ComplexFormatError(str(e), line) from e
        else:
            raise ComplexFormatError(f"unknown keyword {tokens[0]!r}", line)
    if degree is None:
        raise ComplexFormatError("missing 'cover DEGREE' line")
    return VoltageAssignment(degree, perms)


# --- Covers ---

@dataclass(frozen=True, eq=False)
class CoveringSpace:
    base: CubeComplex
    total: CubeComplex
    projection: CubicalMap
    voltages: VoltageAssignment
    regular: bool

    @property
    def degree(self) -> int:
        return self.voltages.degree

    def lift(self, d: DirectedEdge, sheet: int) -> Tuple[DirectedEdge, int]:
        return lift_edge(self.voltages, d, sheet)


def lift_edge(voltages: VoltageAssignment, d: DirectedEdge, sheet: int) -> Tuple[DirectedEdge, int]:
    """Lift of ``d`` starting on ``sheet``, and the sheet where it ends."""
    perm = voltages.perms[d.edge]
    if d.forward:
        return DirectedEdge(sheet_id(d.edge, sheet), True), perm[sheet]
    start = invert_perm(perm)[sheet]
    return DirectedEdge(sheet_id(d.edge, start), False), start


def _lift_frame(voltages: VoltageAssignment, frame: Square, sheet: int) -> Square:
    bottom, after_bottom = lift_edge(voltages, frame.bottom, sheet)
    left, after_left = lift_edge(voltages, frame.left, sheet)
    right, _ = lift_edge(voltages, frame.right, after_bottom)
    top, _ = lift_edge(voltages, frame.top, after_left)
    return Square(bottom, right, top, left)


def _check_voltages(c: CubeComplex, voltages: VoltageAssignment) -> None:
    if voltages.degree < 1:
        raise CoverError("cover degree must be at least 1")
    if set(voltages.perms) != set(c.edges):
        missing = sorted(set(c.edges) ^ set(voltages.perms))
        raise CoverError(f"voltages do not match the edges of {c.name}: {missing[:3]}")
    for edge, perm in voltages.perms.items():
        if len(perm) != voltages.degree or not is_permutation(perm):
            raise CoverError(f"voltage of {edge} is not a permutation of degree {voltages.degree}")
    for square_id, square in c.squares.items():
        if not is_identity(voltages.word(square_word(square))):
            raise CoverError(f"voltages violate the relator of square {square_id}")


def build_cover(
    c: CubeComplex,
    voltages: VoltageAssignment,
    name: Optional[str] = None,
    check: bool = True,
) -> CoveringSpace:
    if check:
        _check_voltages(c, voltages)
    n = voltages.degree
    sheets = range(n)
    vertices = tuple(sheet_id(v, i) for v in c.vertices for i in sheets)
    edges: Dict[str, Edge] = {}
    for e, edge in c.edges.items():
        perm = voltages.perms[e]
        for i in sheets:
            edges[sheet_id(e, i)] = Edge(sheet_id(edge.initial, i), sheet_id(edge.terminal, perm[i]))
    squares = {
        sheet_id(s, i): _lift_frame(voltages, square, i) for s, square in c.squares.items() for i in sheets
    }
    cubes: Dict[str, Cube3] = {}
    for cube_id, cube in c.cubes.items():
        k = cube.top_frame or 0
        top_frame = c.squares[cube.top].reframe(k)
        bottom = c.squares[cube.bottom]
        for i in sheets:
            # Sheets at the corners (0,0), (1,0), (0,1), (1,1) of the bottom square.
            after_bottom = lift_edge(voltages, bottom.bottom, i)[1]
            corner_sheets = (
                i,
                after_bottom,
                lift_edge(voltages, bottom.left, i)[1],
                lift_edge(voltages, bottom.right, after_bottom)[1],
            )
            lifts = [lift_edge(voltages, d, s) for d, s in zip(cube.corners, corner_sheets)]
            lifted_top = _lift_frame(voltages, top_frame, lifts[0][1])
            top_id = next(
                (sheet_id(cube.top, j) for j in sheets if squares[sheet_id(cube.top, j)].reframe(k) == lifted_top),
                None,
            )
            if top_id is None:
                raise CoverError(f"cube3 {cube_id} does not lift consistently on sheet {i + 1}")
            cubes[sheet_id(cube_id, i)] = Cube3(
                sheet_id(cube.bottom, i), top_id, tuple(d for d, _ in lifts), k
            )

    total = CubeComplex(name or f"{c.name}~{n}", vertices, edges, squares, cubes)
    projection = CubicalMap(
        source=total,
        target=c,
        vertex_map={sheet_id(v, i): v for v in c.vertices for i in sheets},
        edge_map={sheet_id(e, i): DirectedEdge(e, True) for e in c.edges for i in sheets},
        name=f"p_{total.name}",
    )
    regular = voltages.is_transitive() and voltages.group_order() == n
    return CoveringSpace(c, total, projection, voltages, regular)


def identity_cover(c: CubeComplex) -> CoveringSpace:
    return build_cover(c, VoltageAssignment(1, {e: (0,) for e in c.edges}), name=f"{c.name}~1")


# --- Enumeration ---

def _relabel_from(start: int, gens: Sequence[str], fwd: Dict[str, List[int]], bwd: Dict[str, List[int]], n: int):
    labels = {start: 0}
    order = [start]
    position = 0
    while position < len(order):
        sheet = order[position]
        position += 1
        for g in gens:
            for table in (fwd[g], bwd[g]):
                neighbor = table[sheet]
                if neighbor not in labels:
                    labels[neighbor] = len(order)
                    order.append(neighbor)
    encoding = []
    for g in gens:
        perm = [0] * n
        for sheet in range(n):
            perm[labels[sheet]] = labels[fwd[g][sheet]]
        encoding.append(tuple(perm))
    return tuple(encoding)


def _enumerate_degree(pres: Presentation, n: int) -> Iterator[Dict[str, Perm]]:
    gens = pres.generators
    fwd = {g: [-1] * n for g in gens}
    bwd = {g: [-1] * n for g in gens}
    relators = [r for r in pres.relators if r]
    state = {"used": 1}

    def consistent() -> bool:
        for relator in relators:
            for start in range(state["used"]):
                sheet = start
                for d in relator:
                    sheet = (fwd if d.forward else bwd)[d.edge][sheet]
                    if sheet < 0:
                        break
                else:
                    if sheet != start:
                        return False
        return True

    def first_gap():
        for sheet in range(state["used"]):
            for g in gens:
                if fwd[g][sheet] < 0:
                    return sheet, g, True
                if bwd[g][sheet] < 0:
                    return sheet, g, False
        return None

    def canonical() -> bool:
        current = _relabel_from(0, gens, fwd, bwd, n)
        return all(_relabel_from(start, gens, fwd, bwd, n) >= current for start in range(1, n))

    def search():
        gap = first_gap()
        if gap is None:
            if state["used"] == n and canonical():
                yield {g: tuple(fwd[g]) for g in gens}
            return
        sheet, g, forward = gap
        table, other = (fwd[g], bwd[g]) if forward else (bwd[g], fwd[g])
        candidates = [t for t in range(state["used"]) if other[t] < 0]
        if state["used"] < n:
            candidates.append(state["used"])
        for target in candidates:
            is_new = target == state["used"]
            if is_new:
                state["used"] += 1
            table[sheet] = target
            other[target] = sheet
            if consistent():
                yield from search()
            table[sheet] = -1
            other[target] = -1
            if is_new:
                state["used"] -= 1

    if not gens:
        if n == 1:
            yield {}
        return
    yield from search()


def enumerate_voltages(
    c: CubeComplex,
    max_degree: int,
    min_degree: int = 1,
) -> Iterator[VoltageAssignment]:
    """
    Transitive voltage assignments satisfying every relator, one per
    sheet-relabeling class, by increasing degree. Tree edges carry the
    identity.
    """
    pres = presentation(c)
    for n in range(max(1, min_degree), max_degree + 1):
        count = 0
        for generator_perms in _enumerate_degree(pres, n):
            perms = {e: identity_perm(n) for e in pres.tree_edges}
            perms.update(generator_perms)
            count += 1
            yield VoltageAssignment(n, dict(sorted(perms.items())))
        logger.debug(f"enumerate_voltages {c.name}: degree {n} -> {count} class(es)")


def enumerate_covers(c: CubeComplex, max_degree: int, min_degree: int = 1) -> Iterator[CoveringSpace]:
    base_npc = validate(c).is_npc
    counters: Dict[int, int] = {}
    for voltages in enumerate_voltages(c, max_degree, min_degree):
        n = voltages.degree
        counters[n] = counters.get(n, 0) + 1
        cover = build_cover(c, voltages, name=f"{c.name}~{n}.{counters[n]}", check=False)
        if base_npc and not validate(cover.total).is_npc:
            raise InternalInvariantError(f"cover {cover.total.name} of an NPC complex is not NPC")
        yield cover


def regular_closure(cover: CoveringSpace, cap: int = 64) -> CoveringSpace:
    """
    Cover associated to the kernel of the voltage action: sheets are the
    elements of the generated group, acted on by right multiplication.
    """
    perms = list(cover.voltages.perms.values())
    order = group_order(perms, cover.degree)
    if order > cap:
        raise GroupOrderCapExceeded(order, cap)
    if order == cover.degree and cover.voltages.is_transitive():
        return cover
    elements = group_elements(perms, cover.degree)
    voltages = VoltageAssignment(
        order, {e: right_regular_action(elements, p) for e, p in cover.voltages.perms.items()}
    )
    closure = build_cover(cover.base, voltages, name=f"{cover.total.name}^reg", check=False)
    logger.debug(f"regular_closure {cover.total.name}: degree {cover.degree} -> {order}")
    return closure


def random_cover(c: CubeComplex, degree: int, rng: random.Random, attempts: int = 200) -> CoveringSpace:
    """Random transitive cover; tree edges carry the identity."""
    pres = presentation(c)
    for _ in range(attempts):
        perms = {e: identity_perm(degree) for e in pres.tree_edges}
        for g in pres.generators:
            images = list(range(degree))
            rng.shuffle(images)
            perms[g] = tuple(images)
        voltages = VoltageAssignment(degree, dict(sorted(perms.items())))
        if voltages.satisfies_relators(c) and voltages.is_transitive():
            return build_cover(c, voltages, check=False)
    raise CoverError(f"no random transitive cover of {c.name} of degree {degree} in {attempts} attempts")


# --- Fiber products ---

@dataclass(frozen=True, eq=False)
class Elevation:
    complex: CubeComplex
    elevation_map: CubicalMap
    covering_map: CubicalMap
    degree: int


@dataclass(frozen=True, eq=False)
class FiberProduct:
    map_side: CubicalMap
    cover_side: CoveringSpace
    total: CubeComplex
    components: Tuple[Elevation, ...] = field(default_factory=tuple)

    @property
    def is_connected(self) -> bool:
        return len(self.components) == 1


def pullback_voltages(f: CubicalMap, voltages: VoltageAssignment) -> VoltageAssignment:
    n = voltages.degree
    return VoltageAssignment(
        n,
        {e: identity_perm(n) if image is None else voltages.of(image) for e, image in f.edge_map.items()},
    )


def fiber_product(
    f: CubicalMap,
    cover: CoveringSpace,
    require_local_isometry: bool = True,
) -> FiberProduct:
    """
    Fiber product of ``f: Y -> X`` with a cover of ``X``: the cover of ``Y``
    with pulled-back voltages, split into components. Cell ``y.i`` lies over
    ``y`` and over the lift of ``f(y)`` on sheet ``i``.
    """
    if f.target is not cover.base and f.target != cover.base:
        raise CoverError(f"{f.label} does not map into the base of {cover.total.name}")
    if require_local_isometry:
        report = check_local_isometry(f)
        if not report.is_local_isometry:
            raise NotLocalIsometryError(f"{f.label} is not a local isometry: {report.violations[0].describe()}")
    y = f.source
    if not y.is_connected():
        raise CoverError(f"{f.label}: source {y.name} is not connected")
    pulled = pullback_voltages(f, cover.voltages)
    product = build_cover(y, pulled, name=f"{y.name}x{cover.total.name}", check=False)
    total = product.total
    n = cover.degree

    uf = UnionFind(total.vertices)
    for edge in total.edges.values():
        uf.union(edge.initial, edge.terminal)
    groups = sorted((sorted(group) for group in uf.to_sets()), key=lambda g: g[0])

    components = []
    for index, vertices in enumerate(groups, start=1):
        vertex_set = set(vertices)
        edges = [e for e, edge in total.edges.items() if edge.initial in vertex_set]
        squares = [s for s, sq in total.squares.items() if total.initial(sq.bottom) in vertex_set]
        cubes = [k for k, cube in total.cubes.items() if cube.bottom in set(squares)]
        sub = Subcomplex(frozenset(vertices), frozenset(edges), frozenset(squares), frozenset(cubes))
        component = total.restrict(sub, f"{total.name}#{index}")
        elevation_map = _elevation_map(f, cover, component)
        covering_map = CubicalMap(
            source=component,
            target=y,
            vertex_map={v: product.projection.vertex(v) for v in component.vertices},
            edge_map={e: product.projection.edge_map[e] for e in component.edges},
            name=f"q_{component.name}",
        )
        degree = len(component.vertices) // max(1, len(y.vertices))
        components.append(Elevation(component, elevation_map, covering_map, degree))
    logger.debug(f"fiber_product {f.label} x {cover.total.name}: {len(components)} component(s), degree {n}")
    return FiberProduct(f, cover, total, tuple(components))


def split_sheet(cell: str) -> Tuple[str, int]:
    """Inverse of ``sheet_id``: (base cell, 0-based sheet)."""
    base, _, sheet = cell.rpartition(".")
    return base, int(sheet) - 1


def _elevation_map(f: CubicalMap, cover: CoveringSpace, component: CubeComplex) -> CubicalMap:
    vertex_map = {}
    for v in component.vertices:
        base, sheet = split_sheet(v)
        vertex_map[v] = sheet_id(f.vertex(base), sheet)
    edge_map = {}
    for e in component.edges:
        base, sheet = split_sheet(e)
        image = f.edge_map[base]
        edge_map[e] = None if image is None else cover.lift(image, sheet)[0]
    return CubicalMap(component, cover.total, vertex_map, edge_map, name=f"elev_{component.name}")


def elevation_count_oracle(f: CubicalMap, cover: CoveringSpace) -> int:
    """
    Orbit count of the pulled-back loop voltages, summed over the components
    of the source. Loops are read off a spanning tree, independently of the
    component partition computed by ``fiber_product``.
    """
    report = check_local_isometry(f)
    if not report.is_local_isometry:
        raise NotLocalIsometryError(f"{f.label} is not a local isometry: {report.violations[0].describe()}")
    y = f.source
    pulled = pullback_voltages(f, cover.voltages)
    n = cover.degree
    total = 0
    remaining = list(y.vertices)
    while remaining:
        base = remaining[0]
        potential = {base: identity_perm(n)}
        queue = deque([base])
        tree = set()
        while queue:
            vertex = queue.popleft()
            for d in y.edge_ends(vertex):
                end = y.terminal(d)
                if end not in potential:
                    potential[end] = compose_perm(potential[vertex], pulled.of(d))
                    tree.add(d.edge)
                    queue.append(end)
        loops = []
        for e, edge in y.edges.items():
            if edge.initial in potential and e not in tree:
                loop = compose_perm(
                    compose_perm(potential[edge.initial], pulled.perms[e]),
                    invert_perm(potential[edge.terminal]),
                )
                loops.append(loop)
        total += len(orbits(loops, n))
        remaining = [v for v in remaining if v not in potential]
    return total
