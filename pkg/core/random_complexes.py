"""
Random and exhaustive families of small complexes for property suites and
corpus generation. Every generator takes an explicit ``random.Random`` so
runs are reproducible from a seed.
"""
import itertools
import logging
import random
from typing import Iterator, List, Optional, Tuple

from .complexes.cells import CubeComplex, DirectedEdge, Edge, Square
from .complexes.library import path
from .complexes.maps import CubicalMap, compose, inverse, relabel
from .exceptions import ComplexStructureError, GraphOfComplexesError
from .graphs import (
    ConstantStructure,
    GammaEdge,
    GocDatum,
    GraphOfComplexes,
    locally_constant_from_constant,
    validate_goc,
)


logger = logging.getLogger(__name__)


def random_graph(
    rng: random.Random,
    max_vertices: int = 5,
    max_edges: int = 20,
    name: str = "G",
    prefix: str = "",
) -> CubeComplex:
    """Connected multigraph (loops allowed) with at least one edge."""
    n = rng.randint(1, max_vertices)
    vertices = [f"{prefix}g{i}" for i in range(n)]
    endpoints: List[Tuple[str, str]] = []
    for i in range(1, n):
        other = vertices[rng.randrange(i)]
        endpoints.append((other, vertices[i]) if rng.random() < 0.5 else (vertices[i], other))
    low = max(len(endpoints), 1)
    total = rng.randint(low, max(low, max_edges))
    while len(endpoints) < total:
        endpoints.append((rng.choice(vertices), rng.choice(vertices)))
    rng.shuffle(endpoints)
    edges = {f"{prefix}e{i}": Edge(a, b) for i, (a, b) in enumerate(endpoints)}
    return CubeComplex(name, tuple(vertices), edges)


def random_walk(
    rng: random.Random,
    c: CubeComplex,
    length: int,
    self_avoiding: bool = False,
    start: Optional[str] = None,
) -> Optional[List[DirectedEdge]]:
    """
    Walk without backtracking and without turning at a square corner, so
    that the path it parametrizes is a local isometry. ``None`` on a dead end.
    """
    vertex = start or rng.choice(c.vertices)
    visited = {vertex}
    steps: List[DirectedEdge] = []
    for _ in range(length):
        arrived = steps[-1].reversed() if steps else None
        options = [
            d for d in c.edge_ends(vertex)
            if d != arrived
            and not (arrived is not None and c.consecutive(vertex, arrived, d))
            and not (self_avoiding and c.terminal(d) in visited)
        ]
        if not options:
            return None
        d = rng.choice(options)
        steps.append(d)
        vertex = c.terminal(d)
        visited.add(vertex)
    return steps


def walk_map(c: CubeComplex, start: str, steps: List[DirectedEdge], name: str) -> CubicalMap:
    """The path ``p0 -x0-> p1 ...`` mapped along ``steps``."""
    source = path(len(steps))
    vertex_map = {"p0": start}
    for i, d in enumerate(steps):
        vertex_map[f"p{i + 1}"] = c.terminal(d)
    edge_map = {f"x{i}": d for i, d in enumerate(steps)}
    return CubicalMap(source, c, vertex_map, edge_map, name)


def _attaching(
    rng: random.Random,
    c: CubeComplex,
    length: int,
    embedded: bool,
    name: str,
    attempts: int = 50,
) -> Optional[CubicalMap]:
    for _ in range(attempts):
        start = rng.choice(c.vertices)
        steps = random_walk(rng, c, length, self_avoiding=embedded, start=start)
        if steps is not None:
            return walk_map(c, start, steps, name)
    return None


def _random_gamma(rng: random.Random, max_vertices: int, max_edges: int) -> Tuple[List[str], List[Tuple[str, str, str]]]:
    n = rng.randint(1, max_vertices)
    vertices = [f"u{i}" for i in range(n)]
    edges = []
    for i in range(1, n):
        edges.append((f"t{i}", vertices[rng.randrange(i)], vertices[i]))
    for j in range(rng.randint(0 if n > 1 else 1, max_edges)):
        edges.append((f"k{j}", rng.choice(vertices), rng.choice(vertices)))
    return vertices, edges


def random_graph_of_graphs(
    rng: random.Random,
    embedded: bool,
    max_gamma_vertices: int = 3,
    max_gamma_edges: int = 2,
    max_length: int = 3,
    attempts: int = 50,
) -> GocDatum:
    """
    Graph vertex spaces joined by path edge spaces whose attaching maps are
    independent random walks (self-avoiding when ``embedded``).
    """
    for _ in range(attempts):
        vertices, gamma_edges = _random_gamma(rng, max_gamma_vertices, max_gamma_edges)
        spaces = {u: random_graph(rng, 4, 6, name=f"X{u}") for u in vertices}
        edges = {}
        for edge_id, a, b in gamma_edges:
            length = rng.randint(1, max_length)
            minus = _attaching(rng, spaces[a], length, embedded, f"{edge_id}-minus")
            plus = _attaching(rng, spaces[b], length, embedded, f"{edge_id}-plus")
            if minus is None or plus is None:
                break
            edges[edge_id] = GammaEdge(edge_id, a, b, minus.source, minus, plus)
        else:
            g = validate_goc(GraphOfComplexes(f"gg{rng.randrange(10 ** 6)}", spaces, edges))
            return GocDatum(g)
    raise GraphOfComplexesError(f"no random graph of graphs in {attempts} attempts")


def random_constant_datum(
    rng: random.Random,
    embedded: bool,
    max_gamma_vertices: int = 3,
    max_gamma_edges: int = 2,
    max_length: int = 3,
    attempts: int = 50,
) -> GocDatum:
    """
    Relabeled copies of one random graph X as vertex spaces; every edge
    attaches a walk in X through the relabelings on both sides.
    """
    for _ in range(attempts):
        model = random_graph(rng, 4, 6, name="X")
        vertices, gamma_edges = _random_gamma(rng, max_gamma_vertices, max_gamma_edges)
        spaces, inclusions = {}, {}
        for u in vertices:
            spaces[u], inclusions[u] = relabel(model, lambda s, u=u: f"{s}_{u}", f"X_{u}")
        edges = {}
        for edge_id, a, b in gamma_edges:
            f = _attaching(rng, model, rng.randint(1, max_length), embedded, f"f_{edge_id}")
            if f is None:
                break
            minus = compose(f, inclusions[a], name=f"{edge_id}-minus")
            plus = compose(f, inclusions[b], name=f"{edge_id}-plus")
            edges[edge_id] = GammaEdge(edge_id, a, b, f.source, minus, plus)
        else:
            g = validate_goc(GraphOfComplexes(f"cg{rng.randrange(10 ** 6)}", spaces, edges))
            cs = ConstantStructure(model, {u: inverse(inclusions[u]).renamed(f"psi_{u}") for u in vertices})
            return GocDatum(g, locally_constant_from_constant(g, cs), cs)
    raise GraphOfComplexesError(f"no random constant datum in {attempts} attempts")


# --- Exhaustive family ---

def _edge_layouts(max_edges: int) -> Iterator[Tuple[Tuple[str, ...], dict]]:
    for n_vertices in (1, 2):
        vertices = ("v", "w")[:n_vertices]
        for n_edges in range(max_edges + 1):
            names = "ab"[:n_edges]
            for ends in itertools.product(itertools.product(vertices, repeat=2), repeat=n_edges):
                yield vertices, {e: Edge(a, b) for e, (a, b) in zip(names, ends)}


def _canonical_frames(vertices, edges) -> List[Square]:
    ends = [DirectedEdge(e, forward) for e in edges for forward in (True, False)]
    frames = {}
    for sides in itertools.product(ends, repeat=4):
        square = Square(*sides)
        try:
            CubeComplex("probe", vertices, edges, {"s": square})
        except ComplexStructureError:
            continue
        key = min(f.tokens for f in square.frames())
        frames.setdefault(key, square)
    return [frames[key] for key in sorted(frames)]


def small_complexes(max_edges: int = 2, max_squares: int = 2) -> Iterator[CubeComplex]:
    """
    Every complex on at most two vertices with at most ``max_edges`` edges
    and ``max_squares`` squares, one square per dihedral class of boundary.
    """
    count = 0
    for vertices, edges in _edge_layouts(max_edges):
        frames = _canonical_frames(vertices, edges) if edges else []
        for n_squares in range(max_squares + 1):
            for chosen in itertools.combinations_with_replacement(frames, n_squares):
                squares = {f"s{i}": square for i, square in enumerate(chosen)}
                count += 1
                yield CubeComplex(f"small{count}", vertices, edges, squares)
    logger.debug(f"small_complexes: {count} complexes")
