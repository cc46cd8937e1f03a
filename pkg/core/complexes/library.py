"""
ComplexLibrary - Registry of named builders for standard cube complexes.
"""
import logging
import string
from typing import Callable, Dict, List, Optional, Sequence

from ..exceptions import ComplexStructureError, WorkspaceError
from .cells import Cube3, CubeComplex, DirectedEdge, Edge, Square, Subcomplex
from .maps import CubicalMap


logger = logging.getLogger(__name__)


def _d(token: str) -> DirectedEdge:
    return DirectedEdge.from_token(token)


def _sq(*tokens: str) -> Square:
    return Square(*(_d(t) for t in tokens))


def point(name: str = "point") -> CubeComplex:
    return CubeComplex(name, ("v",), {})


def interval(name: str = "interval") -> CubeComplex:
    return CubeComplex(name, ("p", "q"), {"a": Edge("p", "q")})


def cycle(n: int, name: Optional[str] = None, edge_names: Optional[Sequence[str]] = None) -> CubeComplex:
    """Cycle graph with vertices ``c0..`` and edges ``x0..``, edge i from c_i to c_{i+1}."""
    if n < 1:
        raise ComplexStructureError("cycle needs at least one edge")
    names = list(edge_names) if edge_names else [f"x{i}" for i in range(n)]
    if len(names) != n:
        raise ComplexStructureError(f"cycle({n}) needs {n} edge names")
    vertices = tuple(f"c{i}" for i in range(n))
    edges = {names[i]: Edge(vertices[i], vertices[(i + 1) % n]) for i in range(n)}
    return CubeComplex(name or f"cycle{n}", vertices, edges)


def path(n: int, name: Optional[str] = None) -> CubeComplex:
    vertices = tuple(f"p{i}" for i in range(n + 1))
    edges = {f"x{i}": Edge(vertices[i], vertices[i + 1]) for i in range(n)}
    return CubeComplex(name or f"path{n}", vertices, edges)


def rose(k: int, name: Optional[str] = None) -> CubeComplex:
    """One vertex ``v`` with loops ``a``, ``b``, ``c``..."""
    if not 1 <= k <= 26:
        raise ComplexStructureError("rose needs between 1 and 26 petals")
    return CubeComplex(name or f"rose{k}", ("v",), {string.ascii_lowercase[i]: Edge("v", "v") for i in range(k)})


def torus(name: str = "torus") -> CubeComplex:
    return CubeComplex(
        name, ("v",), {"a": Edge("v", "v"), "b": Edge("v", "v")}, {"s": _sq("a+", "b+", "a+", "b+")}
    )


def klein(name: str = "klein") -> CubeComplex:
    """Square with boundary word a b a b^-1: the bottom and top sides run against each other."""
    return CubeComplex(
        name, ("v",), {"a": Edge("v", "v"), "b": Edge("v", "v")}, {"s": _sq("a+", "b+", "a-", "b+")}
    )


def product_cycle_interval(n: int, name: Optional[str] = None) -> CubeComplex:
    vertices = tuple(f"c{i}_{h}" for i in range(n) for h in (0, 1))
    edges: Dict[str, Edge] = {}
    squares: Dict[str, Square] = {}
    for i in range(n):
        j = (i + 1) % n
        for h in (0, 1):
            edges[f"x{i}_{h}"] = Edge(f"c{i}_{h}", f"c{j}_{h}")
        edges[f"y{i}"] = Edge(f"c{i}_0", f"c{i}_1")
    for i in range(n):
        j = (i + 1) % n
        squares[f"s{i}"] = _sq(f"x{i}_0+", f"y{j}+", f"x{i}_1+", f"y{i}+")
    return CubeComplex(name or f"cycle{n}xI", vertices, edges, squares)


def square_interval(name: str = "cube") -> CubeComplex:
    """A single 3-cube with all of its faces."""
    bits = (0, 1)
    vertices = tuple(f"v{i}{j}{h}" for i in bits for j in bits for h in bits)
    edges: Dict[str, Edge] = {}
    for a in bits:
        for b in bits:
            edges[f"x{a}{b}"] = Edge(f"v0{a}{b}", f"v1{a}{b}")
            edges[f"y{a}{b}"] = Edge(f"v{a}0{b}", f"v{a}1{b}")
            edges[f"z{a}{b}"] = Edge(f"v{a}{b}0", f"v{a}{b}1")
    squares = {}
    for h in bits:
        squares[f"q{h}"] = _sq(f"x0{h}+", f"y1{h}+", f"x1{h}+", f"y0{h}+")
    for j in bits:
        squares[f"sx{j}"] = _sq(f"x{j}0+", f"z1{j}+", f"x{j}1+", f"z0{j}+")
    for i in bits:
        squares[f"sy{i}"] = _sq(f"y{i}0+", f"z{i}1+", f"y{i}1+", f"z{i}0+")
    cube = Cube3("q0", "q1", (_d("z00+"), _d("z10+"), _d("z01+"), _d("z11+")))
    return CubeComplex(name, vertices, edges, squares, {"k": cube})


def corner_without_cube(name: str = "corner") -> CubeComplex:
    """Three squares of a 3-cube meeting at one corner, with no 3-cube filling them."""
    cube = square_interval()
    hollow = Subcomplex.closure(cube, squares=("q0", "sx0", "sy0"))
    return cube.restrict(hollow, name)


def figure_direct_osculation(name: str = "direct-osculation") -> CubeComplex:
    """
    Two squares whose shared edge ``m`` makes ``e1`` and ``e2`` parallel in
    the same direction while both leave ``v`` without spanning a corner.
    """
    vertices = ("v", "b", "a1", "b1", "c1")
    edges = {
        "g1": Edge("v", "b"),
        "g2": Edge("b", "v"),
        "e1": Edge("v", "a1"),
        "m": Edge("b", "b1"),
        "e2": Edge("v", "c1"),
        "h1": Edge("a1", "b1"),
        "h2": Edge("b1", "c1"),
    }
    squares = {
        "s1": _sq("g1+", "m+", "h1+", "e1+"),
        "s2": _sq("g2+", "e2+", "h2+", "m+"),
    }
    return CubeComplex(name, vertices, edges, squares)


def figure_inter_osculation(name: str = "inter-osculation") -> CubeComplex:
    """Two hyperplanes crossing at ``(v1; e1, f1)`` and osculating at ``(x; e2, f2)``."""
    vertices = ("v1", "x", "y", "z", "w")
    edges = {
        "f1": Edge("v1", "x"),
        "e2": Edge("x", "z"),
        "g": Edge("y", "z"),
        "e1": Edge("v1", "y"),
        "k": Edge("y", "x"),
        "k2": Edge("z", "w"),
        "f2": Edge("x", "w"),
    }
    squares = {
        "s1": _sq("f1+", "e2+", "g+", "e1+"),
        "s2": _sq("g+", "k2+", "f2+", "k+"),
    }
    return CubeComplex(name, vertices, edges, squares)


def word_map(source: CubeComplex, target: CubeComplex, word: Sequence[str], name: str = "") -> CubicalMap:
    """
    Map a cycle (or path) onto a one-vertex target by reading a word of
    directed edge tokens along the source edges in identifier order.
    """
    if len(target.vertices) != 1:
        raise ComplexStructureError("word maps need a one-vertex target")
    if len(word) != len(source.edges):
        raise ComplexStructureError(f"word has {len(word)} letters for {len(source.edges)} edges")
    base = target.vertices[0]
    return CubicalMap(
        source=source,
        target=target,
        vertex_map={v: base for v in source.vertices},
        edge_map={e: _d(token) for e, token in zip(source.edges, word)},
        name=name or f"{source.name}-{''.join(word)}",
    )


class ComplexLibrary:
    """
    Registry of complex builders, addressed as ``name`` or ``name:ARG``
    (for example ``torus`` or ``rose:2``).
    Builders without arguments are cached per name.
    """

    _registry: Dict[str, Callable[..., CubeComplex]] = {
        "point": point,
        "interval": interval,
        "cycle": cycle,
        "path": path,
        "rose": rose,
        "torus": torus,
        "klein": klein,
        "cycle-x-interval": product_cycle_interval,
        "cube": square_interval,
        "corner": corner_without_cube,
        "direct-osculation": figure_direct_osculation,
        "inter-osculation": figure_inter_osculation,
    }

    _instances: Dict[str, CubeComplex] = {}

    @classmethod
    def register(cls, name: str, builder: Callable[..., CubeComplex]) -> None:
        cls._registry[name.lower()] = builder
        cls._instances.pop(name.lower(), None)
        logger.info(f"Registered complex builder: {name}")

    @classmethod
    def get_available(cls) -> List[str]:
        return sorted(cls._registry)

    @classmethod
    def build(cls, spec: str) -> CubeComplex:
        """
        Build a library complex.

        Args:
            spec: builder name, optionally followed by ``:N`` for sized families

        Raises:
            WorkspaceError: unknown builder or malformed argument
        """
        name, _, argument = spec.lower().partition(":")
        if name not in cls._registry:
            raise WorkspaceError(f"Unknown library complex: {name}. Available: {cls.get_available()}")
        builder = cls._registry[name]
        if not argument:
            if spec not in cls._instances:
                try:
                    cls._instances[spec] = builder()
                except TypeError as e:
                    raise WorkspaceError(f"Library complex {name} needs a size, e.g. {name}:3") from e
            return cls._instances[spec]
        if not argument.isdigit():
            raise WorkspaceError(f"Library argument must be a positive integer: {argument!r}")
        try:
            complex_ = builder(int(argument), name=f"{name}{argument}")
        except TypeError as e:
            raise WorkspaceError(f"Library complex {name} takes no size") from e
        logger.debug(f"Built library complex {complex_!r}")
        return complex_
