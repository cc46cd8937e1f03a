"""
Line-oriented text formats for complexes (.cux) and maps (.map).

A text may hold several sections; each starts with a ``complex``, ``map``
or ``goc`` header line. Lines before the first header belong to an
unnamed complex so that ``vertex v`` / ``edge a v v`` parses on its own.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

from ..exceptions import ComplexFormatError, WorkspaceError
from .cells import Cube3, CubeComplex, DirectedEdge, Edge, Square
from .maps import CubicalMap


logger = logging.getLogger(__name__)

SECTION_KINDS = ("complex", "map", "goc")
COLLAPSED_TOKEN = "."


@dataclass
class Section:
    kind: str
    header: List[str]
    line: int
    body: List[Tuple[int, List[str]]] = field(default_factory=list)


def tokenize(text: str) -> Iterator[Tuple[int, List[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if content:
            yield number, content.split()


def split_sections(text: str) -> Tuple[List[Tuple[int, List[str]]], List[Section]]:
    """Return (top-level directives such as ``include``, sections)."""
    directives: List[Tuple[int, List[str]]] = []
    sections: List[Section] = []
    current: Optional[Section] = None
    for number, tokens in tokenize(text):
        keyword = tokens[0]
        if keyword in SECTION_KINDS:
            current = Section(keyword, tokens[1:], number)
            sections.append(current)
        elif keyword == "include":
            directives.append((number, tokens))
        else:
            if current is None:
                current = Section("complex", ["unnamed"], number)
                sections.append(current)
            current.body.append((number, tokens))
    return directives, sections


def _directed(token: str, line: int) -> DirectedEdge:
    try:
        return DirectedEdge.from_token(token)
    except ValueError as e:
        raise ComplexFormatError(str(e), line) from e


def _expect(tokens: List[str], count: int, usage: str, line: int) -> None:
    if len(tokens) != count:
        raise ComplexFormatError(f"expected '{usage}'", line)


def complex_from_section(section: Section) -> CubeComplex:
    if len(section.header) != 1:
        raise ComplexFormatError("expected 'complex NAME'", section.line)
    name = section.header[0]
    vertices: List[str] = []
    edges: Dict[str, Edge] = {}
    squares: Dict[str, Square] = {}
    cubes: Dict[str, Cube3] = {}
    for line, tokens in section.body:
        keyword = tokens[0]
        if keyword == "vertex":
            _expect(tokens, 2, "vertex ID", line)
            if tokens[1] in vertices:
                raise ComplexFormatError(f"duplicate vertex {tokens[1]}", line)
            vertices.append(tokens[1])
        elif keyword == "edge":
            _expect(tokens, 4, "edge ID INIT TERM", line)
            if tokens[1] in edges:
                raise ComplexFormatError(f"duplicate edge {tokens[1]}", line)
            edges[tokens[1]] = Edge(tokens[2], tokens[3])
        elif keyword == "square":
            _expect(tokens, 6, "square ID BOTTOM RIGHT TOP LEFT", line)
            if tokens[1] in squares:
                raise ComplexFormatError(f"duplicate square {tokens[1]}", line)
            squares[tokens[1]] = Square(*(_directed(t, line) for t in tokens[2:]))
        elif keyword == "cube3":
            _expect(tokens, 8, "cube3 ID BOTTOMSQ TOPSQ E00 E10 E01 E11", line)
            if tokens[1] in cubes:
                raise ComplexFormatError(f"duplicate cube3 {tokens[1]}", line)
            top, _, frame = tokens[3].partition("@")
            top_frame = None
            if frame:
                if not frame.isdigit() or int(frame) > 7:
                    raise ComplexFormatError(f"bad top frame {frame!r}, expected 0..7", line)
                top_frame = int(frame)
            cubes[tokens[1]] = Cube3(
                bottom=tokens[2],
                top=top,
                corners=tuple(_directed(t, line) for t in tokens[4:]),
                top_frame=top_frame,
            )
        else:
            raise ComplexFormatError(f"unknown keyword {keyword!r}", line)
    return CubeComplex(name, tuple(vertices), edges, squares, cubes)


def _only_section(text: str, kind: str) -> Section:
    _, sections = split_sections(text)
    matching = [s for s in sections if s.kind == kind]
    if len(matching) != 1:
        raise ComplexFormatError(f"expected exactly one {kind} section, found {len(matching)}")
    return matching[0]


def parse_complex(text: str) -> CubeComplex:
    """Parse .cux text; face references are resolved but NPC is not checked."""
    return complex_from_section(_only_section(text, "complex"))


def serialize_complex(c: CubeComplex) -> str:
    lines = [f"complex {c.name}"]
    lines.extend(f"vertex {v}" for v in c.vertices)
    lines.extend(f"edge {e} {edge.initial} {edge.terminal}" for e, edge in c.edges.items())
    lines.extend(f"square {s} {' '.join(square.tokens)}" for s, square in c.squares.items())
    for cube_id, cube in c.cubes.items():
        top = cube.top if not cube.top_frame else f"{cube.top}@{cube.top_frame}"
        corners = " ".join(d.token for d in cube.corners)
        lines.append(f"cube3 {cube_id} {cube.bottom} {top} {corners}")
    return "\n".join(lines) + "\n"


def map_from_section(section: Section, complexes: Mapping[str, CubeComplex]) -> CubicalMap:
    if len(section.header) != 3:
        raise ComplexFormatError("expected 'map NAME SRC DST'", section.line)
    name, source_name, target_name = section.header
    for complex_name in (source_name, target_name):
        if complex_name not in complexes:
            raise WorkspaceError(f"map {name} references unknown complex {complex_name}")
    vertex_map: Dict[str, str] = {}
    edge_map: Dict[str, Optional[DirectedEdge]] = {}
    for line, tokens in section.body:
        keyword = tokens[0]
        if keyword == "v":
            _expect(tokens, 3, "v SRCVERT DSTVERT", line)
            if tokens[1] in vertex_map:
                raise ComplexFormatError(f"vertex {tokens[1]} mapped twice", line)
            vertex_map[tokens[1]] = tokens[2]
        elif keyword == "e":
            _expect(tokens, 3, "e SRCEDGE DSTEDGETOKEN", line)
            if tokens[1] in edge_map:
                raise ComplexFormatError(f"edge {tokens[1]} mapped twice", line)
            edge_map[tokens[1]] = None if tokens[2] == COLLAPSED_TOKEN else _directed(tokens[2], line)
        else:
            raise ComplexFormatError(f"unknown keyword {keyword!r}", line)
    return CubicalMap(complexes[source_name], complexes[target_name], vertex_map, edge_map, name)


def parse_map(text: str, complexes: Mapping[str, CubeComplex]) -> CubicalMap:
    return map_from_section(_only_section(text, "map"), complexes)


def serialize_map(f: CubicalMap) -> str:
    lines = [f"map {f.label} {f.source.name} {f.target.name}"]
    lines.extend(f"v {v} {image}" for v, image in f.vertex_map.items())
    lines.extend(
        f"e {e} {image.token if image is not None else COLLAPSED_TOKEN}"
        for e, image in f.edge_map.items()
    )
    return "\n".join(lines) + "\n"
