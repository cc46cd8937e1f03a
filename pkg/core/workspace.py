"""
Workspace - named complexes, maps and graphs of complexes loaded from text.

Files may pull in other files with ``include RELPATH`` (relative to the
including file). Loading a file twice is a no-op; defining a name twice is
allowed only when both definitions serialize identically.
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple, Union

from .complexes.cells import CubeComplex
from .complexes.formats import (
    Section,
    complex_from_section,
    map_from_section,
    serialize_complex,
    serialize_map,
    split_sections,
)
from .complexes.library import ComplexLibrary
from .complexes.maps import CubicalMap
from .exceptions import ComplexFormatError, GraphOfComplexesError, WorkspaceError
from .graphs import (
    ConstantStructure,
    GammaEdge,
    GocDatum,
    GraphOfComplexes,
    LocallyConstantStructure,
    check_constant,
    check_locally_constant,
    locally_constant_from_constant,
    validate_goc,
)


logger = logging.getLogger(__name__)

LIBRARY_PREFIX = "lib:"


class Workspace:
    """Loaded definitions by kind, plus the file each came from."""

    def __init__(self):
        self.complexes: Dict[str, CubeComplex] = {}
        self.maps: Dict[str, CubicalMap] = {}
        self.gocs: Dict[str, GocDatum] = {}
        self.sources: Dict[Tuple[str, str], str] = {}
        self._primary: Dict[str, Dict[str, str]] = {}
        self._loaded: Set[Path] = set()
        self._loading: List[Path] = []

    # --- Loading ---

    def load_path(self, path: Union[str, Path]) -> "Workspace":
        resolved = Path(path).resolve()
        if resolved in self._loaded:
            return self
        if resolved in self._loading:
            raise WorkspaceError(f"include cycle through {resolved.name}")
        try:
            text = resolved.read_text(encoding="utf-8")
        except OSError as e:
            raise WorkspaceError(f"cannot read {path}: {e.strerror or e}") from e
        self._loading.append(resolved)
        try:
            self.load_text(text, origin=str(resolved), base_dir=resolved.parent)
        finally:
            self._loading.pop()
        self._loaded.add(resolved)
        logger.debug(f"Loaded {resolved}")
        return self

    def load_text(self, text: str, origin: str = "<text>", base_dir: Optional[Path] = None) -> "Workspace":
        directives, sections = split_sections(text)
        for line, tokens in directives:
            if len(tokens) != 2:
                raise ComplexFormatError("expected 'include RELPATH'", line)
            if base_dir is None:
                raise WorkspaceError(f"include {tokens[1]} needs a file location")
            self.load_path(base_dir / tokens[1])
        # Complexes first so that maps and gocs may refer forward within a file.
        for kind in ("complex", "map", "goc"):
            for section in (s for s in sections if s.kind == kind):
                self._load_section(section, origin)
        return self

    def _load_section(self, section: Section, origin: str) -> None:
        if section.kind == "complex":
            self._define("complex", self.complexes, complex_from_section(section), origin)
        elif section.kind == "map":
            resolver = dict(self.complexes)
            for name in section.header[1:3]:
                if name.startswith(LIBRARY_PREFIX):
                    resolver[name] = self.complex(name)
            self._define("map", self.maps, map_from_section(section, resolver), origin)
        else:
            self._define("goc", self.gocs, self._goc_from_section(section), origin)

    def _define(self, kind: str, table: Dict, value, origin: str) -> None:
        name = value.name if kind != "map" else value.label
        if name in table:
            if _canonical(kind, table[name]) != _canonical(kind, value):
                first = self.sources.get((kind, name), "?")
                raise WorkspaceError(f"{kind} {name} redefined differently (first defined in {first})")
            value = table[name]
        else:
            table[name] = value
            self.sources[(kind, name)] = origin
        self._primary.setdefault(origin, {})[kind] = name

    # --- Lookup ---

    def complex(self, name: str) -> CubeComplex:
        """Look up a complex; ``lib:NAME`` builds one from the library."""
        if name.startswith(LIBRARY_PREFIX):
            built = ComplexLibrary.build(name[len(LIBRARY_PREFIX):])
            if built.name not in self.complexes:
                self.complexes[built.name] = built
                self.sources[("complex", built.name)] = name
            return self.complexes[built.name]
        if name not in self.complexes:
            raise WorkspaceError(f"unknown complex {name}")
        return self.complexes[name]

    def map(self, name: str) -> CubicalMap:
        if name not in self.maps:
            raise WorkspaceError(f"unknown map {name}")
        return self.maps[name]

    def goc(self, name: str) -> GocDatum:
        if name not in self.gocs:
            raise WorkspaceError(f"unknown graph of complexes {name}")
        return self.gocs[name]

    def defines(self, origin: Union[str, Path], kind: str) -> bool:
        return self._primary_name(origin, kind) is not None

    def primary(self, origin: Union[str, Path], kind: str) -> str:
        """Name of the last ``kind`` section of a loaded file or text (includes excluded)."""
        name = self._primary_name(origin, kind)
        if name is None:
            raise WorkspaceError(f"{Path(origin).name} defines no {kind}")
        return name

    def _primary_name(self, origin: Union[str, Path], kind: str) -> Optional[str]:
        key = origin if origin in self._primary else str(Path(origin).resolve())
        return self._primary.get(key, {}).get(kind)

    # --- Graphs of complexes ---

    def _goc_from_section(self, section: Section) -> GocDatum:
        if len(section.header) != 1:
            raise ComplexFormatError("expected 'goc NAME'", section.line)
        name = section.header[0]
        vertex_spaces: Dict[str, CubeComplex] = {}
        edges: Dict[str, GammaEdge] = {}
        theta: Dict[str, CubicalMap] = {}
        psi: Dict[str, CubicalMap] = {}
        constant: Optional[CubeComplex] = None
        for line, tokens in section.body:
            keyword = tokens[0]
            if keyword == "gvertex":
                _expect(tokens, 3, "gvertex U COMPLEX", line)
                if tokens[1] in vertex_spaces:
                    raise ComplexFormatError(f"duplicate gvertex {tokens[1]}", line)
                vertex_spaces[tokens[1]] = self.complex(tokens[2])
            elif keyword == "gedge":
                _expect(tokens, 7, "gedge E U W EDGECOMPLEX MAPMINUS MAPPLUS", line)
                edge_id, initial, terminal, space, minus, plus = tokens[1:]
                if edge_id in edges:
                    raise ComplexFormatError(f"duplicate gedge {edge_id}", line)
                edges[edge_id] = GammaEdge(
                    edge_id, initial, terminal, self.complex(space), self.map(minus), self.map(plus)
                )
            elif keyword == "theta":
                _expect(tokens, 3, "theta E MAP", line)
                theta[tokens[1]] = self.map(tokens[2])
            elif keyword == "psi":
                _expect(tokens, 3, "psi U MAP", line)
                psi[tokens[1]] = self.map(tokens[2])
            elif keyword == "constant":
                _expect(tokens, 2, "constant COMPLEX", line)
                constant = self.complex(tokens[1])
            else:
                raise ComplexFormatError(f"unknown keyword {keyword!r}", line)

        g = validate_goc(GraphOfComplexes(name, vertex_spaces, edges))
        for edge_id in theta:
            if edge_id not in edges:
                raise GraphOfComplexesError(f"{name}: theta for unknown edge {edge_id}")
        for vertex in psi:
            if vertex not in vertex_spaces:
                raise GraphOfComplexesError(f"{name}: psi for unknown vertex {vertex}")
        if (constant is None) != (not psi):
            raise GraphOfComplexesError(f"{name}: 'psi' lines and a 'constant' line go together")

        cs = None
        if constant is not None:
            cs = ConstantStructure(constant, psi)
            check_constant(g, cs)
        lc = None
        if theta:
            lc = LocallyConstantStructure(theta)
            check_locally_constant(g, lc)
        elif cs is not None:
            lc = locally_constant_from_constant(g, cs)
        elif not edges:
            lc = LocallyConstantStructure({})
        logger.debug(f"Parsed goc {name}: {len(vertex_spaces)} vertices, {len(edges)} edges")
        return GocDatum(g, lc, cs)


def _expect(tokens: List[str], count: int, usage: str, line: int) -> None:
    if len(tokens) != count:
        raise ComplexFormatError(f"expected '{usage}'", line)


def _canonical(kind: str, value) -> str:
    if kind == "complex":
        return serialize_complex(value)
    if kind == "map":
        return serialize_map(value)
    return serialize_goc(value)


def _collect(table: Dict[str, str], name: str, text: str, kind: str) -> None:
    if name in table and table[name] != text:
        raise WorkspaceError(f"two different {kind}s named {name} in one bundle")
    table[name] = text


def serialize_goc(datum: GocDatum) -> str:
    """
    Self-contained bundle: every complex and map the datum uses, then the
    goc section. Output is canonical, so equal data serialize equally.
    """
    g = datum.graph
    complexes: Dict[str, str] = {}
    maps: Dict[str, str] = {}
    for space in g.vertex_spaces.values():
        _collect(complexes, space.name, serialize_complex(space), "complex")
    used_maps: List[CubicalMap] = []
    for edge in g.edges.values():
        _collect(complexes, edge.space.name, serialize_complex(edge.space), "complex")
        used_maps.extend([edge.minus, edge.plus])
    if datum.locally_constant is not None and datum.constant is None:
        used_maps.extend(datum.locally_constant.theta.values())
    if datum.constant is not None:
        _collect(complexes, datum.constant.constant_space.name, serialize_complex(datum.constant.constant_space), "complex")
        used_maps.extend(datum.constant.psi.values())
    for f in used_maps:
        _collect(maps, f.label, serialize_map(f), "map")

    lines = [f"goc {g.name}"]
    lines.extend(f"gvertex {u} {space.name}" for u, space in g.vertex_spaces.items())
    lines.extend(
        f"gedge {e.id} {e.initial} {e.terminal} {e.space.name} {e.minus.label} {e.plus.label}"
        for e in g.edges.values()
    )
    if datum.constant is not None:
        lines.extend(f"psi {u} {f.label}" for u, f in sorted(datum.constant.psi.items()))
        lines.append(f"constant {datum.constant.constant_space.name}")
    elif datum.locally_constant is not None:
        lines.extend(f"theta {e} {f.label}" for e, f in sorted(datum.locally_constant.theta.items()))

    parts = [complexes[name] for name in sorted(complexes)]
    parts.extend(maps[name] for name in sorted(maps))
    parts.append("\n".join(lines) + "\n")
    return "\n".join(parts)
