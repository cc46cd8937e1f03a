"""
Tests for complexes, text formats, maps and the workspace.
"""
import re

from django.conf import settings
from django.test import SimpleTestCase

from .complexes.cells import CubeComplex, DirectedEdge, Edge, Square, Subcomplex
from .complexes.formats import parse_complex, parse_map, serialize_complex, serialize_map
from .complexes.library import ComplexLibrary, cycle, rose, torus, word_map
from .complexes.links import link, naive_empty_triangles, validate
from .complexes.maps import (
    CubicalMap,
    check_local_isometry,
    compose,
    find_isomorphism,
    identity,
    inverse,
    is_embedding,
    is_isomorphism,
    is_local_isometry,
    relabel,
)
from .enums import LinkViolationKind, LocalIsometryFailure
from .exceptions import ComplexFormatError, ComplexStructureError, MapError, WorkspaceError
from .workspace import Workspace, serialize_goc


CORPUS = settings.CUBEX_CORPUS_DIR


def _d(token: str) -> DirectedEdge:
    return DirectedEdge.from_token(token)


class FormatTests(SimpleTestCase):
    def test_torus_round_trip(self):
        text = (CORPUS / "torus.cux").read_text()
        c = parse_complex(text)
        self.assertEqual(c.cell_counts(), (1, 2, 1, 0))
        self.assertEqual(serialize_complex(parse_complex(serialize_complex(c))), serialize_complex(c))

    def test_cube_round_trip(self):
        cube = ComplexLibrary.build("cube")
        again = parse_complex(serialize_complex(cube))
        self.assertEqual(again.cell_counts(), (8, 12, 6, 1))
        self.assertEqual(serialize_complex(again), serialize_complex(cube))

    def test_unnamed_complex(self):
        c = parse_complex("vertex v\nedge a v v\n")
        self.assertEqual(c.name, "unnamed")
        self.assertEqual(c.edge_ids, ("a",))

    def test_syntax_error_reports_line(self):
        with self.assertRaises(ComplexFormatError) as ctx:
            parse_complex("complex c\nvertex v\nedge a v\n")
        self.assertEqual(ctx.exception.line, 3)

    def test_bad_direction_token(self):
        with self.assertRaises(ComplexFormatError):
            parse_complex("complex c\nvertex v\nedge a v v\nsquare s a+ a+ a a+\n")

    def test_bad_top_frame(self):
        text = re.sub(r" q1(@\d)? ", " q1@9 ", serialize_complex(ComplexLibrary.build("cube")))
        with self.assertRaises(ComplexFormatError):
            parse_complex(text)

    def test_dangling_edge(self):
        with self.assertRaises(ComplexStructureError):
            parse_complex("complex c\nvertex v\nedge a v w\n")

    def test_corner_incompatibility(self):
        with self.assertRaises(ComplexStructureError) as ctx:
            CubeComplex(
                "bad",
                ("v", "w"),
                {"a": Edge("v", "w"), "b": Edge("v", "v")},
                {"s": Square(_d("a+"), _d("b+"), _d("a+"), _d("b+"))},
            )
        self.assertIn("corner incompatibility", str(ctx.exception))

    def test_collapsed_edge_in_map(self):
        complexes = {"interval": ComplexLibrary.build("interval"), "point": ComplexLibrary.build("point")}
        f = parse_map("map crush interval point\nv p v\nv q v\ne a .\n", complexes)
        self.assertTrue(f.is_collapsing)
        self.assertIn("e a .", serialize_map(f))


class LinkConditionTests(SimpleTestCase):
    def test_torus_link_is_a_square(self):
        lk = link(torus(), "v")
        self.assertEqual(len(lk.vertices), 4)
        self.assertEqual(len(lk.edges), 4)
        self.assertTrue(validate(torus()).is_npc)

    def test_klein_is_npc(self):
        self.assertTrue(validate(ComplexLibrary.build("klein")).is_npc)

    def test_cube_is_npc(self):
        self.assertTrue(validate(ComplexLibrary.build("cube")).is_npc)

    def test_hollow_corner_has_empty_triangle(self):
        corner = ComplexLibrary.build("corner")
        report = validate(corner)
        self.assertFalse(report.is_npc)
        self.assertEqual(report.violations[0].kind, LinkViolationKind.EMPTY_TRIANGLE)
        self.assertEqual(report.violations[0].vertex, "v000")
        self.assertEqual(naive_empty_triangles(corner, "v000"), [report.violations[0].ends])

    def test_double_square_gives_double_link_edge(self):
        frame = Square(_d("a+"), _d("b+"), _d("a+"), _d("b+"))
        c = CubeComplex("doubled", ("v",), {"a": Edge("v", "v"), "b": Edge("v", "v")}, {"s": frame, "t": frame})
        kinds = {v.kind for v in validate(c).violations}
        self.assertIn(LinkViolationKind.DOUBLE_LINK_EDGE, kinds)

    def test_graphs_are_npc(self):
        self.assertTrue(validate(rose(3)).is_npc)
        self.assertTrue(validate(cycle(4)).is_npc)


class MapTests(SimpleTestCase):
    def setUp(self):
        self.workspace = Workspace().load_path(CORPUS / "double-aab.goc").load_path(CORPUS / "double-a.goc")

    def test_immersed_cycle_is_local_isometry_not_embedding(self):
        aab = self.workspace.map("aab")
        self.assertTrue(is_local_isometry(aab))
        self.assertFalse(is_embedding(aab))

    def test_loop_is_embedding(self):
        self.assertTrue(is_embedding(self.workspace.map("loop-a")))

    def test_backtracking_is_not_injective(self):
        f = word_map(cycle(2), rose(2), ["a+", "a-"])
        report = check_local_isometry(f)
        self.assertFalse(report.is_local_isometry)
        self.assertEqual(report.violations[0].kind, LocalIsometryFailure.NOT_INJECTIVE)

    def test_corner_turn_is_not_full(self):
        f = word_map(cycle(2), torus(), ["a+", "b+"])
        kinds = {v.kind for v in check_local_isometry(f).violations}
        self.assertIn(LocalIsometryFailure.NOT_FULL_EDGE, kinds)

    def test_endpoints_must_commute(self):
        with self.assertRaises(MapError):
            CubicalMap(cycle(2), cycle(2), {"c0": "c0", "c1": "c0"}, {"x0": _d("x0+"), "x1": _d("x1+")})

    def test_identity_composition(self):
        aab = self.workspace.map("aab")
        target = aab.target
        self.assertEqual(compose(aab, identity(target)), aab)
        self.assertEqual(compose(identity(aab.source), aab), aab)

    def test_inverse_of_relabeling(self):
        copy, iso = relabel(torus(), lambda s: f"{s}'", "torus'")
        self.assertTrue(is_isomorphism(iso))
        self.assertEqual(compose(iso, inverse(iso)), identity(torus()))

    def test_inverse_of_non_isomorphism(self):
        with self.assertRaises(MapError):
            inverse(self.workspace.map("aab"))

    def test_restrict_to_closed_subcomplex(self):
        loop = torus().restrict(Subcomplex.closure(torus(), edges=("a",)), "loop")
        self.assertEqual(loop.cell_counts(), (1, 1, 0, 0))
        with self.assertRaises(ComplexStructureError):
            torus().restrict(Subcomplex(edges=frozenset({"a"})), "open")

    def test_find_isomorphism(self):
        cube = ComplexLibrary.build("cube")
        copy, _ = relabel(cube, lambda s: f"k_{s}", "cube-copy")
        found = find_isomorphism(cube, copy)
        self.assertIsNotNone(found)
        self.assertTrue(is_isomorphism(found))
        self.assertIsNone(find_isomorphism(torus(), ComplexLibrary.build("klein")))


class LibraryTests(SimpleTestCase):
    def test_sized_builder(self):
        self.assertEqual(ComplexLibrary.build("rose:3").edge_ids, ("a", "b", "c"))
        self.assertEqual(ComplexLibrary.build("cycle:5").cell_counts(), (5, 5, 0, 0))

    def test_size_errors(self):
        with self.assertRaises(WorkspaceError):
            ComplexLibrary.build("rose")
        with self.assertRaises(WorkspaceError):
            ComplexLibrary.build("torus:2")
        with self.assertRaises(WorkspaceError):
            ComplexLibrary.build("mobius")

    def test_available(self):
        available = ComplexLibrary.get_available()
        for name in ("torus", "klein", "direct-osculation", "inter-osculation"):
            self.assertIn(name, available)


class WorkspaceTests(SimpleTestCase):
    def test_includes_resolve_relative_to_file(self):
        workspace = Workspace().load_path(CORPUS / "double-aab.goc")
        self.assertTrue(workspace.defines(CORPUS / "double-aab.goc", "goc"))
        self.assertFalse(workspace.defines(CORPUS / "double-aab.goc", "complex"))
        self.assertEqual(workspace.primary(CORPUS / "aab.map", "map"), "aab")
        datum = workspace.goc("double-aab")
        self.assertEqual(datum.graph.vertices, ("left", "right"))
        self.assertIsNotNone(datum.constant)
        self.assertIsNotNone(datum.locally_constant)

    def test_goc_bundle_round_trip(self):
        datum = Workspace().load_path(CORPUS / "rose-swap.goc").goc("rose-swap")
        text = serialize_goc(datum)
        again = Workspace().load_text(text)
        self.assertEqual(serialize_goc(again.goc("rose-swap")), text)

    def test_conflicting_redefinition(self):
        workspace = Workspace().load_text("complex c\nvertex v\n")
        workspace.load_text("complex c\nvertex v\n")
        with self.assertRaises(WorkspaceError):
            workspace.load_text("complex c\nvertex w\n")

    def test_include_needs_a_file(self):
        with self.assertRaises(WorkspaceError):
            Workspace().load_text("include rose2.cux\n")

    def test_missing_file(self):
        with self.assertRaises(WorkspaceError):
            Workspace().load_path(CORPUS / "missing.cux")

    def test_library_lookup(self):
        workspace = Workspace()
        self.assertEqual(workspace.complex("lib:rose:2").name, "rose2")
        with self.assertRaises(WorkspaceError):
            workspace.complex("nowhere")
