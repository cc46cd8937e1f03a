"""
Tests for graphs of complexes: total spaces, vertical hyperplanes,
monodromy, trivialization and the retraction onto a vertex space.
"""
import random
from itertools import permutations

from django.conf import settings
from django.test import SimpleTestCase

from .complexes.cells import DirectedEdge
from .complexes.library import cycle, rose, word_map
from .complexes.maps import compose, identity, is_isomorphism
from .enums import CellLayer, HyperplaneKind
from .exceptions import (
    ConstantStructureError,
    GraphOfComplexesError,
    GroupOrderCapExceeded,
    MonodromyError,
    NotLocalIsometryError,
)
from .graphs import (
    GammaEdge,
    GraphOfComplexes,
    LocallyConstantStructure,
    build_retraction,
    check_corollary_hypotheses,
    check_locally_constant,
    classify_hyperplanes,
    compute_monodromy,
    euler_characteristic_formula,
    lift_graph_of_complexes,
    locally_constant_from_constant,
    make_constant,
    make_double,
    parallel_pairs,
    total_space,
    trivialize_monodromy,
    validate_goc,
    vertex_space_inclusion,
)
from .hyperplanes import HyperplaneStructure, check_special
from .random_complexes import random_constant_datum, random_graph_of_graphs
from .workspace import Workspace


CORPUS = settings.CUBEX_CORPUS_DIR


def _datum(filename: str):
    workspace = Workspace().load_path(CORPUS / filename)
    return workspace.goc(workspace.primary(CORPUS / filename, "goc"))


class GraphOfComplexesTests(SimpleTestCase):
    def test_disconnected_gamma(self):
        g = GraphOfComplexes("apart", {"u": rose(1), "w": rose(1)})
        with self.assertRaises(GraphOfComplexesError):
            validate_goc(g)

    def test_attaching_map_must_be_local_isometry(self):
        base = rose(2)
        backtrack = word_map(cycle(2), base, ["a+", "a-"])
        g = GraphOfComplexes("bad", {"u": base}, {"e": GammaEdge("e", "u", "u", backtrack.source, backtrack, backtrack)})
        with self.assertRaises(NotLocalIsometryError):
            validate_goc(g)

    def test_theta_must_carry_minus_to_plus(self):
        datum = _datum("rose-swap.goc")
        wrong = LocallyConstantStructure({"e": identity(datum.graph.vertex_spaces["v"])})
        with self.assertRaises(MonodromyError):
            check_locally_constant(datum.graph, wrong)

    def test_constant_structure_is_locally_constant(self):
        datum = _datum("double-a.goc")
        lc = locally_constant_from_constant(datum.graph, datum.constant)
        self.assertEqual(dict(lc.theta["e"].vertex_map), {"v": "v"})
        self.assertTrue(is_isomorphism(lc.theta["e"]))
        check_locally_constant(datum.graph, lc)

    def test_make_double(self):
        workspace = Workspace().load_path(CORPUS / "loop_a.map")
        loop = workspace.map("loop-a")
        datum = make_double(loop.target, loop)
        self.assertEqual(datum.name, "double-rose2-loop-a")
        self.assertEqual(datum.graph.vertices, ("left", "right"))
        self.assertIsNotNone(datum.constant)

    def test_make_double_rejects_foreign_map(self):
        loop = Workspace().load_path(CORPUS / "loop_a.map").map("loop-a")
        with self.assertRaises(GraphOfComplexesError):
            make_double(rose(3), loop)


class TotalSpaceTests(SimpleTestCase):
    def test_double_aab(self):
        t = total_space(_datum("double-aab.goc").graph)
        self.assertEqual(t.complex.cell_counts(), (2, 7, 3, 0))
        self.assertEqual(t.complex.euler_characteristic(), -2)
        self.assertEqual(euler_characteristic_formula(t.graph), -2)
        self.assertEqual(t.provenance["e/c0"].layer, CellLayer.PRISM)
        self.assertEqual(set(t.horizontal_edges), {"e/c0", "e/c1", "e/c2"})
        self.assertEqual(t.cell("left", "a"), "left/a")

    def test_double_a(self):
        t = total_space(_datum("double-a.goc").graph)
        self.assertEqual(t.complex.cell_counts(), (2, 5, 1, 0))
        self.assertEqual(len(HyperplaneStructure(t.complex).hyperplanes), 4)
        self.assertTrue(check_special(t.complex).special)

    def test_mapping_torus(self):
        datum = _datum("rose-swap.goc")
        t = total_space(datum.graph)
        self.assertEqual(t.complex.cell_counts(), (1, 4, 2, 0))
        self.assertEqual(t.complex.euler_characteristic(), euler_characteristic_formula(datum.graph))

    def test_vertical_hyperplanes(self):
        classification = classify_hyperplanes(total_space(_datum("double-aab.goc").graph))
        self.assertEqual(classification.vertical, ["H:e/c0"])
        self.assertEqual(classification.vertical_for("e"), ["H:e/c0"])
        self.assertEqual(len(classification.kinds), 3)
        self.assertEqual(
            sorted(h for h, kind in classification.kinds.items() if kind == HyperplaneKind.NON_VERTICAL),
            ["H:left/a", "H:left/b"],
        )

    def test_immersed_double_is_not_special(self):
        verdict = check_special(total_space(_datum("double-aab.goc").graph).complex)
        self.assertFalse(verdict.special)
        self.assertEqual(verdict.pathology.value, "DIRECT_SELF_OSCULATION")

    def test_embedded_attachments_keep_vertical_hyperplanes_clean(self):
        rng = random.Random(2024)
        for _ in range(50):
            datum = random_graph_of_graphs(rng, embedded=True)
            with self.subTest(datum=datum.name):
                t = total_space(datum.graph)
                c = t.complex
                classification = classify_hyperplanes(t)
                report = classification.report
                structure = HyperplaneStructure(c)
                local = {u: HyperplaneStructure(space) for u, space in datum.graph.vertex_spaces.items()}

                by_id = {h.id: h for h in structure.hyperplanes}
                for hyperplane in classification.vertical:
                    self.assertTrue(by_id[hyperplane].two_sided)
                    self.assertNotIn(hyperplane, report.one_sided)
                self.assertEqual([w for w in report.self_crossings if w.hyperplane in classification.vertical_of], [])
                self.assertEqual(
                    [w for w in report.direct_self_osculations if w.hyperplane in classification.vertical_of], []
                )

                # Per attaching side, a vertical hyperplane never both crosses and osculates one vertex-space hyperplane.
                for hyperplane in classification.vertical:
                    crossing, osculating = set(), set()
                    for v in c.vertices:
                        for first, second in permutations(c.edge_ends(v), 2):
                            if first.edge not in t.horizontal_edges or structure.of(first.edge).id != hyperplane:
                                continue
                            origin = t.provenance[second.edge]
                            if origin.layer is not None:
                                continue
                            key = (first.forward, origin.gamma, local[origin.gamma].of(origin.cell).id)
                            (crossing if c.consecutive(v, first, second) else osculating).add(key)
                    self.assertEqual(crossing & osculating, set())

    def test_euler_formula_on_random_data(self):
        rng = random.Random(5)
        for _ in range(15):
            datum = random_graph_of_graphs(rng, embedded=False)
            t = total_space(datum.graph)
            self.assertEqual(t.complex.euler_characteristic(), euler_characteristic_formula(datum.graph))


class MonodromyTests(SimpleTestCase):
    def test_orders(self):
        for filename, order in (("rose-swap.goc", 2), ("rose-rotate.goc", 3), ("double-aab.goc", 1)):
            datum = _datum(filename)
            with self.subTest(datum=datum.name):
                monodromy = compute_monodromy(datum.graph, datum.locally_constant)
                self.assertEqual(monodromy.order, order)

    def test_cap(self):
        datum = _datum("rose-rotate.goc")
        with self.assertRaises(GroupOrderCapExceeded):
            compute_monodromy(datum.graph, datum.locally_constant, cap=2)

    def test_trivialization(self):
        for filename, order in (("rose-swap.goc", 2), ("rose-rotate.goc", 3)):
            datum = _datum(filename)
            with self.subTest(datum=datum.name):
                trivialized = trivialize_monodromy(datum.graph, datum.locally_constant)
                self.assertEqual(trivialized.degree, order)
                self.assertEqual(trivialized.base_vertex, "v.1")
                self.assertEqual(len(trivialized.graph.vertices), order)
                lifted = compute_monodromy(trivialized.graph, trivialized.locally_constant, trivialized.base_vertex)
                self.assertTrue(lifted.trivial)
                cs = make_constant(trivialized.graph, trivialized.locally_constant, trivialized.base_vertex)
                self.assertEqual(set(cs.psi), set(trivialized.graph.vertices))

    def test_trivial_monodromy_is_kept(self):
        datum = _datum("double-a.goc")
        trivialized = trivialize_monodromy(datum.graph, datum.locally_constant)
        self.assertEqual(trivialized.degree, 1)
        self.assertIs(trivialized.graph, datum.graph)

    def test_make_constant_needs_trivial_monodromy(self):
        datum = _datum("rose-swap.goc")
        with self.assertRaises(ConstantStructureError):
            make_constant(datum.graph, datum.locally_constant)

    def test_lift_rejects_bad_voltages(self):
        datum = _datum("rose-swap.goc")
        with self.assertRaises(GraphOfComplexesError):
            lift_graph_of_complexes(datum.graph, datum.locally_constant, {"e": (0, 0)}, 2)
        with self.assertRaises(GraphOfComplexesError):
            lift_graph_of_complexes(datum.graph, datum.locally_constant, {"e": (0, 1)}, 2)


class RetractionTests(SimpleTestCase):
    def _check(self, datum, base):
        retraction = build_retraction(datum.graph, datum.constant, base)
        r, target = retraction.map, datum.graph.vertex_spaces[base]
        self.assertEqual(compose(retraction.section, r), identity(target))
        for u in datum.graph.vertices:
            self.assertTrue(is_isomorphism(compose(vertex_space_inclusion(retraction.total, u), r)))
        target_structure = HyperplaneStructure(target)
        for first, second in parallel_pairs(retraction.total.complex):
            first_image, second_image = r.directed(first), r.directed(second)
            if first_image is None or second_image is None:
                continue
            self.assertTrue(target_structure.same_directed_class(first_image, second_image))
        return retraction

    def test_double_retracts_onto_either_side(self):
        datum = _datum("double-aab.goc")
        for base in ("left", "right"):
            with self.subTest(base=base):
                retraction = self._check(datum, base)
                self.assertTrue(retraction.map.is_collapsing)
                self.assertEqual(retraction.base_vertex, base)

    def test_random_constant_data(self):
        rng = random.Random(99)
        for embedded in (True, False):
            for _ in range(13):
                datum = random_constant_datum(rng, embedded=embedded)
                with self.subTest(datum=datum.name):
                    self._check(datum, datum.graph.vertices[0])

    def test_collapses_horizontal_edges(self):
        datum = _datum("double-a.goc")
        retraction = build_retraction(datum.graph, datum.constant, "left")
        self.assertIsNone(retraction.map.directed(DirectedEdge("e/c0", True)))
        self.assertEqual(retraction.map.vertex("right/v"), "v")


class CorollaryTests(SimpleTestCase):
    def test_embedded_double_passes(self):
        datum = _datum("double-a.goc")
        report = check_corollary_hypotheses(datum.graph, datum.constant)
        self.assertTrue(report.passed)
        self.assertEqual(report.failures(), [])

    def test_immersed_double_fails(self):
        datum = _datum("double-aab.goc")
        report = check_corollary_hypotheses(datum.graph, datum.constant)
        self.assertFalse(report.passed)
        self.assertFalse(report.edges[0].embedded)
        self.assertIn("not an embedding", report.failures()[0])

    def test_passing_hypotheses_give_special_total_space(self):
        rng = random.Random(17)
        checked = 0
        for _ in range(500):
            if checked == 50:
                break
            datum = random_constant_datum(rng, embedded=True)
            report = check_corollary_hypotheses(datum.graph, datum.constant)
            if not report.passed:
                continue
            checked += 1
            with self.subTest(datum=datum.name):
                self.assertTrue(check_special(total_space(datum.graph).complex).special)
        self.assertEqual(checked, 50)
