"""
Tests for hyperplanes and specialness pathologies.
"""
import random
from itertools import combinations

from django.test import SimpleTestCase

from .complexes.cells import DirectedEdge, Subcomplex
from .complexes.library import ComplexLibrary, rose, torus
from .dot import export_dot
from .enums import Pathology
from .exceptions import ComplexStructureError
from .hyperplanes import (
    HyperplaneStructure,
    check_special,
    compute_hyperplanes,
    crossing_pairs,
    detect_pathologies,
    hyperplane_of,
    subcomplex_osculation,
)
from .random_complexes import random_graph, small_complexes


CORNERS = ((0, 0), (1, 0), (0, 1), (1, 1))


def _naive_closure(items, squares, pairs_of):
    """Merge classes until no square adds a new identification."""
    classes = {item: frozenset([item]) for item in items}
    changed = True
    while changed:
        changed = False
        for square in squares:
            for first, second in pairs_of(square):
                if classes[first] is not classes[second]:
                    merged = classes[first] | classes[second]
                    for item in merged:
                        classes[item] = merged
                    changed = True
    return classes


def _edge_partition(c):
    classes = _naive_closure(
        c.edge_ids,
        c.squares.values(),
        lambda s: ((s.bottom.edge, s.top.edge), (s.left.edge, s.right.edge)),
    )
    return set(classes.values())


def _directed_classes(c):
    ends = [DirectedEdge(e, forward) for e in c.edge_ids for forward in (True, False)]

    def pairs(s):
        return (
            (s.bottom, s.top), (s.left, s.right),
            (s.bottom.reversed(), s.top.reversed()), (s.left.reversed(), s.right.reversed()),
        )

    return _naive_closure(ends, c.squares.values(), pairs)


def _naive_consecutive(c):
    pairs = set()
    for square in c.squares.values():
        for corner in CORNERS:
            first, second = square.corner_ends(corner)
            pairs.add((c.initial(first), frozenset((first, second))))
    return pairs


class HyperplaneTests(SimpleTestCase):
    def test_torus_hyperplanes(self):
        hyperplanes = compute_hyperplanes(torus())
        self.assertEqual([h.id for h in hyperplanes], ["H:a", "H:b"])
        self.assertTrue(all(h.two_sided for h in hyperplanes))
        self.assertEqual(crossing_pairs(torus()), {("H:a", "H:b")})

    def test_cube_hyperplanes(self):
        cube = ComplexLibrary.build("cube")
        hyperplanes = compute_hyperplanes(cube)
        self.assertEqual([h.id for h in hyperplanes], ["H:x00", "H:y00", "H:z00"])
        self.assertEqual(len(hyperplanes[0].edges), 4)
        self.assertEqual(len(crossing_pairs(cube)), 3)

    def test_klein_has_a_one_sided_hyperplane(self):
        self.assertFalse(hyperplane_of(ComplexLibrary.build("klein"), "a").two_sided)
        self.assertTrue(hyperplane_of(ComplexLibrary.build("klein"), "b").two_sided)

    def test_unknown_edge(self):
        with self.assertRaises(ComplexStructureError):
            hyperplane_of(torus(), "z")

    def test_directed_classes_split_two_sided_hyperplanes(self):
        hs = HyperplaneStructure(ComplexLibrary.build("cycle-x-interval:3"))
        self.assertTrue(hs.same_directed_class(DirectedEdge("y0", True), DirectedEdge("y2", True)))
        self.assertFalse(hs.same_directed_class(DirectedEdge("y0", True), DirectedEdge("y2", False)))

    def test_partition_matches_naive_closure(self):
        for c in small_complexes():
            with self.subTest(complex=c.name):
                hs = HyperplaneStructure(c)
                self.assertEqual({frozenset(h.edges) for h in hs.hyperplanes}, _edge_partition(c))
                classes = _directed_classes(c)
                for first, second in combinations(classes, 2):
                    self.assertEqual(
                        hs.same_directed_class(first, second),
                        second in classes[first],
                    )

    def test_dot_export(self):
        dot = export_dot(torus())
        self.assertTrue(dot.startswith('graph "torus" {'))
        self.assertIn('\t"H:a" -- "H:b";', dot.splitlines())


class PathologyTests(SimpleTestCase):
    def test_ground_truths(self):
        cases = [
            ("torus", None),
            ("cube", None),
            ("klein", Pathology.ONE_SIDED),
            ("direct-osculation", Pathology.DIRECT_SELF_OSCULATION),
            ("inter-osculation", Pathology.INTER_OSCULATION),
            ("corner", Pathology.NOT_NPC),
        ]
        for name, expected in cases:
            with self.subTest(complex=name):
                verdict = check_special(ComplexLibrary.build(name))
                self.assertEqual(verdict.pathology, expected)
                self.assertEqual(verdict.special, expected is None)

    def test_klein_witness(self):
        verdict = check_special(ComplexLibrary.build("klein"))
        self.assertEqual(verdict.witness, "H:a is 1-sided")

    def test_direct_osculation_witness(self):
        report = detect_pathologies(ComplexLibrary.build("direct-osculation"))
        witness = report.direct_self_osculations[0]
        self.assertEqual(witness.hyperplane, "H:e1")
        self.assertEqual(witness.pair.vertex, "v")
        self.assertEqual(witness.pair.tokens, ("e1+", "e2+"))

    def test_strict_definition_flags_torus(self):
        self.assertTrue(check_special(torus()).special)
        verdict = check_special(torus(), strict=True)
        self.assertEqual(verdict.pathology, Pathology.DIRECT_SELF_OSCULATION)

    def test_graphs_are_special(self):
        rng = random.Random(7)
        self.assertTrue(check_special(rose(4)).special)
        for _ in range(20):
            self.assertTrue(check_special(random_graph(rng, max_edges=12)).special)

    def test_scan_matches_brute_force(self):
        for c in small_complexes():
            with self.subTest(complex=c.name):
                hs = HyperplaneStructure(c)
                report = detect_pathologies(c, structure=hs)
                classes = _directed_classes(c)
                consecutive = _naive_consecutive(c)
                hyperplane = {e: frozenset(group) for group in _edge_partition(c) for e in group}

                self_crossings, osculations = set(), set()
                for v in c.vertices:
                    for first, second in combinations(c.edge_ends(v), 2):
                        if hyperplane[first.edge] != hyperplane[second.edge]:
                            continue
                        pair = (v, frozenset((first, second)))
                        if pair in consecutive:
                            self_crossings.add(pair)
                        elif second in classes[first]:
                            osculations.add(pair)

                def found(witnesses):
                    return {(w.pair.vertex, frozenset((w.pair.first, w.pair.second))) for w in witnesses}

                self.assertEqual(found(report.self_crossings), self_crossings)
                self.assertEqual(found(report.direct_self_osculations), osculations)
                one_sided = {
                    h.id for h in hs.hyperplanes
                    if any(DirectedEdge(e, False) in classes[DirectedEdge(e, True)] for e in h.edges)
                }
                self.assertEqual(set(report.one_sided), one_sided)

    def test_inter_osculation_matches_brute_force(self):
        complexes = list(small_complexes()) + [ComplexLibrary.build("inter-osculation")]
        found_any = False
        for c in complexes:
            with self.subTest(complex=c.name):
                report = detect_pathologies(c)
                consecutive = _naive_consecutive(c)
                hyperplane = {e: frozenset(group) for group in _edge_partition(c) for e in group}

                crossing = set()
                for square in c.squares.values():
                    pair = frozenset((hyperplane[square.bottom.edge], hyperplane[square.left.edge]))
                    if len(pair) == 2:
                        crossing.add(pair)
                osculating = set()
                for v in c.vertices:
                    for first, second in combinations(c.edge_ends(v), 2):
                        pair = frozenset((hyperplane[first.edge], hyperplane[second.edge]))
                        if len(pair) == 2 and (v, frozenset((first, second))) not in consecutive:
                            osculating.add(pair)

                ids = {h.id: frozenset(h.edges) for h in compute_hyperplanes(c)}
                reported = {frozenset((ids[io.first], ids[io.second])) for io in report.inter_osculations}
                self.assertEqual(reported, crossing & osculating)
                for io in report.inter_osculations:
                    cross, osc = io.crossing, io.osculation
                    self.assertIn((cross.vertex, frozenset((cross.first, cross.second))), consecutive)
                    self.assertNotIn((osc.vertex, frozenset((osc.first, osc.second))), consecutive)
                found_any = found_any or bool(reported)
        self.assertTrue(found_any)


class SubcomplexOsculationTests(SimpleTestCase):
    def test_square_in_cylinder(self):
        c = ComplexLibrary.build("cycle-x-interval:3")
        y = Subcomplex.closure(c, squares=("s0",))
        findings = {f.hyperplane: f for f in subcomplex_osculation(c, y)}
        self.assertFalse(any(f.inter_osculates for f in findings.values()))
        self.assertTrue(findings["H:x0_0"].crosses)
        self.assertFalse(findings["H:x1_0"].crosses)
        self.assertTrue(findings["H:x1_0"].osculations)

    def test_rung_and_rail(self):
        c = ComplexLibrary.build("cycle-x-interval:3")
        y = Subcomplex.closure(c, edges=("y0", "x0_0"))
        findings = {f.hyperplane: f for f in subcomplex_osculation(c, y)}
        self.assertTrue(findings["H:y0"].inter_osculates)
        self.assertEqual(findings["H:y0"].crossing_edge, "y0")
        self.assertIn(("c1_0", DirectedEdge("y1", True)), findings["H:y0"].osculations)

    def test_rejects_open_subcomplex(self):
        with self.assertRaises(ComplexStructureError):
            subcomplex_osculation(torus(), Subcomplex(edges=frozenset({"a"})))
