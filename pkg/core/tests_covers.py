"""
Tests for permutation helpers, finite covers and fiber products.
"""
import random

from django.test import SimpleTestCase

from .complexes.cells import CubeComplex, DirectedEdge, Edge
from .complexes.library import ComplexLibrary, cycle, rose, torus, word_map
from .complexes.links import validate
from .complexes.maps import CubicalMap, compose, is_local_isometry
from .covers import (
    VoltageAssignment,
    build_cover,
    elevation_count_oracle,
    enumerate_voltages,
    enumerate_covers,
    fiber_product,
    format_voltage_table,
    identity_cover,
    parse_voltage_table,
    presentation,
    random_cover,
    regular_closure,
    sheet_id,
    split_sheet,
)
from .exceptions import ComplexFormatError, CoverError, GroupOrderCapExceeded, NotLocalIsometryError
from .groups import (
    compose_perm,
    format_cycles,
    group_elements,
    group_order,
    is_transitive,
    parse_cycles,
    right_regular_action,
)


LETTERS = ("a+", "a-", "b+", "b-")


def _inverse_token(token: str) -> str:
    return token[:-1] + ("-" if token.endswith("+") else "+")


def _cyclically_reduced_word(rng: random.Random, length: int):
    while True:
        word = [rng.choice(LETTERS) for _ in range(length)]
        pairs = zip(word, word[1:] + word[:1])
        if length == 1 or all(second != _inverse_token(first) for first, second in pairs):
            return word


class PermutationTests(SimpleTestCase):
    def test_composition_applies_left_first(self):
        p, q = (1, 0, 2), (0, 2, 1)
        self.assertEqual(compose_perm(p, q), (2, 0, 1))

    def test_cycle_notation(self):
        self.assertEqual(format_cycles((1, 2, 0)), "(1 2 3)")
        self.assertEqual(format_cycles((0, 1, 2)), "()")
        self.assertEqual(parse_cycles("(1 2 3)", 3), (1, 2, 0))
        self.assertEqual(parse_cycles("()", 2), (0, 1))

    def test_bad_cycle_notation(self):
        with self.assertRaises(ComplexFormatError):
            parse_cycles("1 2", 3)

    def test_generated_group(self):
        gens = [(1, 0, 2), (0, 2, 1)]
        self.assertEqual(group_order(gens, 3), 6)
        self.assertTrue(is_transitive(gens, 3))
        self.assertFalse(is_transitive([(1, 0, 2)], 3))
        elements = group_elements(gens, 3)
        self.assertEqual(elements[0], (0, 1, 2))
        action = right_regular_action(elements, gens[0])
        self.assertEqual(sorted(action), list(range(6)))


class VoltageTests(SimpleTestCase):
    def test_sheet_ids(self):
        self.assertEqual(sheet_id("v", 0), "v.1")
        self.assertEqual(split_sheet("x.1.3"), ("x.1", 2))

    def test_voltage_table(self):
        voltages = parse_voltage_table("cover 3\nperm a (1 2 3)\nperm b ()\n")
        self.assertEqual(voltages.perms, {"a": (1, 2, 0), "b": (0, 1, 2)})
        self.assertEqual(format_voltage_table(voltages), "cover 3\nperm a (1 2 3)\nperm b ()\n")

    def test_voltage_table_errors(self):
        with self.assertRaises(ComplexFormatError):
            parse_voltage_table("perm a (1 2)\n")
        with self.assertRaises(ComplexFormatError):
            parse_voltage_table("cover 2\nperm a (1 2)\nperm a ()\n")

    def test_torus_presentation(self):
        pres = presentation(torus())
        self.assertEqual(pres.generators, ("a", "b"))
        self.assertEqual(len(pres.relators), 1)


class CoverTests(SimpleTestCase):
    def test_identity_cover(self):
        cover = identity_cover(torus())
        self.assertEqual(cover.degree, 1)
        self.assertTrue(cover.regular)
        self.assertEqual(cover.total.cell_counts(), torus().cell_counts())

    def test_relator_violation(self):
        voltages = VoltageAssignment(3, {"a": (1, 0, 2), "b": (1, 2, 0)})
        with self.assertRaises(CoverError):
            build_cover(torus(), voltages)

    def test_missing_voltage(self):
        with self.assertRaises(CoverError):
            build_cover(torus(), VoltageAssignment(2, {"a": (1, 0)}))

    def test_rose_cover_counts(self):
        covers = list(enumerate_covers(rose(2), 3))
        self.assertEqual(len([c for c in covers if c.degree <= 2]), 4)
        self.assertEqual(len(covers), 11)
        self.assertEqual(len([c for c in covers if c.regular]), 8)
        for cover in covers:
            self.assertEqual(cover.total.euler_characteristic(), -cover.degree)

    def test_torus_cover_counts(self):
        covers = list(enumerate_covers(torus(), 3))
        self.assertEqual(len(covers), 8)
        for cover in covers:
            self.assertTrue(cover.regular)
            self.assertEqual(cover.total.euler_characteristic(), 0)
            self.assertTrue(validate(cover.total).is_npc)

    def test_voltage_enumeration_matches_covers(self):
        voltages = list(enumerate_voltages(rose(2), 3))
        self.assertEqual(len(voltages), 11)
        self.assertTrue(all(v.is_transitive() for v in voltages))
        self.assertEqual([v.degree for v in voltages], sorted(v.degree for v in voltages))

    def test_min_degree(self):
        degrees = {c.degree for c in enumerate_covers(rose(2), 3, min_degree=3)}
        self.assertEqual(degrees, {3})

    def test_cover_of_cube_lifts_cubes(self):
        cube = ComplexLibrary.build("cube")
        cover = identity_cover(cube)
        self.assertEqual(cover.total.cubes["k.1"].bottom, "q0.1")
        self.assertEqual(cover.total.cell_counts(), (8, 12, 6, 1))
        self.assertTrue(validate(cover.total).is_npc)

    def test_klein_double_cover_is_a_torus(self):
        klein = ComplexLibrary.build("klein")
        cover = build_cover(klein, VoltageAssignment(2, {"a": (0, 1), "b": (1, 0)}))
        self.assertEqual(cover.total.cell_counts(), (2, 4, 2, 0))
        self.assertTrue(validate(cover.total).is_npc)

    def test_regular_closure(self):
        cover = build_cover(rose(2), VoltageAssignment(3, {"a": (1, 0, 2), "b": (0, 2, 1)}))
        self.assertFalse(cover.regular)
        closure = regular_closure(cover)
        self.assertEqual(closure.degree, 6)
        self.assertTrue(closure.regular)
        with self.assertRaises(GroupOrderCapExceeded):
            regular_closure(cover, cap=4)

    def test_regular_closure_of_regular_cover(self):
        cover = build_cover(rose(2), VoltageAssignment(2, {"a": (1, 0), "b": (0, 1)}))
        self.assertIs(regular_closure(cover), cover)

    def test_random_cover_is_transitive(self):
        rng = random.Random(3)
        for degree in (2, 3, 4):
            cover = random_cover(torus(), degree, rng)
            self.assertEqual(cover.degree, degree)
            self.assertTrue(cover.voltages.is_transitive())


class FiberProductTests(SimpleTestCase):
    def setUp(self):
        self.loop = word_map(cycle(1), torus(), ["a+"])

    def test_loop_lifts_to_one_long_elevation(self):
        cover = build_cover(torus(), VoltageAssignment(2, {"a": (1, 0), "b": (0, 1)}))
        product = fiber_product(self.loop, cover)
        self.assertTrue(product.is_connected)
        self.assertEqual(product.components[0].degree, 2)

    def test_loop_lifts_to_two_short_elevations(self):
        cover = build_cover(torus(), VoltageAssignment(2, {"a": (0, 1), "b": (1, 0)}))
        product = fiber_product(self.loop, cover)
        self.assertEqual(len(product.components), 2)
        self.assertEqual([e.degree for e in product.components], [1, 1])

    def test_squares_commute(self):
        cover = build_cover(torus(), VoltageAssignment(2, {"a": (1, 0), "b": (1, 0)}))
        for elevation in fiber_product(self.loop, cover).components:
            self.assertTrue(is_local_isometry(elevation.elevation_map))
            self.assertEqual(
                compose(elevation.elevation_map, cover.projection),
                compose(elevation.covering_map, self.loop),
            )

    def test_requires_local_isometry(self):
        turn = word_map(cycle(2), torus(), ["a+", "b+"])
        cover = identity_cover(torus())
        with self.assertRaises(NotLocalIsometryError):
            fiber_product(turn, cover)
        self.assertEqual(len(fiber_product(turn, cover, require_local_isometry=False).components), 1)

    def test_rejects_disconnected_source(self):
        two_loops = CubeComplex("two-loops", ("p", "q"), {"x": Edge("p", "p"), "y": Edge("q", "q")}, {})
        f = CubicalMap(
            two_loops, torus(), {"p": "v", "q": "v"},
            {"x": DirectedEdge("a", True), "y": DirectedEdge("b", True)},
        )
        self.assertTrue(is_local_isometry(f))
        with self.assertRaises(CoverError):
            fiber_product(f, identity_cover(torus()))

    def test_component_count_matches_orbit_oracle(self):
        rng = random.Random(11)
        base = rose(2)
        for _ in range(100):
            length = rng.randint(1, 6)
            f = word_map(cycle(length), base, _cyclically_reduced_word(rng, length))
            cover = random_cover(base, rng.randint(1, 5), rng)
            with self.subTest(map=f.label, voltages=format_voltage_table(cover.voltages)):
                product = fiber_product(f, cover)
                self.assertEqual(len(product.components), elevation_count_oracle(f, cover))
                self.assertEqual(sum(e.degree for e in product.components), cover.degree)
                for e in product.components:
                    self.assertEqual(e.complex.euler_characteristic(), e.degree * f.source.euler_characteristic())

    def test_elevations_of_covers_multiply_euler_characteristic(self):
        rng = random.Random(12)
        base = rose(2)
        for _ in range(30):
            inner = random_cover(base, rng.randint(1, 3), rng)
            outer = random_cover(base, rng.randint(1, 4), rng)
            with self.subTest(inner=format_voltage_table(inner.voltages), outer=format_voltage_table(outer.voltages)):
                product = fiber_product(inner.projection, outer)
                self.assertEqual(len(product.components), elevation_count_oracle(inner.projection, outer))
                self.assertEqual(sum(e.degree for e in product.components), outer.degree)
                for e in product.components:
                    self.assertEqual(e.complex.euler_characteristic(), -e.degree * inner.degree)
