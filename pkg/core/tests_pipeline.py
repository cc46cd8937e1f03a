"""
Tests for budgets, certificates and the specialization pipeline.
"""
import dataclasses
import os
import random
from unittest.mock import MagicMock, patch

from django.conf import settings
from django.test import SimpleTestCase, override_settings

from .budgets import BUDGET_ENV, Budgets, parse_budget_override
from .certificates import HEADER, format_certificate, input_hash, parse_certificate
from .complexes.library import rose
from .covers import VoltageAssignment, build_cover
from .enums import Stage
from .exceptions import CertificateError, CubexError, GraphOfComplexesError
from .pipeline import (
    derive_edge_immersions,
    find_good_vertex_cover,
    replay_certificate,
    specialize,
    verify_certificate,
)
from .random_complexes import random_graph_of_graphs
from .workspace import Workspace


CORPUS = settings.CUBEX_CORPUS_DIR


def _datum(filename: str):
    workspace = Workspace().load_path(CORPUS / filename)
    return workspace.goc(workspace.primary(CORPUS / filename, "goc"))


class BudgetTests(SimpleTestCase):
    def test_overrides(self):
        budgets = Budgets().with_overrides(vertex=3, gamma=None)
        self.assertEqual(budgets.vertex, 3)
        self.assertEqual(budgets.gamma, Budgets().gamma)

    def test_non_positive_budget(self):
        with self.assertRaises(CubexError):
            Budgets().with_overrides(vertex=0)

    def test_override_text(self):
        both = parse_budget_override("4", Budgets())
        self.assertEqual((both.max_degree, both.vertex), (4, 4))
        named = parse_budget_override("vertex=2, gamma=16, cap=32", Budgets())
        self.assertEqual((named.vertex, named.gamma, named.group_order_cap), (2, 16, 32))
        with self.assertRaises(CubexError):
            parse_budget_override("vertex=two", Budgets())
        with self.assertRaises(CubexError):
            parse_budget_override("depth=2", Budgets())

    @override_settings(CUBEX_VERTEX_BUDGET=5, CUBEX_GAMMA_BUDGET=12)
    def test_from_settings(self):
        with patch.dict(os.environ, {BUDGET_ENV: ""}):
            budgets = Budgets.from_settings()
        self.assertEqual((budgets.vertex, budgets.gamma), (5, 12))

    @override_settings(CUBEX_VERTEX_BUDGET=5)
    def test_environment_wins(self):
        with patch.dict(os.environ, {BUDGET_ENV: "vertex=2"}):
            self.assertEqual(Budgets.from_settings().vertex, 2)


class ImmersionTests(SimpleTestCase):
    def test_double_immersions(self):
        datum = _datum("double-aab.goc")
        immersions = derive_edge_immersions(datum.graph, datum.constant, "left")
        self.assertEqual(list(immersions), ["e"])
        aab = Workspace().load_path(CORPUS / "aab.map").map("aab")
        self.assertEqual(dict(immersions["e"].vertex_map), dict(aab.vertex_map))
        self.assertEqual(dict(immersions["e"].edge_map), dict(aab.edge_map))

    def test_good_cover_search(self):
        datum = _datum("double-aab.goc")
        immersions = derive_edge_immersions(datum.graph, datum.constant, "left")
        space = datum.graph.vertex_spaces["left"]

        found = find_good_vertex_cover(space, immersions, max_degree=3)
        self.assertTrue(found.success)
        self.assertEqual(found.cover.degree, 3)
        self.assertTrue(all(e.embedded and not e.inter_osculations for e in found.elevations))

        exhausted = find_good_vertex_cover(space, immersions, max_degree=2)
        self.assertFalse(exhausted.success)
        self.assertTrue(exhausted.budget_exhausted)
        self.assertGreater(exhausted.candidates_tried, 0)

    def test_closure_beyond_max_degree_is_tried(self):
        transpositions = VoltageAssignment(3, {"a": (1, 0, 2), "b": (0, 2, 1)})
        with patch("core.pipeline.enumerate_covers", return_value=iter([build_cover(rose(2), transpositions)])):
            found = find_good_vertex_cover(rose(2), {}, max_degree=3)
        self.assertTrue(found.success)
        self.assertEqual(found.cover.degree, 6)
        self.assertTrue(found.cover.regular)
        self.assertEqual(found.candidates_tried, 1)

    def test_repeated_closure_is_tried_once(self):
        transpositions = VoltageAssignment(3, {"a": (1, 0, 2), "b": (0, 2, 1)})
        candidates = [build_cover(rose(2), transpositions), build_cover(rose(2), transpositions)]
        with patch("core.pipeline.enumerate_covers", return_value=iter(candidates)), \
                patch("core.pipeline.check_special", return_value=MagicMock(special=False)):
            found = find_good_vertex_cover(rose(2), {}, max_degree=3)
        self.assertFalse(found.success)
        self.assertTrue(found.budget_exhausted)
        self.assertEqual(found.candidates_tried, 1)


class SpecializeTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.double_a = _datum("double-a.goc")
        cls.double_aab = _datum("double-aab.goc")
        cls.run_a = specialize(cls.double_a)
        cls.run_aab = specialize(cls.double_aab)

    def test_embedded_double_needs_no_cover(self):
        cert = self.run_a.certificate
        self.assertTrue(self.run_a.success)
        self.assertEqual((cert.gamma_degree, cert.vertex_degree, cert.base_vertex), (1, 1, "left"))
        self.assertEqual(
            cert.statistics,
            {"vertices": 2, "edges": 5, "squares": 1, "cubes": 0, "euler": -2, "hyperplanes": 4},
        )
        self.assertEqual(cert.pathologies, 0)

    def test_immersed_double_needs_degree_three(self):
        cert = self.run_aab.certificate
        self.assertTrue(self.run_aab.success)
        self.assertEqual(cert.vertex_degree, 3)
        self.assertEqual(
            cert.statistics,
            {"vertices": 6, "edges": 21, "squares": 9, "cubes": 0, "euler": -6, "hyperplanes": 9},
        )
        self.assertTrue(self.run_aab.corollary.passed)
        self.assertTrue(self.run_aab.verdict.special)
        self.assertEqual(self.run_aab.splitting.graph.vertices, ("left", "right"))

    def test_transcript(self):
        transcript = self.run_aab.transcript
        self.assertTrue(transcript[0].startswith("trivialize: monodromy order 1"))
        self.assertTrue(any(line.startswith("vertex-cover: degree 3") for line in transcript))
        self.assertTrue(transcript[-1].startswith("verify:"))
        self.assertEqual(self.run_aab.certificate.transcript, transcript)

    def test_input_hash_is_stable(self):
        self.assertEqual(self.run_aab.certificate.input_hash, input_hash(_datum("double-aab.goc")))
        self.assertNotEqual(input_hash(self.double_a), input_hash(self.double_aab))

    def test_replay(self):
        replay = replay_certificate(self.run_aab.certificate, self.double_aab)
        self.assertTrue(replay.valid, replay.reason)
        self.assertEqual(replay.statistics, self.run_aab.certificate.statistics)
        self.assertTrue(verify_certificate(self.run_a.certificate, self.double_a))

    def test_replay_through_text(self):
        cert = parse_certificate(format_certificate(self.run_aab.certificate))
        self.assertEqual(cert.to_dict(), self.run_aab.certificate.to_dict())
        self.assertTrue(verify_certificate(cert, self.double_aab))

    def test_perturbed_voltages_are_rejected(self):
        cert = dataclasses.replace(
            self.run_aab.certificate, vertex_voltages=VoltageAssignment(1, {"a": (0,), "b": (0,)})
        )
        replay = replay_certificate(cert, self.double_aab)
        self.assertFalse(replay.valid)
        self.assertIn("DIRECT_SELF_OSCULATION", replay.reason)

    def test_other_input_is_rejected(self):
        replay = replay_certificate(self.run_aab.certificate, self.double_a)
        self.assertFalse(replay.valid)
        self.assertIn("input hash mismatch", replay.reason)

    def test_wrong_statistics_are_rejected(self):
        statistics = dict(self.run_aab.certificate.statistics, edges=99)
        cert = dataclasses.replace(self.run_aab.certificate, statistics=statistics)
        self.assertEqual(replay_certificate(cert, self.double_aab).reason, "statistics of the rebuilt complex differ")

    def test_listed_pathologies_are_rejected(self):
        cert = dataclasses.replace(self.run_aab.certificate, pathologies=1)
        self.assertFalse(verify_certificate(cert, self.double_aab))

    def test_vertex_budget_exhausted(self):
        run = specialize(self.double_aab, Budgets(vertex=2))
        self.assertFalse(run.success)
        self.assertEqual(run.inconclusive.stage, Stage.VERTEX_COVER)
        self.assertIn("up to degree 2", run.inconclusive.reason)


class MonodromyPipelineTests(SimpleTestCase):
    def test_mapping_torus(self):
        run = specialize(_datum("rose-swap.goc"))
        self.assertTrue(run.success, run.inconclusive and run.inconclusive.reason)
        self.assertEqual(run.certificate.gamma_degree, 2)
        self.assertEqual(run.certificate.base_vertex, "v.1")
        self.assertEqual(run.certificate.vertex_degree, 2)
        self.assertTrue(verify_certificate(run.certificate, _datum("rose-swap.goc")))

    def test_gamma_budget_exhausted(self):
        run = specialize(_datum("rose-rotate.goc"), Budgets(gamma=2))
        self.assertEqual(run.inconclusive.stage, Stage.TRIVIALIZE)
        self.assertEqual(run.transcript, ["trivialize: failed"])

    def test_datum_without_structure(self):
        datum = random_graph_of_graphs(random.Random(1), embedded=True)
        self.assertIsNone(datum.locally_constant)
        with self.assertRaises(GraphOfComplexesError):
            specialize(datum)


class CertificateFormatTests(SimpleTestCase):
    def setUp(self):
        self.text = "\n".join([
            HEADER,
            "datum double-x",
            "input-hash abc123",
            "base-vertex left",
            "gamma-degree 1",
            "gamma-perm e ()",
            "vertex-degree 2",
            "cover 2",
            "perm a (1 2)",
            "perm b ()",
            "stat euler -4",
            "pathologies 0",
            "transcript trivialize: monodromy order 1 gamma-degree 1",
        ]) + "\n"

    def test_parse(self):
        cert = parse_certificate(self.text)
        self.assertEqual(cert.vertex_voltages.perms, {"a": (1, 0), "b": (0, 1)})
        self.assertEqual(cert.gamma_voltages, {"e": (0,)})
        self.assertEqual(cert.statistics, {"euler": -4})
        self.assertEqual(cert.transcript, ["trivialize: monodromy order 1 gamma-degree 1"])
        self.assertEqual(format_certificate(cert), self.text)

    def test_missing_header(self):
        with self.assertRaises(CertificateError):
            parse_certificate(self.text.split("\n", 1)[1])

    def test_missing_field(self):
        with self.assertRaises(CertificateError):
            parse_certificate(self.text.replace("base-vertex left\n", ""))

    def test_degree_mismatch(self):
        with self.assertRaises(CertificateError):
            parse_certificate(self.text.replace("vertex-degree 2", "vertex-degree 3"))

    def test_unknown_keyword(self):
        with self.assertRaises(CertificateError):
            parse_certificate(self.text + "signature xyz\n")
