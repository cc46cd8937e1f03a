"""
Command, API and registry tests for the cubex toolkit.
"""
import json
import tempfile
from io import StringIO
from pathlib import Path

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase
from rest_framework import status
from rest_framework.test import APIClient

from .certificates import format_certificate, parse_certificate
from .enums import ExitCode
from .management.commands.cubex import Command, run
from .models import CertificateRecord
from .pipeline import specialize
from .services import CertificateService
from .workspace import Workspace, serialize_goc


CORPUS = settings.CUBEX_CORPUS_DIR


def _bundle(filename: str) -> str:
    workspace = Workspace().load_path(CORPUS / filename)
    return serialize_goc(workspace.goc(workspace.primary(CORPUS / filename, "goc")))


def _cubex(*argv):
    out, err = StringIO(), StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


class CubexCommandTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_usage_errors(self):
        self.assertEqual(_cubex()[0], ExitCode.USAGE)
        self.assertEqual(_cubex("bogus")[0], ExitCode.USAGE)
        self.assertEqual(_cubex("--help")[0], ExitCode.OK)

    def test_validate(self):
        code, out, _ = _cubex("validate", CORPUS / "torus.cux")
        self.assertEqual(code, ExitCode.OK)
        self.assertIn("npc", out.splitlines())

    def test_structured_output(self):
        code, out, _ = _cubex("validate", "--format", "structured", CORPUS / "torus.cux")
        self.assertEqual(code, ExitCode.OK)
        self.assertTrue(json.loads(out)["npc"])

    def test_special_verdicts(self):
        self.assertEqual(_cubex("special", CORPUS / "torus.cux")[1], "special\n")
        code, out, _ = _cubex("special", CORPUS / "klein.cux")
        self.assertEqual(code, ExitCode.VERDICT_FAILED)
        self.assertTrue(out.startswith("not special: ONE_SIDED"))

    def test_library_complex(self):
        code, out, _ = _cubex("special", "lib:direct-osculation")
        self.assertEqual(code, ExitCode.VERDICT_FAILED)
        self.assertIn("DIRECT_SELF_OSCULATION", out)

    def test_missing_file(self):
        code, _, err = _cubex("validate", CORPUS / "missing.cux")
        self.assertEqual(code, ExitCode.INVALID_INPUT)
        self.assertTrue(err.startswith("error:"))

    def test_covers(self):
        code, out, _ = _cubex("covers", CORPUS / "rose2.cux", "--max-degree", 2)
        self.assertEqual(code, ExitCode.OK)
        self.assertIn("# 4 cover(s) up to degree 2", out)

    def test_total_of_double(self):
        target = self.dir / "total.cux"
        code, out, _ = _cubex("total", CORPUS / "double-aab.goc", "--out", target)
        self.assertEqual(code, ExitCode.OK)
        self.assertIn("euler -2 (formula -2)", out)
        self.assertIn("not special", out)
        self.assertTrue(target.exists())

    def test_monodromy(self):
        code, out, _ = _cubex("monodromy", CORPUS / "rose-rotate.goc")
        self.assertEqual(code, ExitCode.OK)
        self.assertIn("order 3", out)

    def test_double(self):
        target = self.dir / "double.goc"
        code, _, _ = _cubex("double", CORPUS / "rose2.cux", CORPUS / "loop_a.map", "--out", target)
        self.assertEqual(code, ExitCode.OK)
        workspace = Workspace().load_path(target)
        self.assertEqual(workspace.primary(target, "goc"), "double-rose2-loop-a")

    def test_specialize_and_verify(self):
        cert = self.dir / "aab.cert"
        code, out, _ = _cubex("specialize", CORPUS / "double-aab.goc", "--emit", cert)
        self.assertEqual(code, ExitCode.OK)
        self.assertIn("vertex-cover: degree 3", out)
        self.assertEqual(parse_certificate(cert.read_text()).vertex_degree, 3)

        self.assertEqual(_cubex("verify", cert, CORPUS / "double-aab.goc")[:2], (ExitCode.OK, "valid\n"))
        code, out, _ = _cubex("verify", cert, CORPUS / "double-a.goc")
        self.assertEqual(code, ExitCode.VERDICT_FAILED)
        self.assertIn("input hash mismatch", out)

    def test_specialize_inconclusive(self):
        code, out, _ = _cubex("specialize", CORPUS / "double-aab.goc", "--vertex-budget", 2)
        self.assertEqual(code, ExitCode.INCONCLUSIVE)
        self.assertIn("inconclusive at VERTEX_COVER", out)

    def test_malformed_certificate(self):
        cert = self.dir / "bad.cert"
        cert.write_text("not a certificate\n")
        self.assertEqual(_cubex("verify", cert, CORPUS / "double-a.goc")[0], ExitCode.INVALID_INPUT)

    def test_call_command(self):
        out = StringIO()
        call_command("cubex", "special", str(CORPUS / "torus.cux"), stdout=out)
        self.assertEqual(out.getvalue().strip(), "special")
        with self.assertRaises(SystemExit) as ctx:
            call_command("cubex", "special", str(CORPUS / "klein.cux"), stdout=StringIO())
        self.assertEqual(ctx.exception.code, ExitCode.VERDICT_FAILED)

    def test_subcommands_live_on_the_command_parser(self):
        parser = Command().create_parser("manage.py", "cubex")
        args = parser.parse_args(["covers", "lib:rose:2", "--max-degree", "2", "--format", "structured"])
        self.assertEqual((args.command, args.file, args.max_degree, args.format), ("covers", "lib:rose:2", 2, "structured"))
        with self.assertRaises(CommandError):
            parser.parse_args(["double", "lib:rose:2"])

    def test_call_command_with_options(self):
        out = StringIO()
        call_command("cubex", "validate", "--format", "structured", str(CORPUS / "torus.cux"), stdout=out)
        self.assertTrue(json.loads(out.getvalue())["npc"])
        with self.assertRaises(CommandError):
            call_command("cubex", "bogus", stdout=StringIO())

    def test_help_goes_to_the_given_stream(self):
        code, out, _ = _cubex("--help")
        self.assertEqual(code, ExitCode.OK)
        self.assertIn("specialize", out)


class MaintenanceCommandTests(SimpleTestCase):
    def test_selfcheck(self):
        out = StringIO()
        call_command("cubex_selfcheck", "--samples", "5", stdout=out)
        self.assertIn("All checks passed!", out.getvalue())

    def test_corpus(self):
        with tempfile.TemporaryDirectory() as outdir:
            call_command("cubex_corpus", outdir, "--seed", "4", "--count", "3", "--constant", stdout=StringIO())
            files = sorted(Path(outdir).glob("*.goc"))
            self.assertEqual([f.name for f in files], [f"random-4-{i:03d}.goc" for i in range(3)])
            workspace = Workspace().load_path(files[0])
            self.assertIsNotNone(workspace.goc(workspace.primary(files[0], "goc")).constant)


class CertificateServiceTests(TestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        workspace = Workspace().load_path(CORPUS / "double-a.goc")
        cls.certificate = specialize(workspace.goc("double-a")).certificate

    def test_record_is_idempotent(self):
        first = CertificateService.record(self.certificate)
        second = CertificateService.record(self.certificate)
        self.assertEqual(first.id, second.id)
        self.assertEqual(CertificateRecord.objects.count(), 1)
        self.assertEqual(first.certificate_text, format_certificate(self.certificate))
        self.assertEqual(first.voltages["vertex"], {"a": "()", "b": "()"})

    def test_get(self):
        CertificateService.record(self.certificate)
        stored = CertificateService.get(self.certificate.input_hash)
        self.assertEqual(stored["datum"], "double-a")
        self.assertEqual(stored["statistics"]["euler"], -2)

    def test_get_unknown(self):
        with self.assertRaises(ValueError):
            CertificateService.get("0" * 64)


class APITests(TestCase):
    def setUp(self):
        self.client = APIClient()

    def test_health_check(self):
        response = self.client.get("/api/v1/health/")
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["status"], "healthy")
        detailed = self.client.get("/api/v1/health/detailed/")
        self.assertIn("budgets", detailed.data)

    def test_special(self):
        text = (CORPUS / "klein.cux").read_text()
        response = self.client.post("/api/v1/complexes/special/", {"text": text}, format="json")
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertFalse(response.data["special"])
        self.assertEqual(response.data["pathology"], "ONE_SIDED")

    def test_hyperplanes(self):
        text = (CORPUS / "torus.cux").read_text()
        response = self.client.post("/api/v1/complexes/hyperplanes/", {"text": text}, format="json")
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual([h["id"] for h in response.data["hyperplanes"]], ["H:a", "H:b"])
        self.assertEqual(response.data["crossings"], [["H:a", "H:b"]])

    def test_covers(self):
        text = (CORPUS / "rose2.cux").read_text()
        response = self.client.post("/api/v1/covers/", {"text": text, "max_degree": 2}, format="json")
        self.assertEqual(len(response.data["covers"]), 4)

    def test_invalid_complex(self):
        response = self.client.post("/api/v1/complexes/validate/", {"text": "edge a v w\n"}, format="json")
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertFalse(response.data["success"])
        self.assertIn("error", response.data)

    def test_missing_text(self):
        response = self.client.post("/api/v1/complexes/validate/", {}, format="json")
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn("text", response.data["errors"])

    def test_specialize_records_certificate(self):
        text = _bundle("double-a.goc")
        response = self.client.post("/api/v1/specialize/", {"text": text}, format="json")
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertTrue(response.data["success"])
        record = CertificateRecord.objects.get(id=response.data["record_id"])
        self.assertEqual(record.input_text, text.strip())

        fetched = self.client.get(f"/api/v1/certificates/{response.data['input_hash']}/")
        self.assertEqual(fetched.status_code, status.HTTP_200_OK)
        self.assertEqual(fetched.data["certificate"], response.data["certificate"])

        verified = self.client.post(
            "/api/v1/certificates/verify/",
            {"certificate": response.data["certificate"], "text": text},
            format="json",
        )
        self.assertTrue(verified.data["valid"])

    def test_specialize_inconclusive(self):
        response = self.client.post(
            "/api/v1/specialize/", {"text": _bundle("double-aab.goc"), "vertex_budget": 2}, format="json"
        )
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertFalse(response.data["success"])
        self.assertEqual(response.data["inconclusive"]["stage"], "VERTEX_COVER")
        self.assertEqual(CertificateRecord.objects.count(), 0)

    def test_unknown_certificate(self):
        response = self.client.get(f"/api/v1/certificates/{'0' * 64}/")
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)
