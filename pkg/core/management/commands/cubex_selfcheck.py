"""
Management command running the desk-scale acceptance path.
"""
import random

from django.conf import settings
from django.core.management.base import BaseCommand

from core.certificates import format_certificate
from core.complexes.library import ComplexLibrary
from core.enums import Pathology
from core.exceptions import CubexError, InternalInvariantError
from core.graphs import classify_hyperplanes, total_space
from core.hyperplanes import check_special
from core.random_complexes import random_graph, random_graph_of_graphs
from core.services import PipelineService
from core.workspace import Workspace


GROUND_TRUTHS = [
    ("torus", None),
    ("klein", Pathology.ONE_SIDED),
    ("direct-osculation", Pathology.DIRECT_SELF_OSCULATION),
    ("inter-osculation", Pathology.INTER_OSCULATION),
]

DOUBLES = ["double-a.goc", "double-aab.goc"]


class Command(BaseCommand):
    help = "Runs specialness ground truths, a vertical hyperplane sample and double specialization with replay"

    def add_arguments(self, parser):
        parser.add_argument("--seed", type=int, default=0, help="seed of the random samples")
        parser.add_argument("--samples", type=int, default=20)

    def handle(self, *args, **options):
        self.failures = 0
        rng = random.Random(options["seed"])
        self.stdout.write(self.style.SUCCESS("Starting cubex self-check..."))

        self.stdout.write("\nSpecialness ground truths...")
        for name, expected in GROUND_TRUTHS:
            verdict = check_special(ComplexLibrary.build(name))
            self._report(name, verdict.pathology == expected, verdict.witness or "special")
        graphs_special = all(
            check_special(random_graph(rng, max_edges=20)).special for _ in range(options["samples"])
        )
        self._report(f"{options['samples']} random graphs", graphs_special, "all special")

        self.stdout.write("\nVertical hyperplanes of random graphs of graphs...")
        violations = 0
        for _ in range(options["samples"]):
            datum = random_graph_of_graphs(rng, embedded=True)
            try:
                classification = classify_hyperplanes(total_space(datum.graph))
            except InternalInvariantError as e:
                self.stdout.write(f"  {datum.name}: {e}")
                violations += 1
                continue
            for witness in classification.report.direct_self_osculations:
                if witness.hyperplane in classification.vertical_of:
                    self.stdout.write(f"  {datum.name}: {witness.describe()}")
                    violations += 1
        self._report(f"{options['samples']} total spaces", violations == 0, f"{violations} violation(s)")

        self.stdout.write("\nSpecializing doubles...")
        for filename in DOUBLES:
            self._specialize(settings.CUBEX_CORPUS_DIR / filename)

        if self.failures:
            self.stdout.write(self.style.ERROR(f"\n{self.failures} check(s) failed"))
            raise SystemExit(1)
        self.stdout.write(self.style.SUCCESS("\nAll checks passed!"))

    def _report(self, label: str, ok: bool, detail: str) -> None:
        if ok:
            self.stdout.write(self.style.SUCCESS(f"  ok   {label}: {detail}"))
        else:
            self.failures += 1
            self.stdout.write(self.style.ERROR(f"  FAIL {label}: {detail}"))

    def _specialize(self, path) -> None:
        try:
            workspace = Workspace().load_path(path)
            datum = workspace.goc(workspace.primary(path, "goc"))
            run = PipelineService.specialize(datum)
        except CubexError as e:
            self._report(path.name, False, str(e))
            return
        if run.certificate is None:
            self._report(path.name, False, f"inconclusive at {run.inconclusive.stage.value}: {run.inconclusive.reason}")
            return
        replay = PipelineService.verify(format_certificate(run.certificate), datum)
        self._report(
            path.name,
            replay["valid"],
            f"vertex degree {run.certificate.vertex_degree}, replay {'valid' if replay['valid'] else replay['reason']}",
        )
