"""
Management command writing random graphs of graphs as .goc bundles.
"""
import random
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import CubexError
from core.random_complexes import random_constant_datum, random_graph_of_graphs
from core.workspace import serialize_goc


class Command(BaseCommand):
    help = "Writes reproducible random graph-of-graphs data for external corpora"

    def add_arguments(self, parser):
        parser.add_argument("outdir")
        parser.add_argument("--seed", type=int, required=True)
        parser.add_argument("--count", type=int, default=10)
        parser.add_argument("--constant", action="store_true", help="copies of one vertex space, with psi maps")
        parser.add_argument("--immersed", action="store_true", help="allow attaching maps that are not embeddings")

    def handle(self, *args, **options):
        outdir = Path(options["outdir"])
        outdir.mkdir(parents=True, exist_ok=True)
        rng = random.Random(options["seed"])
        generate = random_constant_datum if options["constant"] else random_graph_of_graphs
        embedded = not options["immersed"]

        for i in range(options["count"]):
            try:
                datum = generate(rng, embedded=embedded)
            except CubexError as e:
                raise CommandError(str(e)) from e
            target = outdir / f"random-{options['seed']}-{i:03d}.goc"
            target.write_text(serialize_goc(datum), encoding="utf-8")
            self.stdout.write(f"{target}: {datum.name}")

        self.stdout.write(self.style.SUCCESS(f"Wrote {options['count']} file(s) to {outdir}"))
