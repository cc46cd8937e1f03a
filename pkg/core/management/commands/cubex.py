"""
Management command exposing the cube complex toolkit.

    python manage.py cubex special corpus/torus.cux
    python manage.py cubex covers lib:rose:2 --max-degree 3 --regular-only
    python manage.py cubex specialize corpus/double-aab.goc --emit aab.cert
    python manage.py cubex verify aab.cert corpus/double-aab.goc

FILE arguments are paths, or ``lib:NAME`` for library complexes. A file
that defines a graph of complexes stands for its total space.

Exit codes: 0 ok, 1 negative verdict, 2 inconclusive, 3 invalid input,
64 usage error.
"""
import argparse
import json
import logging
import sys
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO, Tuple

from django.core.management.base import BaseCommand, CommandError, CommandParser

from core.budgets import Budgets
from core.certificates import format_certificate
from core.complexes.cells import CubeComplex
from core.complexes.formats import serialize_complex
from core.enums import ExitCode, OutputFormat
from core.exceptions import CubexError, WorkspaceError
from core.graphs import GocDatum, TotalSpace, classify_hyperplanes, make_double, total_space
from core.services import ComplexService, GraphService, PipelineService
from core.workspace import LIBRARY_PREFIX, Workspace, serialize_goc


logger = logging.getLogger(__name__)


def add_subcommands(parser: CommandParser) -> None:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        choices=[f.value for f in OutputFormat],
        default=OutputFormat.TABULAR.value,
        help="tabular text or structured (JSON) output",
    )
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")
    sub.required = True

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_text, parents=[common])

    p = add("validate", "check the link condition at every vertex")
    p.add_argument("file")

    p = add("hyperplanes", "list hyperplanes and crossings")
    p.add_argument("file")
    p.add_argument("--dot", metavar="OUT", help="write the crossing graph in DOT format")
    p.add_argument("--strict-defn", action="store_true", help="literal reading of direct self-osculation")

    p = add("special", "decide specialness")
    p.add_argument("file")
    p.add_argument("--strict-defn", action="store_true", help="literal reading of direct self-osculation")

    p = add("covers", "enumerate connected covers as voltage tables")
    p.add_argument("file")
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--regular-only", action="store_true")

    p = add("total", "build the total space of a graph of complexes")
    p.add_argument("file")
    p.add_argument("--out", metavar="FILE", help="write the total space as .cux")

    p = add("monodromy", "monodromy group of a locally constant structure")
    p.add_argument("file")
    p.add_argument("--base", help="base vertex of Gamma")

    p = add("double", "double of a complex along a local isometry")
    p.add_argument("base")
    p.add_argument("edgemap")
    p.add_argument("--out", metavar="FILE", required=True)
    p.add_argument("--name")

    p = add("specialize", "search a finite special cover of the total space")
    p.add_argument("file")
    p.add_argument("--vertex-budget", type=int, default=None)
    p.add_argument("--gamma-budget", type=int, default=None)
    p.add_argument("--emit", metavar="CERT", help="write the certificate here instead of standard output")

    p = add("verify", "replay a certificate against its input")
    p.add_argument("certificate")
    p.add_argument("file")


# --- Loading ---

def _load(workspace: Workspace, argument: str) -> Tuple[CubeComplex, Optional[TotalSpace]]:
    """The complex a FILE argument names, with its total-space data when it is a goc."""
    if argument.startswith(LIBRARY_PREFIX):
        return workspace.complex(argument), None
    workspace.load_path(argument)
    if workspace.defines(argument, "goc"):
        datum = workspace.goc(workspace.primary(argument, "goc"))
        t = total_space(datum.graph)
        return t.complex, t
    return workspace.complex(workspace.primary(argument, "complex")), None


def _load_goc(workspace: Workspace, argument: str) -> GocDatum:
    workspace.load_path(argument)
    return workspace.goc(workspace.primary(argument, "goc"))


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise WorkspaceError(f"cannot write {path}: {e.strerror or e}") from e


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise WorkspaceError(f"cannot read {path}: {e.strerror or e}") from e


# --- Subcommands ---
# Each returns (exit code, structured result, tabular lines).

Outcome = Tuple[ExitCode, Dict[str, Any], List[str]]


def _validate(args) -> Outcome:
    c, _ = _load(Workspace(), args.file)
    result = ComplexService.validate(c)
    v, e, s, k = result["cells"]
    lines = [f"{c.name}: {v} vertices, {e} edges, {s} squares, {k} cubes"]
    if result["npc"]:
        lines.append("npc")
    else:
        lines.append("not npc")
        lines.extend(f"  {violation['kind']} at {violation['vertex']}: {' '.join(violation['ends'])}"
                     for violation in result["violations"])
    return (ExitCode.OK if result["npc"] else ExitCode.VERDICT_FAILED), result, lines


def _vertical(t: Optional[TotalSpace]) -> Optional[Dict[str, str]]:
    return classify_hyperplanes(t).vertical_of if t is not None else None


def _hyperplanes(args) -> Outcome:
    c, t = _load(Workspace(), args.file)
    result = ComplexService.hyperplanes(c, strict=args.strict_defn or None, vertical=_vertical(t))
    lines = []
    for h in result["hyperplanes"]:
        tags = ["2-sided" if h["two_sided"] else "1-sided"]
        if h["vertical"]:
            tags.append(f"vertical {h['vertical']}")
        lines.append(f"{h['id']}: {' '.join(h['edges'])} ({', '.join(tags)})")
    lines.extend(f"crossing {a} {b}" for a, b in result["crossings"])
    if args.dot:
        _write(args.dot, result["dot"])
        lines.append(f"wrote {args.dot}")
    return ExitCode.OK, result, lines


def _special(args) -> Outcome:
    c, _ = _load(Workspace(), args.file)
    result = ComplexService.special(c, strict=args.strict_defn or None)
    if result["special"]:
        return ExitCode.OK, result, ["special"]
    return ExitCode.VERDICT_FAILED, result, [f"not special: {result['pathology']}", f"  {result['witness']}"]


def _covers(args) -> Outcome:
    c, _ = _load(Workspace(), args.file)
    max_degree = Budgets.from_settings().with_overrides(max_degree=args.max_degree).max_degree
    result = ComplexService.covers(c, max_degree, args.regular_only)
    lines = []
    for cover in result["covers"]:
        lines.append(f"# {cover['name']} degree {cover['degree']}{' regular' if cover['regular'] else ''}")
        lines.append(cover["voltages"].rstrip("\n"))
    lines.append(f"# {len(result['covers'])} cover(s) up to degree {max_degree}")
    return ExitCode.OK, result, lines


def _total(args) -> Outcome:
    datum = _load_goc(Workspace(), args.file)
    result = GraphService.total(datum)
    stats = result["statistics"]
    lines = [
        f"{result['complex']}: {stats['vertices']} vertices, {stats['edges']} edges, "
        f"{stats['squares']} squares, {stats['cubes']} cubes",
        f"euler {stats['euler']} (formula {result['euler_formula']})",
        f"hyperplanes {stats['hyperplanes']}, vertical {len(result['vertical'])}",
        "special" if result["special"] else "not special",
    ]
    if args.out:
        _write(args.out, serialize_complex(total_space(datum.graph).complex))
        lines.append(f"wrote {args.out}")
    return ExitCode.OK, result, lines


def _monodromy(args) -> Outcome:
    datum = _load_goc(Workspace(), args.file)
    result = GraphService.monodromy(datum, args.base, Budgets.from_settings().gamma)
    lines = [f"monodromy at {result['base_vertex']}: order {result['order']}"]
    if result["generators"]:
        lines.append(f"generators {' '.join(result['generators'])}")
    return ExitCode.OK, result, lines


def _double(args) -> Outcome:
    workspace = Workspace()
    base, _ = _load(workspace, args.base)
    workspace.load_path(args.edgemap)
    edge_map = workspace.map(workspace.primary(args.edgemap, "map"))
    datum = make_double(base, edge_map, args.name)
    _write(args.out, serialize_goc(datum))
    result = {"datum": datum.name, "out": args.out}
    return ExitCode.OK, result, [f"wrote {datum.name} to {args.out}"]


def _specialize(args) -> Outcome:
    datum = _load_goc(Workspace(), args.file)
    budgets = Budgets.from_settings().with_overrides(vertex=args.vertex_budget, gamma=args.gamma_budget)
    run = PipelineService.specialize(datum, budgets)
    result = PipelineService.summarize(run)
    lines = list(run.transcript)
    if run.certificate is None:
        outcome = run.inconclusive
        lines.append(f"inconclusive at {outcome.stage.value}: {outcome.reason}")
        return ExitCode.INCONCLUSIVE, result, lines
    text = format_certificate(run.certificate)
    if args.emit:
        _write(args.emit, text)
        lines.append(f"wrote certificate to {args.emit}")
    else:
        lines.append(text.rstrip("\n"))
    return ExitCode.OK, result, lines


def _verify(args) -> Outcome:
    text = _read(args.certificate)
    datum = _load_goc(Workspace(), args.file)
    result = PipelineService.verify(text, datum)
    if result["valid"]:
        return ExitCode.OK, result, ["valid"]
    return ExitCode.VERDICT_FAILED, result, [f"invalid: {result['reason']}"]


HANDLERS = {
    "validate": _validate,
    "hyperplanes": _hyperplanes,
    "special": _special,
    "covers": _covers,
    "total": _total,
    "monodromy": _monodromy,
    "double": _double,
    "specialize": _specialize,
    "verify": _verify,
}


def dispatch(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    """Run a parsed subcommand, render its result and return the exit code."""
    logger.info(f"cubex {args.command}")
    try:
        code, result, lines = HANDLERS[args.command](args)
    except CubexError as e:
        stderr.write(f"error: {e}\n")
        return ExitCode.INVALID_INPUT

    if args.format == OutputFormat.STRUCTURED.value:
        stdout.write(json.dumps(result, indent=2, sort_keys=True) + "\n")
    else:
        stdout.write("\n".join(lines) + "\n")
    return int(code)


def run(argv: List[str], stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    """Run one cubex invocation and return its exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = Command().create_parser("manage.py", "cubex")
    try:
        with redirect_stdout(stdout), redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code or ExitCode.OK
    except CommandError as e:
        stderr.write(f"{e}\n")
        return ExitCode.USAGE
    return dispatch(args, stdout, stderr)


class Command(BaseCommand):
    help = "Cube complex toolkit: validate, hyperplanes, special, covers, total, monodromy, double, specialize, verify"

    def add_arguments(self, parser):
        add_subcommands(parser)

    def run_from_argv(self, argv):
        # Usage errors exit with 64 rather than argparse's 2.
        sys.exit(run(argv[2:], self.stdout, self.stderr))

    def handle(self, *args, **options):
        code = dispatch(argparse.Namespace(**options), self.stdout, self.stderr)
        if code:
            raise SystemExit(code)
