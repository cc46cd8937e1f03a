"""
Specialization pipeline.

Given a graph of complexes with locally constant vertex spaces, look for a
finite special cover of its total space:

1. pass to the regular cover of Gamma that kills the monodromy;
2. identify all vertex spaces with the base one;
3. read off one immersion ``f_e: X_e -> X_v`` per edge;
4. search covers of ``X_v`` that are special and in which every elevation
   of every ``f_e`` is embedded and inter-osculation free;
5. pull that cover back along the retraction of the total space onto ``X_v``;
6. split the result as a graph of complexes, check its hypotheses and scan
   the final complex directly.

Stage failures end the run with an ``Inconclusive`` outcome; a clean
hypothesis check followed by a dirty scan is an ``InternalInvariantError``.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, TypeVar

from .budgets import Budgets
from .certificates import SpecialnessCertificate, input_hash
from .complexes.cells import CubeComplex, Subcomplex
from .complexes.maps import (
    CubicalMap,
    check_local_isometry,
    compose_all,
    find_isomorphism,
    identity,
    image_subcomplex,
    inverse,
    is_embedding,
)
from .covers import (
    CoveringSpace,
    FiberProduct,
    build_cover,
    enumerate_covers,
    fiber_product,
    regular_closure,
    sheet_id,
    split_sheet,
)
from .dtos import CorollaryReport, ElevationFinding, GoodCoverSearchResult, Inconclusive, SpecialVerdict
from .enums import Stage
from .exceptions import (
    CertificateError,
    ConstantStructureError,
    CubexError,
    GraphOfComplexesError,
    GroupOrderCapExceeded,
    InternalInvariantError,
    NotLocalIsometryError,
)
from .graphs import (
    ConstantStructure,
    GammaEdge,
    GocDatum,
    GraphOfComplexes,
    LocallyConstantStructure,
    Retraction,
    TrivializedDatum,
    build_retraction,
    check_corollary_hypotheses,
    check_locally_constant,
    lift_graph_of_complexes,
    make_constant,
    total_space,
    trivialize_monodromy,
    validate_goc,
)
from .hyperplanes import HyperplaneStructure, check_special, subcomplex_osculation


logger = logging.getLogger(__name__)

T = TypeVar("T")


# --- Stage 3: edge immersions ---

def derive_edge_immersions(
    g: GraphOfComplexes,
    cs: ConstantStructure,
    base: str,
) -> Dict[str, CubicalMap]:
    """
    ``f_e = psi_base^-1 * psi_initial(e) * minus_e``, checked against the
    same formula through the plus side.
    """
    back = inverse(cs.psi[base])
    immersions: Dict[str, CubicalMap] = {}
    for edge in g.edges.values():
        f = compose_all([edge.minus, cs.psi[edge.initial], back], name=f"f_{edge.id}")
        other = compose_all([edge.plus, cs.psi[edge.terminal], back], name=f"f_{edge.id}")
        if f != other:
            raise ConstantStructureError(f"{g.name}: the two immersions derived for {edge.id} differ")
        report = check_local_isometry(f)
        if not report.is_local_isometry:
            raise NotLocalIsometryError(f"{f.label} is not a local isometry: {report.violations[0].describe()}")
        immersions[edge.id] = f
    return immersions


# --- Stage 4: good vertex cover ---

def _elevation_findings(
    edge: str,
    product: FiberProduct,
    structure: HyperplaneStructure,
) -> List[ElevationFinding]:
    cover_total = product.cover_side.total
    findings = []
    for index, elevation in enumerate(product.components, start=1):
        embedded = is_embedding(elevation.elevation_map)
        crossings = 0
        if embedded:
            image = image_subcomplex(elevation.elevation_map)
            crossings = sum(
                1 for f in subcomplex_osculation(cover_total, image, structure) if f.inter_osculates
            )
        findings.append(ElevationFinding(edge, index, elevation.degree, embedded, crossings))
    return findings


def _voltage_key(cover: CoveringSpace):
    return cover.degree, tuple(sorted(cover.voltages.perms.items()))


def _good_elevations(cover: CoveringSpace, immersions: Dict[str, CubicalMap]) -> Optional[List[ElevationFinding]]:
    if not check_special(cover.total).special:
        logger.debug(f"find_good_vertex_cover: {cover.total.name} is not special")
        return None
    structure = HyperplaneStructure(cover.total)
    elevations: List[ElevationFinding] = []
    for edge, f in sorted(immersions.items()):
        findings = _elevation_findings(edge, fiber_product(f, cover), structure)
        elevations.extend(findings)
        if any(not e.embedded or e.inter_osculations for e in findings):
            return None
    return elevations


def find_good_vertex_cover(
    space: CubeComplex,
    immersions: Dict[str, CubicalMap],
    max_degree: int,
    cap: int = 64,
) -> GoodCoverSearchResult:
    """
    First regular cover of ``space`` that is special and in which every
    elevation of every immersion is embedded without inter-osculation.

    Regular candidates are tried in enumeration order (increasing degree).
    A non-regular candidate whose closure fits in ``max_degree`` is skipped,
    since the closure is enumerated on its own; larger closures, up to
    ``cap``, are tried afterwards by increasing degree.
    """
    tried = 0
    seen = set()
    overflow: List[CoveringSpace] = []

    def attempt(cover: CoveringSpace) -> Optional[GoodCoverSearchResult]:
        nonlocal tried
        seen.add(_voltage_key(cover))
        tried += 1
        elevations = _good_elevations(cover, immersions)
        if elevations is None:
            return None
        logger.info(f"find_good_vertex_cover {space.name}: accepted degree {cover.degree} after {tried}")
        return GoodCoverSearchResult(cover, elevations, False, tried)

    for candidate in enumerate_covers(space, max_degree):
        try:
            cover = regular_closure(candidate, cap)
        except GroupOrderCapExceeded:
            continue
        if cover.degree == candidate.degree:
            if _voltage_key(cover) in seen:
                continue
            result = attempt(cover)
            if result is not None:
                return result
        elif cover.degree > max_degree:
            overflow.append(cover)

    for cover in sorted(overflow, key=lambda c: c.degree):
        if _voltage_key(cover) in seen:
            continue
        result = attempt(cover)
        if result is not None:
            return result
    logger.info(f"find_good_vertex_cover {space.name}: nothing up to degree {max_degree} ({tried} tried)")
    return GoodCoverSearchResult(None, [], True, tried)


# --- Runs ---

def complex_statistics(c: CubeComplex) -> Dict[str, int]:
    v, e, s, k = c.cell_counts()
    return {
        "vertices": v,
        "edges": e,
        "squares": s,
        "cubes": k,
        "euler": c.euler_characteristic(),
        "hyperplanes": len(HyperplaneStructure(c).hyperplanes),
    }


@dataclass
class SpecializationRun:
    datum: str
    certificate: Optional[SpecialnessCertificate] = None
    inconclusive: Optional[Inconclusive] = None
    transcript: List[str] = field(default_factory=list)
    trivialized: Optional[TrivializedDatum] = None
    search: Optional[GoodCoverSearchResult] = None
    final: Optional[CubeComplex] = None
    splitting: Optional[GocDatum] = None
    corollary: Optional[CorollaryReport] = None
    verdict: Optional[SpecialVerdict] = None

    @property
    def success(self) -> bool:
        return self.certificate is not None


class _StageFailed(Exception):
    def __init__(self, outcome: Inconclusive):
        self.outcome = outcome


def _stage(stage: Stage, transcript: List[str], action: Callable[[], T]) -> T:
    try:
        return action()
    except CubexError as e:
        logger.info(f"specialize: stage {stage.value} failed: {e}")
        transcript.append(f"{stage.value.lower()}: failed")
        raise _StageFailed(Inconclusive(stage, str(e), list(transcript))) from e


def _require_locally_constant(datum: GocDatum) -> LocallyConstantStructure:
    validate_goc(datum.graph)
    lc = datum.locally_constant
    if lc is None:
        raise GraphOfComplexesError(f"{datum.name}: no locally constant structure (theta or psi lines)")
    check_locally_constant(datum.graph, lc)
    return lc


def specialize(datum: GocDatum, budgets: Optional[Budgets] = None) -> SpecializationRun:
    """
    Raises:
        CubexError: the datum itself is invalid
        InternalInvariantError: hypotheses hold but the final complex is not special
    """
    budgets = budgets or Budgets()
    lc = _require_locally_constant(datum)
    g = datum.graph
    run = SpecializationRun(datum.name)
    transcript = run.transcript
    logger.info(f"specialize {g.name}: budgets {budgets.to_dict()}")
    try:
        trivialized = _stage(
            Stage.TRIVIALIZE, transcript,
            lambda: trivialize_monodromy(g, lc, g.vertices[0], cap=budgets.gamma),
        )
        run.trivialized = trivialized
        g1, base = trivialized.graph, trivialized.base_vertex
        transcript.append(f"trivialize: monodromy order {trivialized.monodromy.order} gamma-degree {trivialized.degree}")

        cs = _stage(Stage.CONSTANT, transcript, lambda: make_constant(g1, trivialized.locally_constant, base))
        transcript.append(f"constant: {len(g1.vertex_spaces)} vertex spaces identified with {base}")

        immersions = _stage(Stage.IMMERSIONS, transcript, lambda: derive_edge_immersions(g1, cs, base))
        transcript.append(f"immersions: {len(immersions)} local isometries")

        space = g1.vertex_spaces[base]
        search = _stage(
            Stage.VERTEX_COVER, transcript,
            lambda: find_good_vertex_cover(space, immersions, budgets.vertex, budgets.group_order_cap),
        )
        run.search = search
        if not search.success:
            transcript.append(f"vertex-cover: none up to degree {budgets.vertex}")
            raise _StageFailed(Inconclusive(
                Stage.VERTEX_COVER,
                f"no good cover of {space.name} up to degree {budgets.vertex} ({search.candidates_tried} regular candidates)",
                list(transcript),
            ))
        cover: CoveringSpace = search.cover
        transcript.append(f"vertex-cover: degree {cover.degree} after {search.candidates_tried} candidates")

        retraction, product = _stage(Stage.FIBER_PRODUCT, transcript, lambda: _pull_back(g1, cs, base, cover))
        if not product.is_connected:
            raise InternalInvariantError(
                f"{g.name}: fiber product along a retraction has {len(product.components)} components"
            )
        run.final = product.total
        transcript.append(f"fiber-product: connected, degree {cover.degree}")

        splitting = _stage(Stage.VERIFY, transcript, lambda: induced_splitting(g1, retraction, product, immersions))
        run.splitting = splitting
        corollary = check_corollary_hypotheses(splitting.graph, splitting.constant)
        run.corollary = corollary
        verdict = check_special(product.total)
        run.verdict = verdict
        if corollary.passed and not verdict.special:
            raise InternalInvariantError(
                f"{g.name}: splitting hypotheses hold but {product.total.name} is not special: {verdict.witness}"
            )
        if not verdict.special:
            transcript.append(f"verify: {verdict.pathology.value}")
            raise _StageFailed(Inconclusive(Stage.VERIFY, verdict.witness, list(transcript)))
        transcript.append(f"verify: hypotheses {'pass' if corollary.passed else 'fail'}, direct scan clean")
    except _StageFailed as failed:
        run.inconclusive = failed.outcome
        return run

    run.certificate = SpecialnessCertificate(
        datum=g.name,
        input_hash=input_hash(datum),
        base_vertex=base,
        gamma_degree=trivialized.degree,
        gamma_voltages=dict(trivialized.voltages),
        vertex_voltages=cover.voltages,
        statistics=complex_statistics(product.total),
        pathologies=0,
        transcript=list(transcript),
    )
    logger.info(f"specialize {g.name}: certificate with vertex degree {cover.degree}")
    return run


def _pull_back(g: GraphOfComplexes, cs: ConstantStructure, base: str, cover: CoveringSpace):
    t = total_space(g)
    r = build_retraction(g, cs, base, t)
    return r, fiber_product(r.map, cover, require_local_isometry=False)


def induced_splitting(
    g: GraphOfComplexes,
    retraction: Retraction,
    product: FiberProduct,
    immersions: Dict[str, CubicalMap],
) -> GocDatum:
    """
    The fiber product as a graph of complexes over Gamma: every vertex space
    is the chosen cover of X_v, every elevation of ``f_e`` is an edge space
    attached on both sides by its elevation map.
    """
    cover = product.cover_side
    vertex_spaces = {u: cover.total for u in g.vertex_spaces}
    edges: Dict[str, GammaEdge] = {}
    for edge in g.edges.values():
        elevations = fiber_product(immersions[edge.id], cover).components
        for k, elevation in enumerate(elevations, start=1):
            edge_id = f"{edge.id}~{k}"
            edges[edge_id] = GammaEdge(
                edge_id, edge.initial, edge.terminal, elevation.complex,
                elevation.elevation_map, elevation.elevation_map,
            )
    split = validate_goc(GraphOfComplexes(f"{g.name}^split", vertex_spaces, edges))
    ident = identity(cover.total)
    cs = ConstantStructure(cover.total, {u: ident for u in g.vertex_spaces})

    split_total = total_space(split).complex
    if split_total.cell_counts() != product.total.cell_counts():
        raise InternalInvariantError(
            f"{g.name}: splitting has cells {split_total.cell_counts()}, "
            f"fiber product has {product.total.cell_counts()}"
        )
    for u in g.vertex_spaces:
        _check_vertex_preimage(u, retraction, product)
    return GocDatum(split, LocallyConstantStructure({e: ident for e in edges}), cs)


def _check_vertex_preimage(u: str, retraction: Retraction, product: FiberProduct) -> None:
    """The preimage of X_u in the fiber product is isomorphic to the vertex cover."""
    t, total, cover = retraction.total, product.total, product.cover_side

    def over_u(cell: str) -> bool:
        origin = t.provenance[split_sheet(cell)[0]]
        return origin.layer is None and origin.gamma == u

    sub = Subcomplex(
        frozenset(v for v in total.vertices if over_u(v)),
        frozenset(e for e in total.edges if over_u(e)),
        frozenset(s for s in total.squares if over_u(s)),
        frozenset(k for k in total.cubes if over_u(k)),
    )
    piece = total.restrict(sub, f"{total.name}|{u}")
    r = retraction.map

    def prefer(cell: str) -> str:
        base, sheet = split_sheet(cell)
        if cell in sub.vertices:
            return sheet_id(r.vertex(base), sheet)
        return cover.lift(r.edge_map[base], sheet)[0].edge

    if find_isomorphism(piece, cover.total, prefer) is None:
        raise InternalInvariantError(f"preimage of X_{u} is not isomorphic to {cover.total.name}")


# --- Certificates ---

@dataclass
class ReplayResult:
    valid: bool
    reason: str = ""
    statistics: Dict[str, int] = field(default_factory=dict)


def replay_certificate(cert: SpecialnessCertificate, datum: GocDatum) -> ReplayResult:
    """Rebuild the final complex from the voltage tables and scan it again."""
    if input_hash(datum) != cert.input_hash:
        return ReplayResult(False, f"input hash mismatch for {datum.name}")
    if cert.pathologies != 0:
        return ReplayResult(False, f"certificate lists {cert.pathologies} pathologies")
    try:
        lc = _require_locally_constant(datum)
        g = datum.graph
        if set(cert.gamma_voltages) != set(g.edges):
            raise CertificateError("gamma-perm lines do not match the edges of the input")
        if cert.gamma_degree == 1:
            g1, lc1 = g, lc
        else:
            g1, lc1 = lift_graph_of_complexes(g, lc, cert.gamma_voltages, cert.gamma_degree)
        base = cert.base_vertex
        if base not in g1.vertex_spaces:
            raise CertificateError(f"unknown base vertex {base}")
        cs = make_constant(g1, lc1, base)
        voltages = cert.vertex_voltages
        if not voltages.is_transitive():
            raise CertificateError("vertex voltages give a disconnected cover")
        cover = build_cover(g1.vertex_spaces[base], voltages)
        _, product = _pull_back(g1, cs, base, cover)
        final = product.total
    except CubexError as e:
        logger.info(f"replay_certificate {datum.name}: {e}")
        return ReplayResult(False, str(e))

    statistics = complex_statistics(final)
    verdict = check_special(final)
    if not verdict.special:
        return ReplayResult(False, f"{verdict.pathology.value}: {verdict.witness}", statistics)
    if statistics != cert.statistics:
        return ReplayResult(False, "statistics of the rebuilt complex differ", statistics)
    return ReplayResult(True, "", statistics)


def verify_certificate(cert: SpecialnessCertificate, datum: GocDatum) -> bool:
    return replay_certificate(cert, datum).valid
