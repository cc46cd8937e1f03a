"""
Service layer shared by the REST views and the cubex command.

Services take loaded complexes/data (or raw text, for the REST surface)
and return plain dictionaries ready for rendering.
"""
import hashlib
import logging
from typing import Any, Dict, List, Optional

from django.db import transaction

from .budgets import Budgets
from .certificates import SpecialnessCertificate, format_certificate, parse_certificate
from .complexes.cells import CubeComplex
from .complexes.links import validate
from .covers import enumerate_covers, format_voltage_table
from .dot import export_dot
from .exceptions import GraphOfComplexesError
from .graphs import (
    GocDatum,
    classify_hyperplanes,
    compute_monodromy,
    euler_characteristic_formula,
    total_space,
)
from .groups import format_cycles
from .hyperplanes import HyperplaneStructure, check_special, crossing_pairs, detect_pathologies
from .models import CertificateRecord
from .pipeline import SpecializationRun, complex_statistics, replay_certificate, specialize
from .workspace import Workspace


logger = logging.getLogger(__name__)


def _strict_default(strict: Optional[bool]) -> bool:
    if strict is not None:
        return strict
    from django.conf import settings

    return bool(getattr(settings, "CUBEX_STRICT_DEFN", False))


class ComplexService:
    """
    Single-complex questions: link condition, specialness, hyperplanes, covers.
    """

    @staticmethod
    def load_text(text: str) -> Workspace:
        return Workspace().load_text(text)

    @staticmethod
    def complex_from_text(text: str) -> CubeComplex:
        workspace = ComplexService.load_text(text)
        return workspace.complex(workspace.primary("<text>", "complex"))

    @staticmethod
    def validate(c: CubeComplex) -> Dict[str, Any]:
        return validate(c).to_dict()

    @staticmethod
    def special(c: CubeComplex, strict: Optional[bool] = None) -> Dict[str, Any]:
        verdict = check_special(c, strict=_strict_default(strict))
        result = verdict.to_dict()
        result["pathologies"] = verdict.report.to_dict() if verdict.report else None
        return result

    @staticmethod
    def hyperplanes(
        c: CubeComplex,
        strict: Optional[bool] = None,
        vertical: Optional[Dict[str, str]] = None,
    ) -> Dict[str, Any]:
        """
        Args:
            vertical: hyperplane id -> Gamma edge, when ``c`` is a total space
        """
        hs = HyperplaneStructure(c)
        vertical = vertical or {}
        report = detect_pathologies(c, strict=_strict_default(strict), structure=hs)
        return {
            "complex": c.name,
            "hyperplanes": [
                {
                    "id": h.id,
                    "edges": list(h.edges),
                    "two_sided": h.two_sided,
                    "vertical": vertical.get(h.id),
                }
                for h in hs.hyperplanes
            ],
            "crossings": [list(pair) for pair in sorted(crossing_pairs(c, hs))],
            "pathologies": report.to_dict(),
            "dot": export_dot(c, vertical, hs),
        }

    @staticmethod
    def covers(
        c: CubeComplex,
        max_degree: int,
        regular_only: bool = False,
    ) -> Dict[str, Any]:
        covers: List[Dict[str, Any]] = []
        for cover in enumerate_covers(c, max_degree):
            regular = cover.voltages.group_order() == cover.degree
            if regular_only and not regular:
                continue
            covers.append({
                "name": cover.total.name,
                "degree": cover.degree,
                "regular": regular,
                "euler": cover.total.euler_characteristic(),
                "voltages": format_voltage_table(cover.voltages),
            })
        logger.info(f"covers {c.name}: {len(covers)} up to degree {max_degree}")
        return {"complex": c.name, "max_degree": max_degree, "covers": covers}


class GraphService:
    """Graph-of-complexes questions: total space and monodromy."""

    @staticmethod
    def total(datum: GocDatum) -> Dict[str, Any]:
        t = total_space(datum.graph)
        classification = classify_hyperplanes(t)
        stats = complex_statistics(t.complex)
        return {
            "datum": datum.name,
            "complex": t.complex.name,
            "statistics": stats,
            "euler_formula": euler_characteristic_formula(datum.graph),
            "vertical": {h: e for h, e in sorted(classification.vertical_of.items())},
            "special": check_special(t.complex).special,
        }

    @staticmethod
    def monodromy(datum: GocDatum, base: Optional[str] = None, cap: Optional[int] = None) -> Dict[str, Any]:
        if datum.locally_constant is None:
            raise GraphOfComplexesError(f"{datum.name}: no locally constant structure (theta or psi lines)")
        result = compute_monodromy(datum.graph, datum.locally_constant, base, cap)
        return {
            "datum": datum.name,
            "base_vertex": result.base_vertex,
            "order": result.order,
            "trivial": result.trivial,
            "tree_edges": list(result.tree_edges),
            "generators": sorted(result.generator_images),
        }


class PipelineService:
    """Runs of the specialization pipeline and certificate replay."""

    @staticmethod
    def specialize(datum: GocDatum, budgets: Optional[Budgets] = None) -> SpecializationRun:
        budgets = budgets or Budgets.from_settings()
        logger.info(f"Specializing {datum.name}")
        return specialize(datum, budgets)

    @staticmethod
    def summarize(run: SpecializationRun) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "datum": run.datum,
            "success": run.success,
            "transcript": list(run.transcript),
        }
        if run.certificate is not None:
            result["certificate"] = format_certificate(run.certificate)
            result["input_hash"] = run.certificate.input_hash
            result["gamma_degree"] = run.certificate.gamma_degree
            result["vertex_degree"] = run.certificate.vertex_degree
            result["statistics"] = dict(run.certificate.statistics)
        if run.inconclusive is not None:
            result["inconclusive"] = run.inconclusive.to_dict()
        return result

    @staticmethod
    def verify(certificate_text: str, datum: GocDatum) -> Dict[str, Any]:
        cert = parse_certificate(certificate_text)
        replay = replay_certificate(cert, datum)
        logger.info(f"Verified certificate for {datum.name}: {'valid' if replay.valid else replay.reason}")
        return {
            "datum": datum.name,
            "valid": replay.valid,
            "reason": replay.reason,
            "statistics": replay.statistics,
        }


class CertificateService:
    """
    Persistence of emitted certificates.
    """

    @staticmethod
    @transaction.atomic
    def record(cert: SpecialnessCertificate, input_text: str = "") -> CertificateRecord:
        """Store a certificate; storing the same text twice returns the first record."""
        text = format_certificate(cert)
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        record, created = CertificateRecord.objects.get_or_create(
            input_hash=cert.input_hash,
            text_digest=digest,
            defaults={
                "datum_name": cert.datum,
                "gamma_degree": cert.gamma_degree,
                "vertex_degree": cert.vertex_degree,
                "statistics": dict(cert.statistics),
                "voltages": {
                    "gamma": {e: format_cycles(p) for e, p in sorted(cert.gamma_voltages.items())},
                    "vertex": {e: format_cycles(p) for e, p in sorted(cert.vertex_voltages.perms.items())},
                },
                "certificate_text": text,
                "input_text": input_text,
            },
        )
        if created:
            logger.info(f"Certificate recorded for {cert.datum} ({cert.input_hash[:12]})")
        return record

    @staticmethod
    def get(input_hash: str) -> Dict[str, Any]:
        """
        Latest certificate for an input hash.

        Raises:
            ValueError: no certificate for the hash
        """
        record = CertificateRecord.objects.filter(input_hash=input_hash).order_by("-created_at").first()
        if record is None:
            raise ValueError(f"Certificate not found: {input_hash}")
        return CertificateService.to_dict(record)

    @staticmethod
    def to_dict(record: CertificateRecord) -> Dict[str, Any]:
        return {
            "id": str(record.id),
            "input_hash": record.input_hash,
            "datum": record.datum_name,
            "gamma_degree": record.gamma_degree,
            "vertex_degree": record.vertex_degree,
            "statistics": record.statistics,
            "voltages": record.voltages,
            "certificate": record.certificate_text,
            "created_at": record.created_at.isoformat(),
        }
