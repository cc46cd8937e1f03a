"""
Specialness certificates: the voltage data and statistics needed to rebuild
a finite special cover of a total space and check it again.

Text format, one record per line::

    cubex-cert v1
    datum NAME
    input-hash SHA256
    base-vertex U
    gamma-degree N
    gamma-perm E CYCLES        (one per edge of the input graph)
    vertex-degree D
    cover D
    perm EDGE CYCLES           (one per edge of the base vertex space)
    stat KEY VALUE
    pathologies 0
    transcript TEXT
"""
import hashlib
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .complexes.formats import tokenize
from .covers import VoltageAssignment, format_voltage_table
from .exceptions import ComplexFormatError, CertificateError
from .graphs import GocDatum
from .groups import Perm, format_cycles, parse_cycles
from .workspace import serialize_goc


HEADER = "cubex-cert v1"
STAT_KEYS = ("vertices", "edges", "squares", "cubes", "euler", "hyperplanes")


@dataclass
class SpecialnessCertificate:
    datum: str
    input_hash: str
    base_vertex: str
    gamma_degree: int
    gamma_voltages: Dict[str, Perm]
    vertex_voltages: VoltageAssignment
    statistics: Dict[str, int] = field(default_factory=dict)
    pathologies: int = 0
    transcript: List[str] = field(default_factory=list)

    @property
    def vertex_degree(self) -> int:
        return self.vertex_voltages.degree

    def to_dict(self) -> Dict[str, Any]:
        return {
            "datum": self.datum,
            "input_hash": self.input_hash,
            "base_vertex": self.base_vertex,
            "gamma_degree": self.gamma_degree,
            "gamma_voltages": {e: format_cycles(p) for e, p in sorted(self.gamma_voltages.items())},
            "vertex_degree": self.vertex_degree,
            "vertex_voltages": {e: format_cycles(p) for e, p in sorted(self.vertex_voltages.perms.items())},
            "statistics": dict(self.statistics),
            "pathologies": self.pathologies,
            "transcript": list(self.transcript),
        }


def input_hash(datum: GocDatum) -> str:
    return hashlib.sha256(serialize_goc(datum).encode("utf-8")).hexdigest()


def format_certificate(cert: SpecialnessCertificate) -> str:
    lines = [
        HEADER,
        f"datum {cert.datum}",
        f"input-hash {cert.input_hash}",
        f"base-vertex {cert.base_vertex}",
        f"gamma-degree {cert.gamma_degree}",
    ]
    lines.extend(f"gamma-perm {e} {format_cycles(p)}" for e, p in sorted(cert.gamma_voltages.items()))
    lines.append(f"vertex-degree {cert.vertex_degree}")
    lines.extend(format_voltage_table(cert.vertex_voltages).splitlines())
    lines.extend(f"stat {key} {cert.statistics[key]}" for key in STAT_KEYS if key in cert.statistics)
    lines.append(f"pathologies {cert.pathologies}")
    lines.extend(f"transcript {entry}" for entry in cert.transcript)
    return "\n".join(lines) + "\n"


def _integer(tokens: List[str], line: int, minimum: int = 0) -> int:
    text = tokens[-1].lstrip("-")
    if len(tokens) != 2 and tokens[0] != "stat" or not text.isdigit():
        raise ComplexFormatError(f"expected an integer after {tokens[0]!r}", line)
    value = int(tokens[-1])
    if value < minimum:
        raise ComplexFormatError(f"{tokens[0]} must be at least {minimum}", line)
    return value


def parse_certificate(text: str) -> SpecialnessCertificate:
    """
    Raises:
        CertificateError: missing header or required line, or malformed values
    """
    lines = list(tokenize(text))
    if not lines or " ".join(lines[0][1]) != HEADER:
        raise CertificateError(f"not a certificate: first line must be '{HEADER}'")

    fields: Dict[str, Any] = {"gamma": {}, "perms": {}, "stats": {}, "transcript": []}
    degree: Optional[int] = None
    try:
        for line, tokens in lines[1:]:
            keyword = tokens[0]
            if keyword in ("datum", "input-hash", "base-vertex"):
                if len(tokens) != 2:
                    raise ComplexFormatError(f"expected '{keyword} VALUE'", line)
                fields[keyword] = tokens[1]
            elif keyword in ("gamma-degree", "vertex-degree"):
                fields[keyword] = _integer(tokens, line, minimum=1)
            elif keyword == "gamma-perm":
                if "gamma-degree" not in fields or len(tokens) < 3:
                    raise ComplexFormatError("expected 'gamma-perm EDGE CYCLES' after gamma-degree", line)
                fields["gamma"][tokens[1]] = parse_cycles(" ".join(tokens[2:]), fields["gamma-degree"])
            elif keyword == "cover":
                degree = _integer(tokens, line, minimum=1)
            elif keyword == "perm":
                if degree is None or len(tokens) < 3:
                    raise ComplexFormatError("expected 'perm EDGE CYCLES' after 'cover'", line)
                fields["perms"][tokens[1]] = parse_cycles(" ".join(tokens[2:]), degree)
            elif keyword == "stat":
                if len(tokens) != 3 or tokens[1] not in STAT_KEYS:
                    raise ComplexFormatError("expected 'stat KEY VALUE'", line)
                fields["stats"][tokens[1]] = _integer(tokens, line, minimum=-(10 ** 9))
            elif keyword == "pathologies":
                fields["pathologies"] = _integer(tokens, line)
            elif keyword == "transcript":
                fields["transcript"].append(" ".join(tokens[1:]))
            else:
                raise ComplexFormatError(f"unknown keyword {keyword!r}", line)
    except ComplexFormatError as e:
        raise CertificateError(str(e)) from e

    required = ("datum", "input-hash", "base-vertex", "gamma-degree", "vertex-degree")
    missing = [key for key in required if key not in fields]
    if missing or degree is None:
        raise CertificateError(f"certificate is missing {', '.join(missing) or 'cover'}")
    if degree != fields["vertex-degree"]:
        raise CertificateError(f"cover degree {degree} differs from vertex-degree {fields['vertex-degree']}")
    return SpecialnessCertificate(
        datum=fields["datum"],
        input_hash=fields["input-hash"],
        base_vertex=fields["base-vertex"],
        gamma_degree=fields["gamma-degree"],
        gamma_voltages=fields["gamma"],
        vertex_voltages=VoltageAssignment(degree, dict(sorted(fields["perms"].items()))),
        statistics=fields["stats"],
        pathologies=fields.get("pathologies", 0),
        transcript=fields["transcript"],
    )
