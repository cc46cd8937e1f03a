"""
Export hyperplane crossing graphs for graphviz' dot.

Nodes are hyperplanes, edges join hyperplanes that cross in some square.
Vertical hyperplanes of a total space are drawn as boxes:

    cubex hyperplanes double.goc --dot crossings.gv
    dot -Tpng -O crossings.gv
"""
from typing import Dict, Optional

from .complexes.cells import CubeComplex
from .hyperplanes import HyperplaneStructure, crossing_pairs


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(
    c: CubeComplex,
    vertical: Optional[Dict[str, str]] = None,
    structure: Optional[HyperplaneStructure] = None,
) -> str:
    """
    Args:
        c: complex whose hyperplanes are drawn
        vertical: hyperplane id -> Gamma edge, for total spaces
    """
    hs = structure or HyperplaneStructure(c)
    vertical = vertical or {}
    lines = [f"graph {_quote(c.name)} {{", "\tnode [shape=ellipse];"]
    for hyperplane in hs.hyperplanes:
        if hyperplane.id in vertical:
            label = f"{hyperplane.id} (vertical {vertical[hyperplane.id]})"
            lines.append(f"\t{_quote(hyperplane.id)} [label={_quote(label)}, shape=box];")
        else:
            lines.append(f"\t{_quote(hyperplane.id)} [label={_quote(hyperplane.id)}];")
    for first, second in sorted(crossing_pairs(c, hs)):
        lines.append(f"\t{_quote(first)} -- {_quote(second)};")
    lines.append("}")
    return "\n".join(lines) + "\n"

