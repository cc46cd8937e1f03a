"""
Finite permutation helpers.

Permutations are 0-based tuples ``p`` with ``p[i]`` the image of ``i``.
Products read left to right: ``compose_perm(p, q)`` applies ``p`` first,
matching sympy's ``p * q``. Group-level questions (order, orbits, element
lists) go through ``sympy.combinatorics``.
"""
import re
from typing import Iterable, List, Sequence, Tuple

from sympy.combinatorics import Permutation, PermutationGroup

from .exceptions import ComplexFormatError


Perm = Tuple[int, ...]

_CYCLE = re.compile(r"\(([^()]*)\)")


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def compose_perm(p: Perm, q: Perm) -> Perm:
    return tuple(q[i] for i in p)


def invert_perm(p: Perm) -> Perm:
    result = [0] * len(p)
    for i, image in enumerate(p):
        result[image] = i
    return tuple(result)


def is_identity(p: Perm) -> bool:
    return all(i == image for i, image in enumerate(p))


def is_permutation(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def format_cycles(p: Perm) -> str:
    """1-based disjoint cycle notation; ``()`` for the identity."""
    cycles = Permutation(list(p)).cyclic_form
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(i + 1) for i in cycle) + ")" for cycle in cycles)


def parse_cycles(text: str, n: int) -> Perm:
    compact = text.replace(" ", "")
    if not compact or _CYCLE.sub("", text).strip():
        raise ComplexFormatError(f"bad cycle notation {text!r}")
    result = list(range(n))
    seen = set()
    for body in _CYCLE.findall(text):
        points = body.split()
        try:
            cycle = [int(point) - 1 for point in points]
        except ValueError as e:
            raise ComplexFormatError(f"bad cycle notation {text!r}") from e
        for point in cycle:
            if not 0 <= point < n or point in seen:
                raise ComplexFormatError(f"cycle point {point + 1} out of range or repeated in {text!r}")
            seen.add(point)
        for i, point in enumerate(cycle):
            result[point] = cycle[(i + 1) % len(cycle)]
    return tuple(result)


def permutation_group(perms: Iterable[Perm], n: int) -> PermutationGroup:
    generators = [Permutation(list(p), size=n) for p in perms]
    return PermutationGroup(generators or [Permutation(list(range(n)), size=n)])


def group_order(perms: Iterable[Perm], n: int) -> int:
    return int(permutation_group(perms, n).order())


def group_elements(perms: Iterable[Perm], n: int) -> List[Perm]:
    """All elements, sorted; the identity comes first."""
    return sorted(tuple(int(i) for i in element) for element in permutation_group(perms, n).generate(af=True))


def orbits(perms: Iterable[Perm], n: int) -> List[Tuple[int, ...]]:
    return sorted(tuple(sorted(int(i) for i in orbit)) for orbit in permutation_group(perms, n).orbits())


def is_transitive(perms: Iterable[Perm], n: int) -> bool:
    return len(orbits(perms, n)) == 1


def right_regular_action(elements: Sequence[Perm], sigma: Perm) -> Perm:
    """Permutation of element indices induced by ``g -> g * sigma``."""
    index = {g: i for i, g in enumerate(elements)}
    return tuple(index[compose_perm(g, sigma)] for g in elements)
