"""
Search budgets for cover enumeration and the specialization pipeline.
"""
import logging
import os
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Optional

from .exceptions import CubexError


logger = logging.getLogger(__name__)

BUDGET_ENV = "CUBEX_BUDGET"

_KEYS = {
    "degree": "max_degree",
    "max-degree": "max_degree",
    "vertex": "vertex",
    "gamma": "gamma",
    "cap": "group_order_cap",
}


@dataclass(frozen=True)
class Budgets:
    max_degree: int = 8
    vertex: int = 8
    gamma: int = 64
    group_order_cap: int = 64

    def with_overrides(self, **overrides: Optional[int]) -> "Budgets":
        """Replace the given fields, ignoring ``None`` values."""
        values = {key: value for key, value in overrides.items() if value is not None}
        for key, value in values.items():
            if value < 1:
                raise CubexError(f"budget {key} must be positive, got {value}")
        return replace(self, **values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_settings(cls) -> "Budgets":
        """Defaults from Django settings, then the CUBEX_BUDGET override."""
        from django.conf import settings

        budgets = cls(
            max_degree=getattr(settings, "CUBEX_MAX_DEGREE", 8),
            vertex=getattr(settings, "CUBEX_VERTEX_BUDGET", 8),
            gamma=getattr(settings, "CUBEX_GAMMA_BUDGET", 64),
            group_order_cap=getattr(settings, "CUBEX_GROUP_ORDER_CAP", 64),
        )
        override = os.environ.get(BUDGET_ENV, "").strip()
        if override:
            budgets = parse_budget_override(override, budgets)
            logger.info(f"Budgets overridden by {BUDGET_ENV}: {budgets}")
        return budgets


def parse_budget_override(text: str, base: Budgets) -> Budgets:
    """
    ``8`` sets both the cover degree and the vertex budget;
    ``vertex=8,gamma=16,cap=64,degree=6`` sets fields by name.
    """
    text = text.strip()
    if text.isdigit():
        return base.with_overrides(max_degree=int(text), vertex=int(text))
    values: Dict[str, int] = {}
    for item in text.split(","):
        key, sep, value = item.strip().partition("=")
        if not sep or key.strip().lower() not in _KEYS or not value.strip().isdigit():
            raise CubexError(f"bad budget override {item.strip()!r} in {text!r}")
        values[_KEYS[key.strip().lower()]] = int(value)
    return base.with_overrides(**values)
