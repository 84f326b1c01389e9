"""Creation rule for context-conditioned nodes.

A context earns its own node when the conditioned successor distribution
diverges from the unconditional one by more than k / log(support), where k
is the candidate node's order (context length + 1). The support threshold
keeps rarely-observed contexts from passing on sampling noise alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .counts import ConditionalCounts, kl_divergence

DEFAULT_ORDER = 3
DEFAULT_MIN_SUPPORT = 50


@dataclass(frozen=True, order=True)
class HigherOrderNode:
    """A base paper conditioned on the path that led to it.

    context lists the preceding nodes, most recent first; the label of
    base b with context (a, z) is "b|a,z".
    """

    base: str
    context: tuple[str, ...]

    def __post_init__(self):
        if not self.context:
            raise ValueError("a conditioned node needs a non-empty context")

    @property
    def order(self) -> int:
        return len(self.context) + 1

    @property
    def label(self) -> str:
        return f"{self.base}|{','.join(self.context)}"


def detection_threshold(order_k: int, support: int, log_base: float | None = None) -> float:
    """Divergence a candidate of order k must exceed at the given support."""
    if support < 2:
        raise ValueError("threshold undefined below support 2")
    log_s = math.log(support) if log_base is None else math.log(support, log_base)
    return order_k / log_s


def detect_higher_order(
    counts: ConditionalCounts,
    order: int = DEFAULT_ORDER,
    min_support: int | float = DEFAULT_MIN_SUPPORT,
    log_base: float | None = None,
) -> set[HigherOrderNode]:
    """Find every context whose divergence clears the support-scaled threshold.

    Only contexts observed in the counts are candidates; the result is
    independent of chain order because the counts already aggregate.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if min_support < 1:
        raise ValueError(f"min_support must be >= 1, got {min_support}")
    found: set[HigherOrderNode] = set()
    for ctx_len in range(1, order):
        for base, context in counts.contexts(length=ctx_len):
            support = counts.support(base, context)
            # log(support) must be positive for the threshold to exist.
            if support < max(min_support, 2):
                continue
            divergence = kl_divergence(
                counts.distribution(base, context),
                counts.distribution(base, ()),
                log_base=log_base,
            )
            if divergence > detection_threshold(ctx_len + 1, support, log_base):
                found.add(HigherOrderNode(base, context))
    return found
