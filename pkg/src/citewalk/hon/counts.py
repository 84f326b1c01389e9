"""Occurrence counting over citation chains, and the divergence it feeds.

A count N[(base, context) -> successor] records how often a chain visited
`base` with the given tuple of preceding nodes (most recent first) and then
moved to `successor`. The empty context gives the unconditional first-order
counts that conditioned distributions are compared against.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Mapping

Context = tuple[str, ...]


class ConditionalCounts:
    """Successor counts per (base node, context) pair."""

    def __init__(self):
        self._table: dict[tuple[str, Context], Counter] = {}

    def add(self, base: str, context: Context, successor: str, n: int = 1) -> None:
        if n < 0:
            raise ValueError("counts cannot be negative")
        key = (base, tuple(context))
        counter = self._table.get(key)
        if counter is None:
            counter = self._table[key] = Counter()
        counter[successor] += n

    def successors(self, base: str, context: Context = ()) -> Mapping[str, int]:
        return self._table.get((base, tuple(context)), Counter())

    def support(self, base: str, context: Context = ()) -> int:
        return sum(self.successors(base, context).values())

    def distribution(self, base: str, context: Context = ()) -> dict[str, float]:
        succ = self.successors(base, context)
        total = sum(succ.values())
        if total == 0:
            raise ValueError(f"no observations for {base!r} with context {context!r}")
        return {node: n / total for node, n in succ.items()}

    def contexts(self, length: int | None = None) -> list[tuple[str, Context]]:
        keys = [k for k in self._table if length is None or len(k[1]) == length]
        return sorted(keys)

    def __len__(self) -> int:
        return len(self._table)


def count_subchains(chains: Iterable[tuple[str, ...]], order: int) -> ConditionalCounts:
    """Count successor occurrences for every context length 0 .. order - 1.

    For a chain position with current node b and successor c, the window
    contributes one observation to (b, ()) -> c, one to (b, (a,)) -> c when
    a precedes b, and so on up to order - 1 preceding nodes.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    counts = ConditionalCounts()
    for chain in chains:
        for pos in range(len(chain) - 1):
            current = chain[pos]
            successor = chain[pos + 1]
            for ctx_len in range(min(order - 1, pos) + 1):
                # Context lists the predecessors, most recent first.
                context = tuple(chain[pos - ctx_len:pos][::-1])
                counts.add(current, context, successor)
    return counts


def conditional_probability(
    counts: ConditionalCounts, base: str, context: Context, successor: str
) -> float:
    """P(successor | base reached through context) from raw counts."""
    support = counts.support(base, context)
    if support == 0:
        raise ValueError(
            f"zero support for {base!r} with context {context!r}; "
            "probability undefined"
        )
    return counts.successors(base, context)[successor] / support


def kl_divergence(
    higher: Mapping[str, float],
    lower: Mapping[str, float],
    log_base: float | None = None,
) -> float:
    """Kullback-Leibler divergence D(higher || lower).

    Terms with higher[j] = 0 contribute nothing; a successor with positive
    higher mass but zero lower mass makes the divergence undefined and is
    an error. Natural log by default, any base via log_base.
    """
    if log_base is not None and (log_base <= 0 or log_base == 1):
        raise ValueError(f"log base must be positive and != 1, got {log_base}")
    scale = 1.0 if log_base is None else 1.0 / math.log(log_base)
    total = 0.0
    for node, p in higher.items():
        if p == 0.0:
            continue
        if p < 0.0:
            raise ValueError(f"negative probability {p} for {node!r}")
        q = lower.get(node, 0.0)
        if q <= 0.0:
            raise ValueError(
                f"successor {node!r} has positive conditioned mass but zero "
                "unconditional mass; divergence undefined"
            )
        total += p * math.log(p / q)
    return total * scale
