"""Precision, recall and nDCG at k with binary relevance.

Plain Python arithmetic in a fixed summation order keeps results bit-stable
for the exhaustive oracle comparison.
"""

from __future__ import annotations

import math
from typing import AbstractSet, Sequence

from coldgan.errors import DomainError


def _check(relevant: AbstractSet[int], k: int) -> None:
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if not relevant:
        raise DomainError("relevant set is empty")


def _hits(recs: Sequence[int], relevant: AbstractSet[int], k: int) -> int:
    return sum(1 for item in recs[:k] if item in relevant)


def precision_at_k(recs: Sequence[int], relevant: AbstractSet[int], k: int) -> float:
    _check(relevant, k)
    return _hits(recs, relevant, k) / k


def recall_at_k(recs: Sequence[int], relevant: AbstractSet[int], k: int) -> float:
    _check(relevant, k)
    return _hits(recs, relevant, k) / len(relevant)


def ndcg_at_k(recs: Sequence[int], relevant: AbstractSet[int], k: int) -> float:
    """DCG over 1-based positions with log2(p + 1) discounts, over the ideal DCG."""

    _check(relevant, k)
    dcg = 0.0
    for position, item in enumerate(recs[:k], start=1):
        if item in relevant:
            dcg += 1.0 / math.log2(position + 1)
    ideal = 0.0
    for position in range(1, min(len(relevant), k) + 1):
        ideal += 1.0 / math.log2(position + 1)
    return dcg / ideal
