"""Dataset statistics and fingerprints."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Dict

from coldgan.utils.hashing import sha256_hex

from .log import InteractionLog
from .parsers import format_canonical


@dataclass(frozen=True)
class DatasetStats:
    users: int
    items: int
    ratings: int
    sparsity: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def dataset_stats(log: InteractionLog) -> DatasetStats:
    """Users, items, ratings and sparsity = 1 - ratings / (users * items)."""

    cells = log.num_users * log.num_items
    sparsity = 1.0 - log.num_ratings / cells if cells else 0.0
    return DatasetStats(users=log.num_users, items=log.num_items, ratings=log.num_ratings, sparsity=sparsity)


def dataset_fingerprint(log: InteractionLog) -> Dict[str, object]:
    return {"records": log.num_ratings, "sha256": sha256_hex(format_canonical(log))}


def format_stats_table(stats: DatasetStats) -> str:
    lines = ["Dataset Statistics", "=" * 40]
    header = f"{'Field':<10} | {'Value':>12}"
    lines.append(header)
    lines.append("-" * len(header))
    lines.append(f"{'users':<10} | {stats.users:>12,}")
    lines.append(f"{'items':<10} | {stats.items:>12,}")
    lines.append(f"{'ratings':<10} | {stats.ratings:>12,}")
    lines.append(f"{'sparsity':<10} | {stats.sparsity:>11.1%}")
    return "\n".join(lines)
