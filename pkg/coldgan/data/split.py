"""User-level train/test split."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

from coldgan.errors import DomainError, EmptyDatasetError
from coldgan.utils.seeding import substream

from .log import InteractionLog

# Absorbs products such as 0.29 * 100 = 28.999999999999996 before flooring.
_FLOOR_GUARD = 1e-9


@dataclass(frozen=True)
class DatasetSplit:
    train_users: Tuple[int, ...]
    test_users: Tuple[int, ...]
    seed: int

    def to_dict(self) -> dict:
        return {"train_users": list(self.train_users), "test_users": list(self.test_users), "seed": self.seed}


def split_users(log: InteractionLog, train_fraction: float = 0.8, seed: int = 0) -> DatasetSplit:
    """Shuffle user indices with the ``split`` substream; the first floor(f*M) train."""

    if not 0.0 < train_fraction < 1.0:
        raise DomainError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    num_users = log.num_users
    if num_users == 0:
        raise EmptyDatasetError("cannot split an empty dataset")

    order = substream(seed, "split").permutation(num_users)
    cut = math.floor(train_fraction * num_users + _FLOOR_GUARD)
    return DatasetSplit(
        train_users=tuple(sorted(int(user) for user in order[:cut])),
        test_users=tuple(sorted(int(user) for user in order[cut:])),
        seed=seed,
    )
