from pathlib import Path
from typing import Callable, List

import numpy as np
import pytest

from coldgan.data.log import Interaction, InteractionLog
from coldgan.data.parsers import format_movielens

PLANTED_USERS = 50
PLANTED_ITEMS = 30
PREFERRED = {0: tuple(range(0, 5)), 1: tuple(range(5, 10))}
FILLERS = tuple(range(10, 30))


def planted_log(seed: int = 0, fillers_per_user: int = 10) -> InteractionLog:
    """Two user clusters with disjoint preferred item sets.

    Every user rates the five items of their cluster with 5 (earliest first)
    and ``fillers_per_user`` shared filler items with 1 afterwards, so the
    relevant set of each user is exactly their cluster's items.
    """

    rng = np.random.default_rng(seed)
    records: List[Interaction] = []
    for user in range(PLANTED_USERS):
        cluster = user % 2
        preferred = list(PREFERRED[cluster])
        rng.shuffle(preferred)
        fillers = rng.choice(FILLERS, size=fillers_per_user, replace=False)
        timestamp = 1_000 * user
        for item in preferred:
            timestamp += 1
            records.append(Interaction(f"u{user}", f"i{item}", 5.0, timestamp))
        for item in fillers:
            timestamp += 1
            records.append(Interaction(f"u{user}", f"i{int(item)}", 1.0, timestamp))
    return InteractionLog.from_interactions(records)


@pytest.fixture
def planted() -> Callable[..., InteractionLog]:
    return planted_log


@pytest.fixture
def tiny_log() -> InteractionLog:
    records = [
        Interaction("alice", "m1", 5.0, 10),
        Interaction("alice", "m2", 3.0, 20),
        Interaction("alice", "m3", 4.0, 30),
        Interaction("bob", "m2", 2.0, 5),
        Interaction("bob", "m4", 5.0, 6),
        Interaction("carol", "m1", 1.0, 7),
        Interaction("carol", "m3", 5.0, 8),
        Interaction("carol", "m4", 4.0, 9),
    ]
    return InteractionLog.from_interactions(records)


@pytest.fixture
def planted_ratings_file(tmp_path) -> Path:
    path = tmp_path / "ratings.dat"
    path.write_text(format_movielens(planted_log(0)), encoding="utf-8")
    return path


@pytest.fixture
def run_config_file(tmp_path, planted_ratings_file) -> Path:
    """A small, fast run config over the planted corpus."""

    path = tmp_path / "run.yaml"
    path.write_text(
        f"""
seed: 3
output_dir: {tmp_path / "out"}
dataset:
  path: {planted_ratings_file.name}
  format: movielens
  min_user_interactions: 1
  min_item_raters: 1
model:
  g_hidden: 8
  d_hidden: 4
training:
  epochs: 3
  batch_size: 8
  patience: 2
  validation_fraction: 0.2
  validation_cold_keep: 2
evaluation:
  ks: [5, 10]
  cold_keep: 2
ablation:
  seeds: [0, 1]
""".lstrip(),
        encoding="utf-8",
    )
    return path
