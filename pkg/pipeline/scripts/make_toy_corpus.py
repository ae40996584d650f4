"""Write a small two-cluster MovieLens-format corpus for the CI smoke run."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

USERS = 60
ITEMS = 40
CLUSTER_SIZE = 6


def build_lines(seed: int) -> list[str]:
    rng = np.random.default_rng(seed)
    fillers = np.arange(2 * CLUSTER_SIZE, ITEMS)
    lines: list[str] = []
    for user in range(USERS):
        cluster = user % 2
        preferred = rng.permutation(np.arange(cluster * CLUSTER_SIZE, (cluster + 1) * CLUSTER_SIZE))
        timestamp = 1_000 * user
        for item in preferred:
            timestamp += 1
            lines.append(f"{user + 1}::{item + 1}::5::{timestamp}")
        for item in rng.choice(fillers, size=12, replace=False):
            timestamp += 1
            lines.append(f"{user + 1}::{item + 1}::{int(rng.integers(1, 3))}::{timestamp}")
    return lines


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", help="Path of the ratings.dat file to write.")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = build_lines(args.seed)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    sys.stdout.write(f"wrote {len(lines)} ratings to {path}\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
