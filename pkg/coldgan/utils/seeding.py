"""Named random substreams derived from one root seed.

Every stage (split, init, rejuvenation, shuffle, validation) draws from its own
stream, so changing how much randomness one stage consumes never shifts the
numbers another stage sees.
"""

from __future__ import annotations

import zlib

import numpy as np


def substream(seed: int, name: str) -> np.random.Generator:
    """Return a generator keyed on ``(seed, name)``; identical across platforms."""

    key = zlib.crc32(name.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, key]))
