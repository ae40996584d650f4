"""Stable hashing for configs and datasets."""

from __future__ import annotations

import hashlib
import json
from typing import Any


def stable_json(data: Any) -> str:
    """Canonical JSON text: sorted keys, no whitespace variance."""

    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_hex(payload: str | bytes) -> str:
    if isinstance(payload, str):
        payload = payload.encode("utf-8")
    return hashlib.sha256(payload).hexdigest()
