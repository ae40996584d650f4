"""Utility helpers for the toolkit."""

from .fileio import read_text_file, read_yaml_file, write_bytes_atomic, write_json_atomic, write_text_atomic
from .hashing import sha256_hex, stable_json
from .seeding import substream

__all__ = [
    "read_text_file",
    "read_yaml_file",
    "write_bytes_atomic",
    "write_json_atomic",
    "write_text_atomic",
    "sha256_hex",
    "stable_json",
    "substream",
]
