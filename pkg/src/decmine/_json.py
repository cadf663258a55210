"""Canonical JSON helpers: stable key order, stable float formatting."""

from __future__ import annotations

import json
from typing import Any


def canonical_dumps(obj: Any) -> str:
    """Serialize with sorted keys and a trailing newline, byte-stable across runs."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def canonical_dump_bytes(obj: Any) -> bytes:
    return canonical_dumps(obj).encode("utf-8")


def loads(data: str | bytes) -> Any:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return json.loads(data)
