"""Small shared helpers."""

from __future__ import annotations

import json
from typing import Any


def canonical_json(obj: Any) -> str:
    """Serialize with sorted keys and compact separators.

    Used for every persisted JSON file and every API body so that identical
    payloads are byte-identical regardless of insertion order. Floats go
    through repr(), which round-trips 64-bit values.
    """
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def write_canonical_json(path, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(obj))
        fh.write("\n")
