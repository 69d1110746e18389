"""Canonical serialization: byte-identical JSON and 17-significant-digit CSV.

JSON output is canonical (sorted keys, minimal separators, shortest
round-trip float repr, NaN/inf rejected) so that identical computations
serialize to identical bytes — reruns of a seeded command can be diffed.
"""

from __future__ import annotations

import json
from io import StringIO
from typing import Any, Iterable

__all__ = ["canonical_json", "trajectory_csv", "flatten", "rows_csv"]


def canonical_json(obj: Any) -> str:
    """Deterministic JSON text for a JSON-safe object tree."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def trajectory_csv(ts, xs, ys) -> str:
    """t,x,y rows at 17 significant digits (lossless for doubles)."""
    buf = StringIO()
    buf.write("t,x,y\n")
    for t, x, y in zip(ts, xs, ys):
        buf.write(f"{t:.17g},{x:.17g},{y:.17g}\n")
    return buf.getvalue()


def flatten(d: Any, prefix: str = "") -> list[tuple[str, Any]]:
    """Depth-first (dotted.path, leaf) pairs of a nested dict/list tree."""
    items: list[tuple[str, Any]] = []
    if isinstance(d, dict):
        for k in d:
            items.extend(flatten(d[k], f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(d, (list, tuple)):
        for i, v in enumerate(d):
            items.extend(flatten(v, f"{prefix}[{i}]"))
    else:
        items.append((prefix, d))
    return items


def rows_csv(rows: Iterable[tuple[str, Any]]) -> str:
    """key,value CSV with floats at 17 significant digits."""
    buf = StringIO()
    buf.write("key,value\n")
    for k, v in rows:
        if isinstance(v, float):
            buf.write(f"{k},{v:.17g}\n")
        else:
            buf.write(f"{k},{v}\n")
    return buf.getvalue()
