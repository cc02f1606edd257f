"""Deterministic JSON/CSV emission.

Floats are serialized with 17 significant digits so that every double
round-trips exactly; non-finite values become null in JSON and literal
inf/-inf/nan tokens in CSV.  CSV output is RFC 4180 (CRLF line endings,
minimal quoting), UTF-8, '.' decimal separator.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from typing import Iterable, Sequence


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _encode(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k), ensure_ascii=False)}: {_encode(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _encode(obj.item())
    raise TypeError(f"cannot serialize {type(obj)!r}")


def dumps(obj) -> str:
    """Serialize to deterministic JSON text (insertion-ordered keys)."""
    return _encode(obj) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """RFC 4180 CSV text with 17-significant-digit floats."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def canonical_config_hash(config: dict) -> str:
    return sha256_text(json.dumps(config, sort_keys=True, separators=(",", ":")))
