"""Canonical JSON text: sorted keys, arrays in order, floats at 12 significant digits."""

from __future__ import annotations

import json
import math
from typing import Any

SIG_DIGITS = 12


def round_sig(x: float) -> float:
    """Round to the value the canonical writer will print, so a write/read cycle is lossless."""
    return float(format(x, f".{SIG_DIGITS}g"))


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite float {x!r} cannot be serialized")
    if x == 0:
        x = 0.0  # no negative zero
    return format(x, f".{SIG_DIGITS}g")


def dumps(obj: Any) -> str:
    """Serialize ``obj`` canonically (one compact line, trailing newline)."""
    return _encode(obj) + "\n"


def _encode(obj: Any) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        return "{" + ",".join(f"{json.dumps(str(k))}:{_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def loads(text: str) -> Any:
    return json.loads(text)
