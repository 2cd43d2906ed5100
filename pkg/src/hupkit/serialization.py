"""Exact number parsing and canonical JSON output.

Numbers travel through JSON either as plain JSON numbers or as strings of
the form ``"p/q"``, ``"inf"`` and ``"-inf"``.  Rationals that are exactly
representable as binary floats are written as numbers; everything else is
written as a ``"p/q"`` string so that no information is lost.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational, Real
from typing import Any

Number = Fraction | float  # float only for +-inf

INF = math.inf


def exact(value: Any) -> Number:
    """Convert ``value`` to an exact Fraction (infinities stay as floats)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity"):
            return INF
        if text in ("-inf", "-infinity"):
            return -INF
        return Fraction(text)
    if isinstance(value, Real):
        value = float(value)
        if math.isnan(value):
            raise ValueError("NaN is not a valid coordinate")
        if math.isinf(value):
            return value
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a number")


def is_finite(x: Number) -> bool:
    return not (isinstance(x, float) and math.isinf(x))


def encode_number(x: Any) -> Any:
    """JSON-ready form of a number without loss of precision."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x.numerator)
        f = float(x)
        if Fraction(f) == x:
            return f
        return f"{x.numerator}/{x.denominator}"
    return x


def _format_float(x: float) -> str:
    if math.isnan(x):
        raise ValueError("NaN cannot be serialised")
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def canonical_dumps(obj: Any, indent: int | None = 2) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits."""
    import json

    def enc(o: Any, level: int) -> str:
        pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
        end = "" if indent is None else "\n" + " " * (indent * level)
        sep = "," if indent is None else ","
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [
                f"{pad}{json.dumps(str(k))}: {enc(v, level + 1)}"
                for k, v in sorted(o.items(), key=lambda kv: str(kv[0]))
            ]
            return "{" + sep.join(items) + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            items = [f"{pad}{enc(v, level + 1)}" for v in o]
            return "[" + sep.join(items) + end + "]"
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, Fraction):
            return enc(encode_number(o), level)
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return _format_float(o)
        if hasattr(o, "item"):  # numpy scalar
            return enc(o.item(), level)
        if isinstance(o, str):
            return json.dumps(o, ensure_ascii=False)
        raise TypeError(f"cannot serialise {type(o).__name__}")

    return enc(obj, 0)
