"""JSON encoding with fixed float precision.

Floats are rounded to 12 significant digits. Non-finite values are written
as the strings ``"inf"``, ``"-inf"`` and ``"nan"`` so the output stays
strict JSON; :func:`decode_floats` reverses that.
"""

from __future__ import annotations

import json
import math

SIGNIFICANT_DIGITS = 12

_NONFINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def round_sig(x: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    return float(f"{x:.{digits}g}")


def encode_floats(obj, digits: int = SIGNIFICANT_DIGITS):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
        return round_sig(obj, digits)
    if isinstance(obj, dict):
        return {k: encode_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode_floats(v, digits) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return encode_floats(obj.item(), digits)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def decode_floats(obj):
    if isinstance(obj, str) and obj in _NONFINITE:
        return _NONFINITE[obj]
    if isinstance(obj, dict):
        return {k: decode_floats(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [decode_floats(v) for v in obj]
    return obj


def dumps(obj, digits: int = SIGNIFICANT_DIGITS) -> str:
    if hasattr(obj, "to_dict"):
        obj = obj.to_dict()
    return json.dumps(encode_floats(obj, digits), indent=2, allow_nan=False) + "\n"


def loads(text: str):
    return decode_floats(json.loads(text))
