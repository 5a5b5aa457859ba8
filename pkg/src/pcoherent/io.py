"""Matrix exchange format and deterministic JSON output.

A complex scalar is written ``[re, im]``; a matrix is a row-major nested list
of scalars. On input, plain numbers are accepted as real scalars. Floats are
written with 17 significant digits so reports are bit-faithful and diffable.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

SCALAR = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": SCALAR}}
VECTOR = {"type": "array", "minItems": 1, "items": SCALAR}


def parse_scalar(v) -> complex:
    if isinstance(v, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(v, (int, float)):
        z = complex(v)
    elif isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v):
        z = complex(v[0], v[1])
    else:
        raise ValueError(f"not a scalar: {v!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("scalars must be finite")
    return z


def parse_vector(v) -> np.ndarray:
    if not isinstance(v, (list, tuple)) or not v:
        raise ValueError("expected a non-empty list of scalars")
    return np.array([parse_scalar(t) for t in v], dtype=complex)


def parse_matrix(rows, square: bool = True) -> np.ndarray:
    if not isinstance(rows, (list, tuple)) or not rows or not all(isinstance(r, (list, tuple)) for r in rows):
        raise ValueError("expected a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("matrix rows have different lengths")
    M = np.array([[parse_scalar(t) for t in r] for r in rows], dtype=complex)
    if square and M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M


def complex_matrix(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def complex_vector(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).ravel()]


def real_matrix(M) -> list:
    M = np.asarray(M)
    if M.dtype.kind in "iu":
        return [[int(t) for t in row] for row in M]
    return [[float(t) for t in row] for row in np.real(M)]


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _dump(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, Fraction):
        return str(obj.numerator) if obj.denominator == 1 else json.dumps(str(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _dump([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _dump(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_dump(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _dump(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits and stable layout."""
    return _dump(obj, indent, 0) + "\n"
