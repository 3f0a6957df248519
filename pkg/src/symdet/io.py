"""JSON encoding of tuple and polynomial documents."""
from __future__ import annotations

import hashlib
import json
import re
from fractions import Fraction
from typing import Any

import numpy as np

from .errors import BadRational, SchemaError
from .numeric import Regime
from .pencil import GenCharPoly, SymTuple

_RATIONAL = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: Any, path: str = "value") -> Fraction:
    if not isinstance(text, str):
        raise BadRational(path, f"expected a string 'p/q', got {type(text).__name__}")
    m = _RATIONAL.match(text)
    if not m:
        raise BadRational(path, f"malformed rational {text!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise BadRational(path, "zero denominator")
    return Fraction(int(m.group(1)), den)


def format_rational(x) -> str:
    return str(Fraction(x))


def parse_complex(v: Any, path: str = "value") -> complex:
    if (not isinstance(v, list) or len(v) != 2
            or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v)):
        raise SchemaError(path, "complex entries are [re, im] number pairs")
    z = complex(float(v[0]), float(v[1]))
    if not np.isfinite(z):
        raise SchemaError(path, "complex entry is not finite")
    return z


def format_complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_scalar(x):
    if isinstance(x, (Fraction, int)):
        return format_rational(x)
    return format_complex(x)


def encode_matrix(M) -> list[list]:
    M = np.asarray(M)
    return [[encode_scalar(x) for x in row] for row in M]


def _loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno}", exc.msg) from None


def _int_field(doc: dict, key: str, minimum: int) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise SchemaError(key, f"expected an integer >= {minimum}")
    return v


def tuple_from_obj(doc: Any) -> SymTuple:
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected a JSON object")
    n = _int_field(doc, "n", 1)
    r = _int_field(doc, "r", 1)
    regime = doc.get("regime")
    if regime not in ("rational", "complex"):
        raise SchemaError("regime", "expected 'rational' or 'complex'")
    mats = doc.get("matrices")
    if not isinstance(mats, list) or len(mats) != r + 1:
        raise SchemaError("matrices", f"expected a list of r+1 = {r + 1} matrices")
    size = n * (n + 1) // 2
    tris = []
    for k, tri in enumerate(mats):
        path = f"matrices[{k}]"
        if not isinstance(tri, list) or len(tri) != size:
            raise SchemaError(path, f"expected an upper triangle of {size} entries")
        if regime == "rational":
            tris.append([parse_rational(v, f"{path}[{i}]") for i, v in enumerate(tri)])
        else:
            tris.append([parse_complex(v, f"{path}[{i}]") for i, v in enumerate(tri)])
    return SymTuple.from_upper(n, tris, regime)


def parse_tuple(text: str) -> SymTuple:
    return tuple_from_obj(_loads(text))


def tuple_to_obj(A: SymTuple) -> dict:
    enc = format_rational if A.regime is Regime.EXACT else format_complex
    return {
        "n": A.n,
        "r": A.r,
        "regime": A.regime.value,
        "matrices": [[enc(x) for x in tri] for tri in A.upper()],
    }


def serialize_tuple(A: SymTuple) -> str:
    return json.dumps(tuple_to_obj(A), indent=2) + "\n"


def poly_to_obj(P: GenCharPoly) -> dict:
    return {
        "n_vars": P.n_vars,
        "degree": P.degree,
        "regime": P.regime.value,
        "monomials": [list(e) for e in P.monomials()],
        "coefficients": [encode_scalar(c) for c in P.coeffs],
        "text": P.to_text(),
    }


def poly_from_obj(doc: Any) -> GenCharPoly:
    if isinstance(doc, dict) and "payload" in doc and isinstance(doc["payload"], dict):
        doc = doc["payload"].get("poly", doc["payload"])
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected a JSON object")
    n_vars = _int_field(doc, "n_vars", 1)
    degree = _int_field(doc, "degree", 1)
    coeffs = doc.get("coefficients")
    regime = doc.get("regime", "rational")
    if not isinstance(coeffs, list):
        raise SchemaError("coefficients", "expected a list")
    if regime == "rational":
        vals = np.array([parse_rational(c, f"coefficients[{i}]") for i, c in enumerate(coeffs)], dtype=object)
    elif regime == "complex":
        vals = np.array([parse_complex(c, f"coefficients[{i}]") for i, c in enumerate(coeffs)])
    else:
        raise SchemaError("regime", "expected 'rational' or 'complex'")
    try:
        return GenCharPoly(n_vars, degree, vals)
    except ValueError as exc:
        raise SchemaError("coefficients", str(exc)) from None


def parse_poly(text: str) -> GenCharPoly:
    return poly_from_obj(_loads(text))


def digest(*texts: str) -> str:
    h = hashlib.sha256()
    for t in texts:
        h.update(t.encode())
        h.update(b"\0")
    return h.hexdigest()
