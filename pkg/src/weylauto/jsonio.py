"""JSON encodings and their schemas.

Rationals are written as decimal strings so that arbitrary precision survives.
"""

from __future__ import annotations

from fractions import Fraction

from .classical import PolySymbol
from .ratpoly import DimensionError, RationalPoly, grlex_key
from .weyl import DiffOp

_INT_STR = {"type": "string", "pattern": "^-?[0-9]+$"}
_POS_STR = {"type": "string", "pattern": "^[1-9][0-9]*$"}
_RAT_STR = {"type": "string", "pattern": "^-?[0-9]+(/[1-9][0-9]*)?$"}
_INDEX = {"type": "array", "items": {"type": "integer", "minimum": 0}}

POLY_SCHEMA = {
    "type": "object",
    "required": ["dim", "terms"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["exp", "num", "den"],
                "properties": {"exp": _INDEX, "num": _INT_STR, "den": _POS_STR},
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}


def _term_list_schema(key: str) -> dict:
    return {
        "type": "object",
        "required": ["dim", "ops"],
        "properties": {
            "dim": {"type": "integer", "minimum": 1},
            "ops": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": [key, "coeff"],
                    "properties": {key: _INDEX, "coeff": POLY_SCHEMA},
                    "additionalProperties": False,
                },
            },
        },
        "additionalProperties": False,
    }


DIFFOP_SCHEMA = _term_list_schema("alpha")
SYMBOL_SCHEMA = _term_list_schema("xi")

_POLY_OR_TEXT = {"oneOf": [POLY_SCHEMA, {"type": "string"}]}

DIFFEO_SCHEMA = {
    "type": "object",
    "required": ["forward"],
    "properties": {
        "forward": {"type": "array", "items": _POLY_OR_TEXT},
        "inverse": {"type": "array", "items": _POLY_OR_TEXT},
    },
    "additionalProperties": False,
}

AUTOSPEC_SCHEMA = {
    "type": "object",
    "required": ["family"],
    "properties": {
        "family": {"enum": ["D1", "S", "D"]},
        "dim": {"type": "integer", "minimum": 1},
        "a": {"enum": [0, 1]},
        "kappa": _RAT_STR,
        "lambda": _RAT_STR,
        "omega": {"type": "array", "items": _POLY_OR_TEXT},
        "phi": DIFFEO_SCHEMA,
    },
    "additionalProperties": False,
}

RESULT_SCHEMA = {
    "type": "object",
    "required": ["kind", "text", "value"],
    "properties": {
        "kind": {"enum": ["operator", "symbol", "poly"]},
        "text": {"type": "string"},
        "value": {"oneOf": [DIFFOP_SCHEMA, SYMBOL_SCHEMA, POLY_SCHEMA]},
    },
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["suite", "trials", "seed", "passed", "failures", "checks"],
    "properties": {
        "suite": {"type": "string"},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "passed": {"type": "boolean"},
        "failures": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["trial", "check"],
                "properties": {"trial": {"type": "integer"}, "check": {"type": "string"}},
            },
        },
        "checks": {"type": "object", "additionalProperties": {"type": "integer"}},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}

RECOVER_SCHEMA = {
    "type": "object",
    "required": ["family", "recovered", "round_trip"],
    "properties": {
        "family": {"enum": ["D1", "S", "D"]},
        "recovered": AUTOSPEC_SCHEMA,
        "round_trip": {"type": "boolean"},
    },
    "additionalProperties": False,
}

_TUPLE = {
    "type": "object",
    "required": ["kappa", "lambda", "c1", "c2"],
    "properties": {k: _RAT_STR for k in ("kappa", "lambda", "c1", "c2")},
    "additionalProperties": False,
}

CLASSIFY_SCHEMA = {
    "type": "object",
    "required": ["admissible", "n", "coeff_degree"],
    "properties": {
        "admissible": {"type": "array", "items": _TUPLE},
        "n": {"type": "integer", "minimum": 1},
        "coeff_degree": {"type": "integer", "minimum": 0},
        "field_degree": {"type": "integer", "minimum": 0},
        "rows": {"type": "integer"},
        "rank": {"type": "integer"},
        "conditions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["coefficients", "basis"],
                "properties": {
                    "coefficients": {"type": "array", "items": _RAT_STR},
                    "basis": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
    },
    "additionalProperties": False,
}

ERROR_SCHEMA = {
    "type": "object",
    "required": ["error", "message"],
    "properties": {"error": {"type": "string"}, "message": {"type": "string"}},
    "additionalProperties": False,
}

SCHEMAS = {
    "poly": POLY_SCHEMA,
    "diffop": DIFFOP_SCHEMA,
    "symbol": SYMBOL_SCHEMA,
    "diffeo": DIFFEO_SCHEMA,
    "autospec": AUTOSPEC_SCHEMA,
    "result": RESULT_SCHEMA,
    "report": REPORT_SCHEMA,
    "recover": RECOVER_SCHEMA,
    "classify": CLASSIFY_SCHEMA,
    "error": ERROR_SCHEMA,
}


def rational_to_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def rational_from_str(s) -> Fraction:
    if isinstance(s, int) and not isinstance(s, bool):
        return Fraction(s)
    if not isinstance(s, str):
        raise ValueError(f"expected a rational as a string, got {s!r}")
    return Fraction(s.strip())


def poly_to_json(p: RationalPoly) -> dict:
    terms = sorted(p.items(), key=lambda t: grlex_key(t[0]), reverse=True)
    return {
        "dim": p.dim,
        "terms": [{"exp": list(e), "num": str(c.numerator), "den": str(c.denominator)} for e, c in terms],
    }


def poly_from_json(obj, dim: int | None = None) -> RationalPoly:
    if isinstance(obj, str):
        from .expr import parse_poly

        return parse_poly(obj, dim)
    n = obj["dim"]
    if dim is not None and n != dim:
        raise DimensionError(f"polynomial has dimension {n}, expected {dim}")
    terms = {}
    for t in obj["terms"]:
        e = tuple(t["exp"])
        if len(e) != n:
            raise DimensionError("exponent length differs from dim")
        terms[e] = terms.get(e, 0) + Fraction(int(t["num"]), int(t["den"]))
    return RationalPoly(n, terms)


def _terms_to_json(value, key: str) -> dict:
    return {
        "dim": value.dim,
        "ops": [
            {key: list(a), "coeff": poly_to_json(f)}
            for a, f in sorted(value.items(), key=lambda t: grlex_key(t[0]), reverse=True)
        ],
    }


def diffop_to_json(d: DiffOp) -> dict:
    return _terms_to_json(d, "alpha")


def diffop_from_json(obj) -> DiffOp:
    n = obj["dim"]
    terms: dict = {}
    for t in obj["ops"]:
        a = tuple(t["alpha"])
        f = poly_from_json(t["coeff"], n)
        terms[a] = terms[a] + f if a in terms else f
    return DiffOp(n, terms)


def symbol_to_json(p: PolySymbol) -> dict:
    return _terms_to_json(p, "xi")


def symbol_from_json(obj) -> PolySymbol:
    n = obj["dim"]
    terms: dict = {}
    for t in obj["ops"]:
        a = tuple(t["xi"])
        f = poly_from_json(t["coeff"], n)
        terms[a] = terms[a] + f if a in terms else f
    return PolySymbol(n, terms)


def diffeo_to_json(phi) -> dict:
    return {"forward": [poly_to_json(p) for p in phi.forward], "inverse": [poly_to_json(p) for p in phi.inverse]}


def diffeo_from_json(obj, dim: int | None = None):
    from .autos import PolyDiffeo

    n = dim if dim is not None else len(obj["forward"])
    fwd = [poly_from_json(p, n) for p in obj["forward"]]
    if "inverse" in obj:
        return PolyDiffeo(fwd, [poly_from_json(p, n) for p in obj["inverse"]])
    return PolyDiffeo.from_inverse(fwd).inverted()


def autospec_to_json(spec) -> dict:
    out = {"family": spec.family, "dim": spec.dim}
    if spec.family == "D":
        out["a"] = spec.a
    else:
        out["kappa"] = rational_to_str(spec.kappa)
    if spec.family == "D1":
        out["lambda"] = rational_to_str(spec.lam)
    out["omega"] = [poly_to_json(w) for w in spec.omega.components]
    out["phi"] = diffeo_to_json(spec.phi)
    return out


def autospec_from_json(obj, dim: int | None = None):
    from .autos import AutoSpec, OneForm

    n = obj.get("dim", dim)
    if n is None:
        if "omega" in obj:
            n = len(obj["omega"])
        elif "phi" in obj:
            n = len(obj["phi"]["forward"])
        else:
            raise DimensionError("cannot infer the dimension of the spec; pass --dim or a 'dim' field")
    if dim is not None and dim != n:
        raise DimensionError(f"spec has dimension {n}, expected {dim}")
    omega = OneForm([poly_from_json(w, n) for w in obj["omega"]]) if "omega" in obj else None
    phi = diffeo_from_json(obj["phi"], n) if "phi" in obj else None
    family = obj["family"]
    kwargs = {}
    if "kappa" in obj:
        kwargs["kappa"] = rational_from_str(obj["kappa"])
    if "lambda" in obj:
        kwargs["lam"] = rational_from_str(obj["lambda"])
    if "a" in obj:
        kwargs["a"] = obj["a"]
    if family == "D" and "kappa" in kwargs:
        a = kwargs.get("a", 0)
        if kwargs.pop("kappa") != (-1) ** a:
            raise ValueError("family D requires kappa = (-1)^a")
    return AutoSpec(family, n, omega=omega, phi=phi, **kwargs)


def value_to_json(value) -> dict:
    """Result envelope {kind, text, value} for an operator, symbol or polynomial."""
    from .expr import format_value

    if isinstance(value, DiffOp):
        kind, body = "operator", diffop_to_json(value)
    elif isinstance(value, PolySymbol):
        kind, body = "symbol", symbol_to_json(value)
    elif isinstance(value, RationalPoly):
        kind, body = "poly", poly_to_json(value)
    else:
        raise TypeError(f"cannot encode {type(value).__name__}")
    return {"kind": kind, "text": format_value(value), "value": body}
