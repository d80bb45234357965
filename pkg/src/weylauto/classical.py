"""Polynomial symbols on T*R^n, the canonical Poisson bracket and the principal symbol.

A :class:`PolySymbol` maps xi-exponents to x-coefficient polynomials, so the
graded pieces S_i (xi-degree exactly i) are read off on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .ratpoly import (
    DimensionError,
    RationalPoly,
    as_rational,
    format_terms,
    grlex_key,
    monomials_up_to,
    poly_add,
    poly_mul,
    poly_partial,
    x_names,
    zero_index,
)
from .weyl import NEG_INF, DiffOp, ad_power, op_bracket, op_compose, spanning_monomials


class ZeroOperatorError(ValueError):
    """The principal symbol of the zero operator is undefined."""


class PolySymbol:
    """Element of Pol(T*R^n): sum_a P_a(x) xi^a."""

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[tuple, RationalPoly] | None = None):
        self.dim = dim
        clean = {}
        for a, f in (terms or {}).items():
            a = tuple(a)
            if len(a) != dim:
                raise DimensionError(f"xi-index {a} has length != {dim}")
            if not isinstance(f, RationalPoly):
                f = RationalPoly.constant(dim, f)
            if f.dim != dim:
                raise DimensionError("coefficient dimension mismatch")
            if a in clean:
                f = clean[a] + f
            if f:
                clean[a] = f
            else:
                clean.pop(a, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, dim, terms):
        obj = object.__new__(cls)
        obj.dim = dim
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, dim: int) -> "PolySymbol":
        return cls._raw(dim, {})

    @classmethod
    def from_poly(cls, f: RationalPoly) -> "PolySymbol":
        return cls._raw(f.dim, {zero_index(f.dim): f} if f else {})

    @classmethod
    def constant(cls, dim: int, c) -> "PolySymbol":
        return cls.from_poly(RationalPoly.constant(dim, c))

    @classmethod
    def xi(cls, dim: int, i: int) -> "PolySymbol":
        e = [0] * dim
        e[i] = 1
        return cls._raw(dim, {tuple(e): RationalPoly.constant(dim, 1)})

    @classmethod
    def x(cls, dim: int, i: int) -> "PolySymbol":
        return cls.from_poly(RationalPoly.variable(dim, i))

    # flattening to a polynomial in (x1..xn, xi1..xin)

    def flatten(self) -> RationalPoly:
        out = {}
        for a, f in self._terms.items():
            for e, c in f.items():
                out[e + a] = c
        return RationalPoly._raw(2 * self.dim, out)

    @classmethod
    def unflatten(cls, p: RationalPoly) -> "PolySymbol":
        if p.dim % 2:
            raise DimensionError("flat symbol needs an even number of variables")
        n = p.dim // 2
        grouped: dict = {}
        for e, c in p.items():
            grouped.setdefault(e[n:], {})[e[:n]] = c
        return cls._raw(n, {a: RationalPoly._raw(n, t) for a, t in grouped.items()})

    # views

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, a) -> RationalPoly:
        return self._terms.get(tuple(a), RationalPoly.zero(self.dim))

    def is_zero(self) -> bool:
        return not self._terms

    def xi_degree(self):
        """Top xi-degree; ``NEG_INF`` for zero."""
        if not self._terms:
            return NEG_INF
        return max(sum(a) for a in self._terms)

    def grades(self) -> list[int]:
        return sorted({sum(a) for a in self._terms})

    def component(self, i: int) -> "PolySymbol":
        """Graded piece in S_i."""
        return PolySymbol._raw(self.dim, {a: f for a, f in self._terms.items() if sum(a) == i})

    def is_homogeneous(self) -> bool:
        return len(self.grades()) <= 1

    def in_s0(self) -> bool:
        return all(not any(a) for a in self._terms)

    def as_poly(self) -> RationalPoly:
        if not self.in_s0():
            raise ValueError("symbol is not in S_0")
        return self.coeff(zero_index(self.dim))

    # arithmetic

    def _check(self, other):
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _coerce(self, other):
        if isinstance(other, PolySymbol):
            self._check(other)
            return other
        if isinstance(other, RationalPoly):
            self._check(other)
            return PolySymbol.from_poly(other)
        if isinstance(other, (int, Fraction)):
            return PolySymbol.constant(self.dim, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for a, f in other._terms.items():
            if a in out:
                s = poly_add(out[a], f)
                if s:
                    out[a] = s
                else:
                    del out[a]
            else:
                out[a] = f
        return PolySymbol._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return PolySymbol._raw(self.dim, {a: -f for a, f in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for a, f in self._terms.items():
            for b, g in other._terms.items():
                ab = tuple(x + y for x, y in zip(a, b))
                prod = poly_mul(f, g)
                out[ab] = poly_add(out[ab], prod) if ab in out else prod
        return PolySymbol._raw(self.dim, {a: f for a, f in out.items() if f})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        out = PolySymbol.constant(self.dim, 1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c) -> "PolySymbol":
        c = as_rational(c)
        if not c:
            return PolySymbol.zero(self.dim)
        return PolySymbol._raw(self.dim, {a: f.scale(c) for a, f in self._terms.items()})

    def partial_x(self, i: int) -> "PolySymbol":
        out = {}
        for a, f in self._terms.items():
            g = poly_partial(f, i)
            if g:
                out[a] = g
        return PolySymbol._raw(self.dim, out)

    def partial_xi(self, i: int) -> "PolySymbol":
        out = {}
        for a, f in self._terms.items():
            k = a[i]
            if k:
                b = a[:i] + (k - 1,) + a[i + 1:]
                out[b] = f.scale(k)
        return PolySymbol._raw(self.dim, out)

    def __eq__(self, other):
        if isinstance(other, PolySymbol):
            return self.dim == other.dim and self._terms == other._terms
        if isinstance(other, (int, Fraction, RationalPoly)):
            return self == self._coerce(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"PolySymbol({self.dim}, {format_symbol(self)!r})"

    def __str__(self):
        return format_symbol(self)


def format_symbol(p: PolySymbol) -> str:
    n = p.dim
    names = x_names(n) + [f"xi{i + 1}" for i in range(n)]
    items = [(e, c) for e, c in p.flatten().items()]
    # order by xi-degree first, then graded lex on (x, xi)
    items.sort(key=lambda t: (sum(t[0][n:]), grlex_key(t[0])), reverse=True)
    if not items:
        return "0"
    text = format_terms(items[:1], names)
    for e, c in items[1:]:
        piece = format_terms([(e, c)], names)
        text += " - " + piece[1:] if piece.startswith("-") else " + " + piece
    return text


def principal_symbol(d: DiffOp) -> PolySymbol:
    """Top-order part of ``d`` with d^alpha replaced by xi^alpha."""
    if d.is_zero():
        raise ZeroOperatorError("principal symbol of the zero operator")
    k = d.order()
    return PolySymbol._raw(d.dim, {a: f for a, f in d.items() if sum(a) == k})


def full_symbol(d: DiffOp) -> PolySymbol:
    """All orders of ``d`` (normal-ordered), d^alpha -> xi^alpha."""
    return PolySymbol._raw(d.dim, dict(d.items()))


def symbol_to_op(p: PolySymbol) -> DiffOp:
    """Normal-ordered quantization xi^alpha -> d^alpha."""
    return DiffOp(p.dim, dict(p.items()))


def poisson_bracket(p: PolySymbol, q: PolySymbol) -> PolySymbol:
    """{P, Q} = sum_i dP/dxi_i dQ/dx^i - dP/dx^i dQ/dxi_i."""
    p._check(q)
    out = PolySymbol.zero(p.dim)
    for i in range(p.dim):
        a = p.partial_xi(i)
        if a:
            b = q.partial_x(i)
            if b:
                out = out + a * b
        a = p.partial_x(i)
        if a:
            b = q.partial_xi(i)
            if b:
                out = out - a * b
    return out


@dataclass(frozen=True)
class HamiltonianField:
    """H_P = sum_i (dP/dxi_i) d/dx^i - (dP/dx^i) d/dxi_i, stored as its components."""

    d_xi: tuple
    d_x: tuple

    @classmethod
    def of(cls, p: PolySymbol) -> "HamiltonianField":
        n = p.dim
        return cls(tuple(p.partial_xi(i) for i in range(n)), tuple(p.partial_x(i) for i in range(n)))

    def __call__(self, q: PolySymbol) -> PolySymbol:
        out = PolySymbol.zero(q.dim)
        for i in range(q.dim):
            out = out + self.d_xi[i] * q.partial_x(i) - self.d_x[i] * q.partial_xi(i)
        return out


def hamiltonian_apply(p: PolySymbol, f, k: int) -> PolySymbol:
    """(H_P)^k f for a function f in S_0."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if isinstance(f, RationalPoly):
        f = PolySymbol.from_poly(f)
    if not f.in_s0():
        raise ValueError("f must lie in S_0")
    h = HamiltonianField.of(p)
    out = f
    for _ in range(k):
        if not out:
            break
        out = h(out)
    return out


@dataclass
class CompatReport:
    product_ok: bool
    bracket_ok: bool
    branch: str  # "equal" or "zero"

    @property
    def ok(self) -> bool:
        return self.product_ok and self.bracket_ok


def symbol_compat_check(d1: DiffOp, d2: DiffOp) -> CompatReport:
    """Check sigma(D1)sigma(D2) and {sigma(D1), sigma(D2)} against D1 o D2 and [D1, D2]."""
    s1 = principal_symbol(d1)
    s2 = principal_symbol(d2)
    k1, k2 = d1.order(), d2.order()
    prod_top = full_symbol(op_compose(d1, d2)).component(k1 + k2)
    product_ok = s1 * s2 == prod_top
    pb = poisson_bracket(s1, s2)
    bracket = op_bracket(d1, d2)
    top = full_symbol(bracket).component(k1 + k2 - 1) if k1 + k2 >= 1 else PolySymbol.zero(d1.dim)
    if top:
        branch = "equal"
        bracket_ok = pb == principal_symbol(bracket) and bracket.order() == k1 + k2 - 1
    else:
        branch = "zero"
        bracket_ok = not pb
    return CompatReport(product_ok, bracket_ok, branch)


@dataclass
class NilpotencyReport:
    """Least k with ad_d^k(probe) == 0, or None when it exceeds ``max_depth``."""

    max_depth: int
    depths: dict = field(default_factory=dict)

    @property
    def locally_nilpotent(self) -> bool:
        return all(k is not None for k in self.depths.values())


def ad_nilpotency_probe(d: DiffOp, max_depth: int, probe_degree: int | None = None) -> NilpotencyReport:
    """Probe local nilpotency of ad_d on monomials and coordinate fields.

    The probe family is every monomial of degree <= ``probe_degree`` (default
    ``max_depth - 1``) plus the fields d_1..d_n.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if probe_degree is None:
        probe_degree = max_depth - 1
    n = d.dim
    probes = {str(m): DiffOp.from_poly(m) for m in spanning_monomials(n, probe_degree)}
    for i in range(n):
        probes[f"d{i + 1}"] = DiffOp.partial(n, i)
    report = NilpotencyReport(max_depth)
    for label, probe in probes.items():
        cur = probe
        found = None
        for k in range(1, max_depth + 1):
            cur = op_bracket(d, cur)
            if not cur:
                found = k
                break
        report.depths[label] = found
    return report


def bracket_filtration_probe(d: DiffOp, i: int) -> bool:
    """Whether [d, f] has order <= i for every monomial f of degree <= order(d) + 1."""
    if i < -1:
        raise ValueError("i must be >= -1")
    k = d.order()
    deg = (k if k is not NEG_INF else 0) + 1
    result = all(op_bracket(d, DiffOp.from_poly(f)).order() <= i for f in spanning_monomials(d.dim, deg))
    if k <= i + 1 and not result:
        raise AssertionError("forward inclusion D^(i+1) -> [D, A] in D^i violated")
    return result


def symbol_bracket_filtration_probe(p: PolySymbol, i: int) -> bool:
    """Whether {P, f} has xi-degree <= i for every monomial f of degree <= deg(P) + 1."""
    deg = max(p.flatten().degree(), 0) + 1
    result = all(
        poisson_bracket(p, PolySymbol.from_poly(f)).xi_degree() <= i
        for f in spanning_monomials(p.dim, deg)
    )
    top = PolySymbol._raw(p.dim, {a: f for a, f in p.items() if sum(a) > 0})
    if top.xi_degree() <= i + 1 and not result:
        raise AssertionError("forward inclusion S_(i+1) + A -> {P, A} in S^i violated")
    return result


def nested_bracket(ops: Sequence[DiffOp]) -> DiffOp:
    """[D1, [D2, ..., [D_{k-1}, D_k]]]."""
    out = ops[-1]
    for d in reversed(ops[:-1]):
        out = op_bracket(d, out)
    return out


def nested_poisson(symbols: Sequence[PolySymbol]) -> PolySymbol:
    out = symbols[-1]
    for s in reversed(symbols[:-1]):
        out = poisson_bracket(s, out)
    return out


__all__ = [
    "CompatReport",
    "HamiltonianField",
    "NilpotencyReport",
    "PolySymbol",
    "ZeroOperatorError",
    "ad_nilpotency_probe",
    "ad_power",
    "bracket_filtration_probe",
    "full_symbol",
    "hamiltonian_apply",
    "monomials_up_to",
    "nested_bracket",
    "nested_poisson",
    "poisson_bracket",
    "principal_symbol",
    "symbol_bracket_filtration_probe",
    "symbol_compat_check",
    "symbol_to_op",
]
