"""Exact multivariate polynomials over the rationals.

A :class:`RationalPoly` is an immutable map from exponent tuples to nonzero
:class:`fractions.Fraction` coefficients.  Every operation returns a value in
canonical form (no stored zeros), so structural equality is mathematical
equality.

Axis indices in the Python API are 0-based; the text syntax uses ``x1..xN``.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, gcd
from operator import add
from typing import Iterable, Mapping, Sequence

Rational = Fraction
MultiIndex = tuple  # tuple[int, ...]


class DimensionError(ValueError):
    """Operands live in ambient spaces of different dimension."""


class NotClosedError(ValueError):
    """A 1-form fails the symmetry test d_i w_j == d_j w_i."""


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floating point coefficients are not supported")
    return Fraction(value)


def zero_index(n: int) -> MultiIndex:
    return (0,) * n


def unit_index(n: int, i: int) -> MultiIndex:
    e = [0] * n
    e[i] = 1
    return tuple(e)


def add_index(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def sub_index(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x - y for x, y in zip(a, b))


def index_leq(a: MultiIndex, b: MultiIndex) -> bool:
    return all(x <= y for x, y in zip(a, b))


def sub_indices(alpha: MultiIndex):
    """All multi-indices beta <= alpha (componentwise)."""
    out = [()]
    for a in alpha:
        out = [prefix + (k,) for prefix in out for k in range(a + 1)]
    return out


def multi_binomial(alpha: MultiIndex, beta: MultiIndex) -> int:
    r = 1
    for a, b in zip(alpha, beta):
        r *= comb(a, b)
    return r


def multi_factorial(alpha: MultiIndex) -> int:
    r = 1
    for a in alpha:
        for k in range(2, a + 1):
            r *= k
    return r


def monomials_up_to(n: int, degree: int) -> list[MultiIndex]:
    """Exponent tuples of total degree <= ``degree`` in graded lex order."""
    out = []
    for d in range(degree + 1):
        out.extend(monomials_of_degree(n, d))
    return out


def monomials_of_degree(n: int, d: int) -> list[MultiIndex]:
    if n == 0:
        return [()] if d == 0 else []
    if n == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return out


def grlex_key(alpha: MultiIndex):
    return (sum(alpha), alpha)


class RationalPoly:
    """Element of Q[x1, ..., xn] in canonical sparse form."""

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[MultiIndex, object] | None = None):
        if dim < 0:
            raise ValueError("dimension must be non-negative")
        self.dim = dim
        clean = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != dim:
                    raise DimensionError(f"exponent {exp} has length != {dim}")
                if any(e < 0 for e in exp):
                    raise ValueError(f"negative exponent in {exp}")
                c = as_rational(c)
                if c:
                    clean[exp] = clean.get(exp, 0) + c
            clean = {e: c for e, c in clean.items() if c}
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, dim: int, terms: dict) -> "RationalPoly":
        # trusted constructor: terms already canonical
        obj = object.__new__(cls)
        obj.dim = dim
        obj._terms = terms
        obj._hash = None
        return obj

    # constructors

    @classmethod
    def zero(cls, dim: int) -> "RationalPoly":
        return cls._raw(dim, {})

    @classmethod
    def constant(cls, dim: int, c=1) -> "RationalPoly":
        c = as_rational(c)
        return cls._raw(dim, {zero_index(dim): c} if c else {})

    @classmethod
    def variable(cls, dim: int, i: int) -> "RationalPoly":
        if not 0 <= i < dim:
            raise IndexError(f"axis {i} out of range for dimension {dim}")
        return cls._raw(dim, {unit_index(dim, i): Fraction(1)})

    @classmethod
    def monomial(cls, exp: MultiIndex, c=1) -> "RationalPoly":
        return cls(len(exp), {tuple(exp): c})

    # views

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, exp: MultiIndex) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get(zero_index(self.dim), Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def evaluate(self, point: Sequence) -> Fraction:
        point = [as_rational(v) for v in point]
        if len(point) != self.dim:
            raise DimensionError("point has wrong length")
        total = Fraction(0)
        for exp, c in self._terms.items():
            v = c
            for p, e in zip(point, exp):
                if e:
                    v *= p**e
            total += v
        return total

    # arithmetic

    def _check(self, other: "RationalPoly"):
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _coerce(self, other):
        if isinstance(other, RationalPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return RationalPoly.constant(self.dim, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly._raw(self.dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_add(self, -other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_add(other, -self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = RationalPoly.constant(self.dim, 1)
        base = self
        while k:
            if k & 1:
                result = poly_mul(result, base)
            k >>= 1
            if k:
                base = poly_mul(base, base)
        return result

    def scale(self, c) -> "RationalPoly":
        c = as_rational(c)
        if not c:
            return RationalPoly.zero(self.dim)
        return RationalPoly._raw(self.dim, {e: v * c for e, v in self._terms.items()})

    def partial(self, i: int) -> "RationalPoly":
        return poly_partial(self, i)

    def derivative(self, beta: MultiIndex) -> "RationalPoly":
        """Iterated partial derivative d^beta."""
        return poly_derivative(self, beta)

    def __call__(self, *maps: "RationalPoly") -> "RationalPoly":
        return poly_compose(self, maps)

    def __eq__(self, other):
        if isinstance(other, RationalPoly):
            return self.dim == other.dim and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == RationalPoly.constant(self.dim, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"RationalPoly({self.dim}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


def poly_add(p: RationalPoly, q: RationalPoly) -> RationalPoly:
    p._check(q)
    if len(p._terms) < len(q._terms):
        p, q = q, p
    out = dict(p._terms)
    for e, c in q._terms.items():
        v = out.get(e)
        if v is None:
            out[e] = c
        else:
            v += c
            if v:
                out[e] = v
            else:
                del out[e]
    return RationalPoly._raw(p.dim, out)


def _integerized(terms: dict):
    """(integer terms, common denominator) with terms[e] == ints[e] / den."""
    den = 1
    for c in terms.values():
        d = c.denominator
        if d != 1:
            den = den * d // gcd(den, d)
    if den == 1:
        return {e: c.numerator for e, c in terms.items()}, 1
    return {e: c.numerator * (den // c.denominator) for e, c in terms.items()}, den


def poly_mul(p: RationalPoly, q: RationalPoly) -> RationalPoly:
    p._check(q)
    if not p._terms or not q._terms:
        return RationalPoly._raw(p.dim, {})
    # multiply over the integers, divide once per output term
    ip, dp = _integerized(p._terms)
    iq, dq = _integerized(q._terms)
    out: dict = {}
    get = out.get
    for e1, c1 in ip.items():
        for e2, c2 in iq.items():
            e = tuple(map(add, e1, e2))
            out[e] = get(e, 0) + c1 * c2
    den = dp * dq
    if den == 1:
        return RationalPoly._raw(p.dim, {e: Fraction(c) for e, c in out.items() if c})
    return RationalPoly._raw(p.dim, {e: Fraction(c, den) for e, c in out.items() if c})


def poly_partial(p: RationalPoly, i: int) -> RationalPoly:
    if not 0 <= i < p.dim:
        raise IndexError(f"axis {i} out of range for dimension {p.dim}")
    out = {}
    for e, c in p._terms.items():
        k = e[i]
        if k:
            ne = e[:i] + (k - 1,) + e[i + 1:]
            out[ne] = c * k
    return RationalPoly._raw(p.dim, out)


def poly_derivative(p: RationalPoly, beta: MultiIndex) -> RationalPoly:
    if len(beta) != p.dim:
        raise DimensionError("multi-index has wrong length")
    if not any(beta):
        return p
    out = {}
    for e, c in p._terms.items():
        if not index_leq(beta, e):
            continue
        factor = 1
        for a, b in zip(e, beta):
            for k in range(a - b + 1, a + 1):
                factor *= k
        out[sub_index(e, beta)] = c * factor
    return RationalPoly._raw(p.dim, out)


def poly_compose(p: RationalPoly, maps: Sequence[RationalPoly]) -> RationalPoly:
    """Substitute ``maps[i]`` for the i-th variable of ``p``.

    The substituted polynomials may live in a different dimension than ``p``;
    the result has their dimension.
    """
    maps = list(maps)
    if len(maps) != p.dim:
        raise DimensionError(f"need {p.dim} substitutions, got {len(maps)}")
    if not maps:
        raise DimensionError("cannot substitute into a 0-dimensional polynomial")
    m = maps[0].dim
    for q in maps:
        if q.dim != m:
            raise DimensionError("substituted polynomials disagree on dimension")
    powers: list[dict] = [{0: RationalPoly.constant(m, 1)} for _ in maps]

    def power(i, k):
        cache = powers[i]
        if k not in cache:
            cache[k] = poly_mul(power(i, k - 1), maps[i])
        return cache[k]

    out = RationalPoly.zero(m)
    for e, c in p._terms.items():
        term = RationalPoly.constant(m, c)
        for i, k in enumerate(e):
            if k:
                term = poly_mul(term, power(i, k))
        out = poly_add(out, term)
    return out


def is_closed(components: Sequence[RationalPoly]) -> bool:
    n = len(components)
    for i in range(n):
        for j in range(i + 1, n):
            if poly_partial(components[j], i) != poly_partial(components[i], j):
                return False
    return True


def poly_potential(components: Sequence[RationalPoly]) -> RationalPoly:
    """Primitive f with d_i f == components[i] and f(0) == 0.

    Uses the radial line integral f(x) = int_0^1 sum_i w_i(t x) x^i dt, which is
    exact on monomials: c x^m x^i integrates to c / (|m| + 1) x^(m + e_i).
    """
    components = list(components)
    n = len(components)
    for w in components:
        if w.dim != n:
            raise DimensionError("a 1-form on R^n needs n components of dimension n")
    if not is_closed(components):
        raise NotClosedError("1-form is not closed")
    out: dict = {}
    for i, w in enumerate(components):
        for e, c in w._terms.items():
            ne = e[:i] + (e[i] + 1,) + e[i + 1:]
            out[ne] = out.get(ne, 0) + c / (sum(e) + 1)
    return RationalPoly(n, out)


def gradient(p: RationalPoly) -> list[RationalPoly]:
    return [poly_partial(p, i) for i in range(p.dim)]


def identity_map(n: int) -> list[RationalPoly]:
    return [RationalPoly.variable(n, i) for i in range(n)]


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(exp: MultiIndex, names: Sequence[str]) -> str:
    parts = []
    for name, k in zip(names, exp):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_terms(items: Iterable, names: Sequence[str]) -> str:
    """Render (exponent, coefficient) pairs, highest graded-lex term first."""
    items = sorted(items, key=lambda t: grlex_key(t[0]), reverse=True)
    if not items:
        return "0"
    out = []
    for k, (exp, c) in enumerate(items):
        mono = format_monomial(exp, names)
        mag = abs(c)
        if not mono:
            body = _format_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coeff(mag)}*{mono}"
        if k == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def x_names(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)]


def format_poly(p: RationalPoly) -> str:
    return format_terms(p.items(), x_names(p.dim))
