"""Differential operators with polynomial coefficients on R^n.

A :class:`DiffOp` is stored in normal-ordered form ``sum_alpha f_alpha d^alpha``
(coefficients to the left of derivatives).  Composition uses the closed
Leibniz expansion

    (f d^alpha) o (g d^beta) = sum_{gamma <= alpha} C(alpha, gamma) f (d^gamma g) d^(alpha - gamma + beta)

so every result is again normal ordered and equality is structural.
"""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from math import gcd
from operator import add, sub
from typing import Mapping, Sequence

from .ratpoly import (
    DimensionError,
    RationalPoly,
    as_rational,
    format_terms,
    grlex_key,
    index_leq,
    monomials_up_to,
    multi_binomial,
    poly_add,
    poly_compose,
    poly_derivative,
    poly_mul,
    poly_partial,
    sub_indices,
    unit_index,
    x_names,
    zero_index,
)


@total_ordering
class _NegInfinity:
    """Order of the zero operator: below every integer, absorbing under +/-."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("-inf-order")

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        return self

    def __repr__(self):
        return "NEG_INF"


NEG_INF = _NegInfinity()


class DiffOp:
    """Element of the Weyl algebra: a finite sum of f_alpha(x) d^alpha."""

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[tuple, RationalPoly] | None = None):
        self.dim = dim
        clean = {}
        for alpha, f in (terms or {}).items():
            alpha = tuple(alpha)
            if len(alpha) != dim:
                raise DimensionError(f"multi-index {alpha} has length != {dim}")
            if not isinstance(f, RationalPoly):
                f = RationalPoly.constant(dim, f)
            if f.dim != dim:
                raise DimensionError("coefficient dimension mismatch")
            if alpha in clean:
                f = clean[alpha] + f
            if f:
                clean[alpha] = f
            else:
                clean.pop(alpha, None)
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
    def _from_flat(cls, dim, flat: Mapping):
        # flat: (alpha, xexp) -> Fraction
        grouped: dict = {}
        for (alpha, xexp), c in flat.items():
            if c:
                grouped.setdefault(alpha, {})[xexp] = c
        return cls._raw(dim, {a: RationalPoly._raw(dim, t) for a, t in grouped.items()})

    # constructors

    @classmethod
    def zero(cls, dim: int) -> "DiffOp":
        return cls._raw(dim, {})

    @classmethod
    def identity(cls, dim: int) -> "DiffOp":
        return cls.from_poly(RationalPoly.constant(dim, 1))

    @classmethod
    def constant(cls, dim: int, c) -> "DiffOp":
        return cls.from_poly(RationalPoly.constant(dim, c))

    @classmethod
    def from_poly(cls, f: RationalPoly) -> "DiffOp":
        """Multiplication operator by f."""
        return cls._raw(f.dim, {zero_index(f.dim): f} if f else {})

    @classmethod
    def partial(cls, dim: int, i: int) -> "DiffOp":
        return cls._raw(dim, {unit_index(dim, i): RationalPoly.constant(dim, 1)})

    @classmethod
    def monomial(cls, f: RationalPoly, alpha: tuple) -> "DiffOp":
        """The single-term operator f d^alpha."""
        return cls(f.dim, {tuple(alpha): f})

    @classmethod
    def x(cls, dim: int, i: int) -> "DiffOp":
        return cls.from_poly(RationalPoly.variable(dim, i))

    # views

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, alpha) -> RationalPoly:
        return self._terms.get(tuple(alpha), RationalPoly.zero(self.dim))

    def is_zero(self) -> bool:
        return not self._terms

    def order(self):
        """Maximal |alpha|; ``NEG_INF`` for the zero operator."""
        if not self._terms:
            return NEG_INF
        return max(sum(a) for a in self._terms)

    def is_function(self) -> bool:
        return all(not any(a) for a in self._terms)

    def as_poly(self) -> RationalPoly:
        if not self.is_function():
            raise ValueError("operator is not a multiplication operator")
        return self.coeff(zero_index(self.dim))

    def coefficient_degree(self) -> int:
        return max((f.degree() for f in self._terms.values()), default=-1)

    def homogeneous_part(self, k: int) -> "DiffOp":
        return DiffOp._raw(self.dim, {a: f for a, f in self._terms.items() if sum(a) == k})

    def truncate(self, k: int) -> "DiffOp":
        """Terms of order <= k."""
        return DiffOp._raw(self.dim, {a: f for a, f in self._terms.items() if sum(a) <= k})

    # arithmetic

    def _check(self, other):
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _coerce(self, other):
        if isinstance(other, DiffOp):
            self._check(other)
            return other
        if isinstance(other, RationalPoly):
            self._check(other)
            return DiffOp.from_poly(other)
        if isinstance(other, (int, Fraction)):
            return DiffOp.constant(self.dim, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return op_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return DiffOp._raw(self.dim, {a: -f for a, f in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return op_add(self, -other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return op_add(other, -self)

    def __mul__(self, other):
        """Composition; scalars scale."""
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return op_compose(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return op_compose(other, self)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        out = DiffOp.identity(self.dim)
        for _ in range(k):
            out = op_compose(out, self)
        return out

    def scale(self, c) -> "DiffOp":
        c = as_rational(c)
        if not c:
            return DiffOp.zero(self.dim)
        return DiffOp._raw(self.dim, {a: f.scale(c) for a, f in self._terms.items()})

    def __call__(self, f: RationalPoly) -> RationalPoly:
        return op_apply(self, f)

    def __eq__(self, other):
        if isinstance(other, DiffOp):
            return self.dim == other.dim and self._terms == other._terms
        if isinstance(other, (int, Fraction, RationalPoly)):
            other = self._coerce(other)
            return self == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"DiffOp({self.dim}, {format_op(self)!r})"

    def __str__(self):
        return format_op(self)


class VectorField:
    """X = sum_i X^i d_i with polynomial components."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[RationalPoly]):
        components = tuple(components)
        n = len(components)
        for c in components:
            if c.dim != n:
                raise DimensionError("a vector field on R^n needs n components of dimension n")
        self.components = components

    @property
    def dim(self) -> int:
        return len(self.components)

    @classmethod
    def from_op(cls, d: DiffOp) -> "VectorField":
        if d.order() > 1 or not d.coeff(zero_index(d.dim)).is_zero():
            raise ValueError("operator is not a vector field (order <= 1, vanishing on constants)")
        return cls([d.coeff(unit_index(d.dim, i)) for i in range(d.dim)])

    def to_op(self) -> DiffOp:
        n = self.dim
        return DiffOp(n, {unit_index(n, i): c for i, c in enumerate(self.components)})

    def __call__(self, f: RationalPoly) -> RationalPoly:
        out = RationalPoly.zero(self.dim)
        for i, c in enumerate(self.components):
            if c:
                out = out + c * poly_partial(f, i)
        return out

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return f"VectorField({format_op(self.to_op())!r})"


def _as_op(d) -> DiffOp:
    return d.to_op() if isinstance(d, VectorField) else d


def op_add(d1: DiffOp, d2: DiffOp) -> DiffOp:
    d1._check(d2)
    out = dict(d1._terms)
    for a, f in d2._terms.items():
        if a in out:
            s = poly_add(out[a], f)
            if s:
                out[a] = s
            else:
                del out[a]
        else:
            out[a] = f
    return DiffOp._raw(d1.dim, out)


def _int_coeffs(d: DiffOp):
    """Coefficients scaled to integers by one common denominator for the whole operator."""
    den = 1
    for f in d._terms.values():
        for c in f._terms.values():
            q = c.denominator
            if q != 1:
                den = den * q // gcd(den, q)
    return {a: {e: c.numerator * (den // c.denominator) for e, c in f._terms.items()} for a, f in d._terms.items()}, den


def _int_derivative(terms: dict, gamma) -> dict:
    if not any(gamma):
        return terms
    out = {}
    for e, c in terms.items():
        factor = 1
        for a, b in zip(e, gamma):
            if b > a:
                factor = 0
                break
            for k in range(a - b + 1, a + 1):
                factor *= k
        if factor:
            out[tuple(map(sub, e, gamma))] = c * factor
    return out


def op_compose(d1: DiffOp, d2: DiffOp) -> DiffOp:
    """Associative product d1 o d2 via the Leibniz expansion."""
    d1 = _as_op(d1)
    d2 = _as_op(d2)
    d1._check(d2)
    # integer arithmetic throughout, one division per output coefficient
    c1s, den1 = _int_coeffs(d1)
    c2s, den2 = _int_coeffs(d2)
    flat: dict = {}
    get = flat.get
    deriv_cache: dict = {}
    for alpha, f in c1s.items():
        subs = sub_indices(alpha)
        for beta, g in c2s.items():
            for gamma in subs:
                key = (beta, gamma)
                dg = deriv_cache.get(key)
                if dg is None:
                    dg = _int_derivative(g, gamma)
                    deriv_cache[key] = dg
                if not dg:
                    continue
                b = multi_binomial(alpha, gamma)
                out_alpha = tuple(map(add, map(sub, alpha, gamma), beta))
                for e1, v1 in f.items():
                    bv = b * v1
                    for e2, v2 in dg.items():
                        k = (out_alpha, tuple(map(add, e1, e2)))
                        flat[k] = get(k, 0) + bv * v2
    den = den1 * den2
    return DiffOp._from_flat(d1.dim, {k: Fraction(v, den) for k, v in flat.items() if v})


def op_bracket(d1: DiffOp, d2: DiffOp) -> DiffOp:
    """Commutator d1 o d2 - d2 o d1."""
    d1 = _as_op(d1)
    d2 = _as_op(d2)
    return op_add(op_compose(d1, d2), -op_compose(d2, d1))


def op_apply(d: DiffOp, f: RationalPoly) -> RationalPoly:
    """Action on a polynomial: sum_alpha f_alpha * d^alpha f."""
    d = _as_op(d)
    if d.dim != f.dim:
        raise DimensionError("dimension mismatch")
    out = RationalPoly.zero(d.dim)
    for alpha, c in d._terms.items():
        df = poly_derivative(f, alpha)
        if df:
            out = poly_add(out, poly_mul(c, df))
    return out


def op_split(d: DiffOp) -> tuple[RationalPoly, DiffOp]:
    """Split D = D(1) + D_c with D_c(1) == 0."""
    d = _as_op(d)
    z = zero_index(d.dim)
    f = d.coeff(z)
    dc = DiffOp._raw(d.dim, {a: c for a, c in d._terms.items() if a != z})
    return f, dc


def pi0(d: DiffOp) -> RationalPoly:
    return op_split(d)[0]


def pic(d: DiffOp) -> DiffOp:
    return op_split(d)[1]


def divergence(x) -> RationalPoly:
    """Flat divergence sum_i d_i X^i."""
    if isinstance(x, DiffOp):
        x = VectorField.from_op(x)
    out = RationalPoly.zero(x.dim)
    for i, c in enumerate(x.components):
        out = out + poly_partial(c, i)
    return out


def lie_derivative(x, d: DiffOp) -> DiffOp:
    """L_X D = [X, D]."""
    if isinstance(x, VectorField):
        x = x.to_op()
    return op_bracket(x, d)


def formal_adjoint(d: DiffOp) -> DiffOp:
    """Adjoint for the flat volume: (f d^alpha)* = (-1)^|alpha| d^alpha o f."""
    d = _as_op(d)
    n = d.dim
    out = DiffOp.zero(n)
    for alpha, f in d._terms.items():
        term = op_compose(DiffOp.monomial(RationalPoly.constant(n, 1), alpha), DiffOp.from_poly(f))
        if sum(alpha) % 2:
            term = -term
        out = op_add(out, term)
    return out


def ad_power(d: DiffOp, target: DiffOp, k: int) -> DiffOp:
    """k-fold nested bracket [d, [d, ..., [d, target]]]."""
    if k < 0:
        raise ValueError("k must be non-negative")
    d = _as_op(d)
    out = _as_op(target)
    d._check(out)
    for _ in range(k):
        if not out:
            break
        out = op_bracket(d, out)
    return out


# -- symbol calculus -------------------------------------------------------
#
# A constant-coefficient polynomial in blocks of n variables
# (xi | eta_1 | eta_2 | ...) stands for an operator: xi^a eta_1^b1 eta_2^b2
# realizes as (d^b1 h_1)(d^b2 h_2) d^a, i.e. each eta-block differentiates its
# own coefficient and xi differentiates the argument.


def realize_symbol(symbol: RationalPoly, coefficients: Sequence[RationalPoly]) -> DiffOp:
    n = coefficients[0].dim
    blocks = 1 + len(coefficients)
    if symbol.dim != blocks * n:
        raise DimensionError("symbol has wrong number of auxiliary variables")
    flat: dict = {}
    cache: dict = {}
    for exp, c in symbol.items():
        alpha = exp[:n]
        prod = RationalPoly.constant(n, c)
        for k, h in enumerate(coefficients):
            beta = exp[(k + 1) * n:(k + 2) * n]
            key = (k, beta)
            if key not in cache:
                cache[key] = poly_derivative(h, beta)
            prod = poly_mul(prod, cache[key])
            if not prod:
                break
        for e, v in prod.items():
            flat[(alpha, e)] = flat.get((alpha, e), 0) + v
    return DiffOp._from_flat(n, flat)


def _block_vars(n: int, blocks: int, b: int) -> list[RationalPoly]:
    return [RationalPoly.variable(blocks * n, b * n + i) for i in range(n)]


def _block_monomial(n: int, blocks: int, b: int, alpha) -> RationalPoly:
    exp = [0] * (blocks * n)
    exp[b * n:(b + 1) * n] = alpha
    return RationalPoly.monomial(tuple(exp))


def shift_symbol(p: RationalPoly, n: int, blocks: int, into: int, by: int) -> RationalPoly:
    """tau: substitute xi_i -> xi_i + (block ``by``)_i in block ``into``."""
    xs = [RationalPoly.variable(blocks * n, j) for j in range(blocks * n)]
    src = _block_vars(n, blocks, by)
    for i in range(n):
        xs[into * n + i] = xs[into * n + i] + src[i]
    return poly_compose(p, xs)


def lie_derivative_symbolic(x, d: DiffOp) -> DiffOp:
    """L_X D from the normal-ordering formula <X,eta> D(xi) - <X,xi> tau_zeta D(xi).

    eta differentiates the coefficients of D, zeta those of X and
    tau_zeta D(xi) = D(xi + zeta) - D(xi).  Independent of :func:`op_bracket`.
    """
    if isinstance(x, DiffOp):
        x = VectorField.from_op(x)
    d = _as_op(d)
    n = d.dim
    if x.dim != n:
        raise DimensionError("dimension mismatch")
    blocks = 3  # xi | eta (on D) | zeta (on X)
    out = DiffOp.zero(n)
    for i, xi_coeff in enumerate(x.components):
        if not xi_coeff:
            continue
        eta_i = RationalPoly.variable(3 * n, n + i)
        xi_i = RationalPoly.variable(3 * n, i)
        for alpha, f in d._terms.items():
            d_xi = _block_monomial(n, blocks, 0, alpha)
            tau = shift_symbol(d_xi, n, blocks, into=0, by=2) - d_xi
            symbol = eta_i * d_xi - xi_i * tau
            out = op_add(out, realize_symbol(symbol, [f, xi_coeff]))
    return out


def spanning_monomials(n: int, degree: int) -> list[RationalPoly]:
    """Monomials of degree <= ``degree``: the test family for 'for all f in A'."""
    return [RationalPoly.monomial(e) for e in monomials_up_to(n, degree)]


def d_names(n: int) -> list[str]:
    return [f"d{i + 1}" for i in range(n)]


def format_op(d: DiffOp) -> str:
    """Normal-ordered text, parseable by the operator grammar."""
    n = d.dim
    if not d._terms:
        return "0"
    names = x_names(n)
    dn = d_names(n)
    out = []
    for alpha in sorted(d._terms, key=grlex_key, reverse=True):
        f = d._terms[alpha]
        dpart = _format_dmono(alpha, dn)
        if not dpart:
            text = format_terms(f.items(), names)
            out.append(text)
            continue
        if len(f._terms) == 1:
            (exp, c), = f.items()
            xmono = _format_dmono(exp, names)
            body = "*".join(s for s in (xmono, dpart) if s)
            mag = abs(c)
            if mag != 1:
                body = f"{mag}*{body}" if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}*{body}"
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(f"({format_terms(f.items(), names)})*{dpart}")
    text = out[0]
    for piece in out[1:]:
        if piece.startswith("-"):
            text += " - " + piece[1:]
        else:
            text += " + " + piece
    return text


def _format_dmono(alpha, names) -> str:
    parts = []
    for name, k in zip(names, alpha):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def order_leq(d: DiffOp, k) -> bool:
    return d.order() <= k


def filtration_drop_holds(d1: DiffOp, d2: DiffOp) -> bool:
    """order([d1, d2]) <= order(d1) + order(d2) - 1."""
    return op_bracket(d1, d2).order() <= d1.order() + d2.order() - 1


__all__ = [
    "NEG_INF",
    "DiffOp",
    "VectorField",
    "ad_power",
    "divergence",
    "filtration_drop_holds",
    "format_op",
    "formal_adjoint",
    "index_leq",
    "lie_derivative",
    "lie_derivative_symbolic",
    "op_add",
    "op_apply",
    "op_bracket",
    "op_compose",
    "op_split",
    "pi0",
    "pic",
    "realize_symbol",
    "shift_symbol",
    "spanning_monomials",
]
