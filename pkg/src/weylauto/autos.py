"""Automorphism families of D, D^1 and S on R^n, their recovery, and verification.

Families implemented:

* ``omega_bar`` / ``exp_omega_bar``: D -> [D, f] for a closed 1-form w = df and its
  (finite) exponential.
* ``conjugation_c``: minus the formal adjoint; C(f) = -f, C(X) = X + div X.
* ``u_kappa``: kappa^(1-i) on S_i.
* ``pushforward``: conjugation by f -> f o phi^-1 for a polynomial diffeomorphism.
* ``d1_automorphism``, ``s_automorphism``, ``d_automorphism``: the three
  classification families, each with an exact parameter recovery.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from .classical import PolySymbol, poisson_bracket, principal_symbol
from .linalg import SparseEliminator
from .ratpoly import (
    DimensionError,
    RationalPoly,
    as_rational,
    identity_map,
    is_closed,
    monomials_up_to,
    multi_binomial,
    poly_compose,
    poly_derivative,
    poly_partial,
    poly_potential,
    sub_index,
    sub_indices,
    unit_index,
    zero_index,
)
from .weyl import (
    NEG_INF,
    DiffOp,
    VectorField,
    divergence,
    formal_adjoint,
    op_add,
    op_bracket,
    op_compose,
    op_split,
    realize_symbol,
    shift_symbol,
)


class ZeroKappaError(ValueError):
    pass


class OrderTooHighError(ValueError):
    pass


class NotInFamilyError(ValueError):
    """An oracle map is not a member of the requested automorphism family."""


class NotInvertibleError(ValueError):
    pass


# -- parameters -------------------------------------------------------------


class OneForm:
    """Closed polynomial 1-form w = sum_i w_i dx^i."""

    __slots__ = ("components", "_potential")

    def __init__(self, components: Sequence[RationalPoly]):
        components = tuple(components)
        n = len(components)
        for c in components:
            if c.dim != n:
                raise DimensionError("a 1-form on R^n needs n components of dimension n")
        if not is_closed(components):
            from .ratpoly import NotClosedError

            raise NotClosedError("1-form is not closed")
        self.components = components
        self._potential = None

    @classmethod
    def zero(cls, n: int) -> "OneForm":
        return cls([RationalPoly.zero(n)] * n)

    @classmethod
    def exact(cls, f: RationalPoly) -> "OneForm":
        return cls([poly_partial(f, i) for i in range(f.dim)])

    @property
    def dim(self) -> int:
        return len(self.components)

    def potential(self) -> RationalPoly:
        if self._potential is None:
            self._potential = poly_potential(self.components)
        return self._potential

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __call__(self, x) -> RationalPoly:
        """Pairing w(X) = sum_i w_i X^i."""
        if isinstance(x, DiffOp):
            x = VectorField.from_op(x)
        out = RationalPoly.zero(self.dim)
        for w, c in zip(self.components, x.components):
            if w and c:
                out = out + w * c
        return out

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm([a + b for a, b in zip(self.components, other.components)])

    def scale(self, c) -> "OneForm":
        return OneForm([w.scale(c) for w in self.components])

    def __eq__(self, other):
        return isinstance(other, OneForm) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return f"OneForm({[str(c) for c in self.components]})"


class PolyDiffeo:
    """A pair of mutually inverse polynomial maps R^n -> R^n, checked exactly."""

    __slots__ = ("forward", "inverse", "_jac_cache")

    def __init__(self, forward: Sequence[RationalPoly], inverse: Sequence[RationalPoly], check: bool = True):
        forward = tuple(forward)
        inverse = tuple(inverse)
        n = len(forward)
        if len(inverse) != n or any(p.dim != n for p in forward + inverse):
            raise DimensionError("forward and inverse must be n polynomials in n variables")
        if check:
            ident = tuple(identity_map(n))
            if tuple(poly_compose(p, inverse) for p in forward) != ident:
                raise NotInvertibleError("forward o inverse != identity")
            if tuple(poly_compose(p, forward) for p in inverse) != ident:
                raise NotInvertibleError("inverse o forward != identity")
        self.forward = forward
        self.inverse = inverse
        self._jac_cache = None

    @property
    def dim(self) -> int:
        return len(self.forward)

    @classmethod
    def identity(cls, n: int) -> "PolyDiffeo":
        ident = identity_map(n)
        return cls(ident, ident, check=False)

    @classmethod
    def affine(cls, matrix: Sequence[Sequence], shift: Sequence | None = None) -> "PolyDiffeo":
        """x -> M x + c with the exact inverse y -> M^-1 (y - c)."""
        from .linalg import invert_matrix

        n = len(matrix)
        shift = [as_rational(v) for v in (shift or [0] * n)]
        try:
            minv = invert_matrix(matrix)
        except ZeroDivisionError:
            raise NotInvertibleError("affine matrix is singular") from None
        xs = identity_map(n)
        fwd = []
        inv = []
        for i in range(n):
            fwd.append(sum((x.scale(as_rational(matrix[i][j])) for j, x in enumerate(xs)), RationalPoly.constant(n, shift[i])))
            inv.append(
                sum(
                    ((xs[j] - shift[j]).scale(minv[i][j]) for j in range(n)),
                    RationalPoly.zero(n),
                )
            )
        return cls(fwd, inv)

    @classmethod
    def translation(cls, shift: Sequence) -> "PolyDiffeo":
        n = len(shift)
        return cls.affine([[int(i == j) for j in range(n)] for i in range(n)], shift)

    @classmethod
    def triangular(cls, additions: Sequence[RationalPoly]) -> "PolyDiffeo":
        """x_i -> x_i + p_i(x_1..x_{i-1}); inverse by back-substitution."""
        n = len(additions)
        xs = identity_map(n)
        for i, p in enumerate(additions):
            if any(e[j] for e, _ in p.items() for j in range(i, n)):
                raise ValueError("p_i may only depend on x_1..x_{i-1}")
        fwd = [xs[i] + additions[i] for i in range(n)]
        inv: list = []
        for i in range(n):
            sub = inv + xs[i:]
            inv.append(xs[i] - poly_compose(additions[i], sub))
        return cls(fwd, inv)

    @classmethod
    def from_inverse(cls, inverse: Sequence[RationalPoly], max_degree: int | None = None) -> "PolyDiffeo":
        return cls(invert_polynomial_map(inverse, max_degree), inverse)

    def inverted(self) -> "PolyDiffeo":
        return PolyDiffeo(self.inverse, self.forward, check=False)

    def then(self, other: "PolyDiffeo") -> "PolyDiffeo":
        """other o self."""
        fwd = [poly_compose(p, self.forward) for p in other.forward]
        inv = [poly_compose(p, other.inverse) for p in self.inverse]
        return PolyDiffeo(fwd, inv, check=False)

    def is_identity(self) -> bool:
        return self.forward == tuple(identity_map(self.dim))

    def push_function(self, f: RationalPoly) -> RationalPoly:
        """f o phi^-1."""
        return poly_compose(f, self.inverse)

    def pull_function(self, f: RationalPoly) -> RationalPoly:
        """f o phi."""
        return poly_compose(f, self.forward)

    def jacobian_at_inverse(self) -> list[list[RationalPoly]]:
        """J[i][j] = (d_i phi^j) o phi^-1."""
        if self._jac_cache is None:
            n = self.dim
            self._jac_cache = [
                [poly_compose(poly_partial(self.forward[j], i), self.inverse) for j in range(n)] for i in range(n)
            ]
        return self._jac_cache

    def __eq__(self, other):
        return isinstance(other, PolyDiffeo) and self.forward == other.forward and self.inverse == other.inverse

    def __hash__(self):
        return hash((self.forward, self.inverse))

    def __repr__(self):
        return f"PolyDiffeo(forward={[str(p) for p in self.forward]}, inverse={[str(p) for p in self.inverse]})"


def invert_polynomial_map(psi: Sequence[RationalPoly], max_degree: int | None = None) -> list[RationalPoly]:
    """Polynomial inverse of ``psi`` by solving phi o psi = id for phi's coefficients.

    The unknown coefficients of phi enter linearly, so this is one exact linear
    solve.  The default degree bound is deg(psi)^(n-1), which covers every
    polynomial automorphism.
    """
    psi = list(psi)
    n = len(psi)
    deg = max(max(p.degree() for p in psi), 1)
    if max_degree is None:
        max_degree = deg ** max(n - 1, 1)
    basis = monomials_up_to(n, max_degree)
    cache = {zero_index(n): RationalPoly.constant(n, 1)}

    def power(c):
        if c not in cache:
            i = next(k for k, v in enumerate(c) if v)
            prev = c[:i] + (c[i] - 1,) + c[i + 1:]
            cache[c] = power(prev) * psi[i]
        return cache[c]

    rows: dict = {}
    for c in basis:
        for e, v in power(c).items():
            rows.setdefault(e, {})[c] = v
    elim = SparseEliminator(n)
    for e, row in rows.items():
        rhs = [Fraction(int(e == unit_index(n, j))) for j in range(n)]
        elim.add(row, rhs, label=e)
    for j in range(n):
        # target monomials x^j that never occur in any psi^c
        e = unit_index(n, j)
        if e not in rows:
            raise NotInvertibleError("map has no polynomial inverse of the given degree")
    res = elim.result()
    out = []
    for j in range(n):
        w = [Fraction(int(k == j)) for k in range(n)]
        if not res.is_consistent(w):
            raise NotInvertibleError("map has no polynomial inverse of the given degree")
        sol = res.solve(w)
        out.append(RationalPoly(n, {c: v for c, v in sol.items() if v}))
    ident = identity_map(n)
    if [poly_compose(p, psi) for p in out] != ident or [poly_compose(p, out) for p in psi] != ident:
        raise NotInvertibleError("map is not a polynomial automorphism")
    return out


# -- the particular automorphisms ----------------------------------------------


def omega_bar(omega: OneForm, d: DiffOp) -> DiffOp:
    """D -> [D, f] where w = df."""
    if omega.dim != d.dim:
        raise DimensionError("dimension mismatch")
    if omega.is_zero():
        return DiffOp.zero(d.dim)
    return op_bracket(d, DiffOp.from_poly(omega.potential()))


def exp_omega_bar(omega: OneForm, d: DiffOp, terms: int | None = None) -> DiffOp:
    """sum_{j <= order(d)} omega_bar^j(d) / j!  (exact: omega_bar lowers the order)."""
    if omega.dim != d.dim:
        raise DimensionError("dimension mismatch")
    k = d.order()
    if k is NEG_INF or omega.is_zero():
        return d
    if terms is None:
        terms = k
    out = d
    cur = d
    for j in range(1, terms + 1):
        cur = omega_bar(omega, cur)
        if not cur:
            break
        out = op_add(out, cur.scale(Fraction(1, factorial(j))))
    return out


def twisted_operator(omega: OneForm, d: DiffOp) -> DiffOp:
    """e^(-f) o D o e^f for w = df, computed by replacing each d_i with d_i + w_i.

    Independent of the ad-series in :func:`exp_omega_bar`; the two agree.
    """
    n = d.dim
    if omega.dim != n:
        raise DimensionError("dimension mismatch")
    shifted = [DiffOp.partial(n, i) + DiffOp.from_poly(omega.components[i]) for i in range(n)]
    out = DiffOp.zero(n)
    for alpha, f in d.items():
        term = DiffOp.from_poly(f)
        for i, k in enumerate(alpha):
            for _ in range(k):
                term = op_compose(term, shifted[i])
        out = op_add(out, term)
    return out


def conjugation_c(d: DiffOp) -> DiffOp:
    """C = minus the formal adjoint for the flat volume."""
    return -formal_adjoint(d)


def conjugation_local(d: DiffOp) -> DiffOp:
    """C from the local shift rule C(eta; P_k)(xi) = (-1)^(k+1) P_k(xi + eta).

    eta differentiates the coefficient of each term.  Independent of the
    adjoint route in :func:`conjugation_c`.
    """
    n = d.dim
    out = DiffOp.zero(n)
    for alpha, h in d.items():
        exp = tuple(alpha) + (0,) * n
        pk = RationalPoly.monomial(exp)
        shifted = shift_symbol(pk, n, 2, into=0, by=1)
        if sum(alpha) % 2 == 0:
            shifted = -shifted
        out = op_add(out, realize_symbol(shifted, [h]))
    return out


def conjugation_closed_form(d: DiffOp) -> DiffOp:
    """C(f d^a) = (-1)^(|a|+1) sum_{b <= a} C(a, b) (d^b f) d^(a - b)."""
    n = d.dim
    terms: dict = {}
    for alpha, f in d.items():
        sign = -1 if sum(alpha) % 2 == 0 else 1
        for beta in sub_indices(alpha):
            g = poly_derivative(f, beta)
            if not g:
                continue
            g = g.scale(sign * multi_binomial(alpha, beta))
            gamma = sub_index(alpha, beta)
            terms[gamma] = terms[gamma] + g if gamma in terms else g
    return DiffOp(n, terms)


def u_kappa(kappa, p: PolySymbol) -> PolySymbol:
    """kappa^(1-i) on the graded piece S_i."""
    kappa = as_rational(kappa)
    if not kappa:
        raise ZeroKappaError("kappa must be nonzero")
    return PolySymbol(p.dim, {a: f.scale(kappa ** (1 - sum(a))) for a, f in p.items()})


class _PushCache:
    def __init__(self, phi: PolyDiffeo):
        self.phi = phi
        n = phi.dim
        jac = phi.jacobian_at_inverse()
        self.fields = [DiffOp(n, {unit_index(n, j): jac[i][j] for j in range(n)}) for i in range(n)]
        self.powers: dict = {zero_index(n): DiffOp.identity(n)}

    def partial_power(self, alpha) -> DiffOp:
        if alpha not in self.powers:
            i = next(k for k, v in enumerate(alpha) if v)
            prev = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:]
            self.powers[alpha] = op_compose(self.fields[i], self.partial_power(prev))
        return self.powers[alpha]


_push_caches: dict = {}


def _push_cache(phi: PolyDiffeo) -> _PushCache:
    key = id(phi)
    entry = _push_caches.get(key)
    if entry is None or entry.phi is not phi:
        if len(_push_caches) > 64:
            _push_caches.clear()
        entry = _PushCache(phi)
        _push_caches[key] = entry
    return entry


def pushforward(phi: PolyDiffeo, d: DiffOp) -> DiffOp:
    """phi_* D : g -> (D(g o phi)) o phi^-1."""
    if phi.dim != d.dim:
        raise DimensionError("dimension mismatch")
    if phi.is_identity():
        return d
    cache = _push_cache(phi)
    out = DiffOp.zero(d.dim)
    for alpha, f in d.items():
        coeff = DiffOp.from_poly(phi.push_function(f))
        out = op_add(out, op_compose(coeff, cache.partial_power(alpha)))
    return out


def phase_lift(phi: PolyDiffeo, p: PolySymbol) -> PolySymbol:
    """Action of phi on symbols: x -> phi^-1(x), xi_i -> sum_j ((d_i phi^j) o phi^-1) xi_j."""
    return _substitute_symbol(p, phi, OneForm.zero(phi.dim))


def _substitute_symbol(p: PolySymbol, phi: PolyDiffeo, omega: OneForm) -> PolySymbol:
    # P(phi^-1(x), J(x)^T (xi + w(x))) with J[i][j] = (d_i phi^j) o phi^-1
    n = p.dim
    m = 2 * n

    def lift(q: RationalPoly) -> RationalPoly:
        return RationalPoly(m, {e + (0,) * n: c for e, c in q.items()})

    xis = [RationalPoly.variable(m, n + j) for j in range(n)]
    shifted = [xis[j] + lift(omega.components[j]) for j in range(n)]
    jac = phi.jacobian_at_inverse()
    subs = [lift(q) for q in phi.inverse]
    for i in range(n):
        subs.append(sum((lift(jac[i][j]) * shifted[j] for j in range(n)), RationalPoly.zero(m)))
    return PolySymbol.unflatten(poly_compose(p.flatten(), subs))


# -- the three families ---------------------------------------------------


def d1_automorphism(kappa, lam, omega: OneForm, phi: PolyDiffeo, d: DiffOp) -> DiffOp:
    """X + f -> phi_*(X) + (kappa f + lam div X + w(X)) o phi^-1."""
    kappa = as_rational(kappa)
    lam = as_rational(lam)
    if not kappa:
        raise ZeroKappaError("kappa must be nonzero")
    if d.order() > 1:
        raise OrderTooHighError("D^1 automorphisms act on operators of order <= 1")
    if not (omega.dim == phi.dim == d.dim):
        raise DimensionError("dimension mismatch")
    f, xc = op_split(d)
    x = VectorField.from_op(xc)
    g = f.scale(kappa) + divergence(x).scale(lam) + omega(x)
    return op_add(pushforward(phi, xc), DiffOp.from_poly(phi.push_function(g)))


def s_automorphism(kappa, omega: OneForm, phi: PolyDiffeo, p: PolySymbol) -> PolySymbol:
    """P -> U_kappa(P) o (phase lift of phi) o (covector translation by w)."""
    if not (omega.dim == phi.dim == p.dim):
        raise DimensionError("dimension mismatch")
    return _substitute_symbol(u_kappa(kappa, p), phi, omega)


def d_automorphism(a: int, omega: OneForm, phi: PolyDiffeo, d: DiffOp) -> DiffOp:
    """phi_* o C^a o e^(omega_bar)."""
    if a not in (0, 1):
        raise ValueError("a must be 0 or 1")
    if not (omega.dim == phi.dim == d.dim):
        raise DimensionError("dimension mismatch")
    out = exp_omega_bar(omega, d)
    if a:
        out = conjugation_c(out)
    return pushforward(phi, out)


# -- recovery -------------------------------------------------------------


@dataclass
class D1Parameters:
    kappa: Fraction
    lam: Fraction
    omega: OneForm
    phi: PolyDiffeo


@dataclass
class SParameters:
    kappa: Fraction
    omega: OneForm
    phi: PolyDiffeo


@dataclass
class DParameters:
    a: int
    omega: OneForm
    phi: PolyDiffeo


def _function_value(d, what: str) -> RationalPoly:
    if isinstance(d, PolySymbol):
        if not d.in_s0():
            raise NotInFamilyError(f"{what} is not a function")
        return d.as_poly()
    if not d.is_function():
        raise NotInFamilyError(f"{what} is not a function")
    return d.as_poly()


def _recover_phi(inverse: list[RationalPoly]) -> PolyDiffeo:
    try:
        return PolyDiffeo.from_inverse(inverse)
    except NotInvertibleError as exc:
        raise NotInFamilyError(f"images of the coordinates are not a polynomial automorphism: {exc}") from None


def _recover_form(components: list[RationalPoly]) -> OneForm:
    if not is_closed(components):
        raise NotInFamilyError("recovered 1-form is not closed")
    return OneForm(components)


def d1_probes(n: int, degree: int = 2) -> list[DiffOp]:
    out = []
    for e in monomials_up_to(n, degree):
        f = RationalPoly.monomial(e)
        out.append(DiffOp.from_poly(f))
        for i in range(n):
            out.append(DiffOp.monomial(f, unit_index(n, i)))
    return out


def d_probes(n: int, degree: int = 2, order: int = 2) -> list[DiffOp]:
    out = []
    for e in monomials_up_to(n, degree):
        f = RationalPoly.monomial(e)
        for alpha in monomials_up_to(n, order):
            out.append(DiffOp.monomial(f, alpha))
    return out


def s_probes(n: int, degree: int = 2, xi_degree: int = 2) -> list[PolySymbol]:
    out = []
    for e in monomials_up_to(n, degree):
        f = RationalPoly.monomial(e)
        for alpha in monomials_up_to(n, xi_degree):
            out.append(PolySymbol(n, {alpha: f}))
    return out


def _check_residuals(oracle, rebuilt, probes) -> None:
    for b in probes:
        if oracle(b) != rebuilt(b):
            raise NotInFamilyError(f"nonzero residual on probe {b}")


def d1_recover_parameters(oracle: Callable[[DiffOp], DiffOp], n: int, probe_degree: int = 2) -> D1Parameters:
    """Recover (kappa, lambda, w, phi) from a D^1 automorphism given as a black box."""
    one = DiffOp.identity(n)
    kappa_poly = _function_value(oracle(one), "Phi(1)")
    if not kappa_poly.is_constant() or kappa_poly.is_zero():
        raise NotInFamilyError("Phi(1) is not a nonzero constant")
    kappa = kappa_poly.constant_term()
    psi = [_function_value(oracle(DiffOp.x(n, j)), f"Phi(x{j + 1})").scale(1 / kappa) for j in range(n)]
    phi = _recover_phi(psi)
    images = [oracle(DiffOp.partial(n, i)) for i in range(n)]
    if any(im.order() > 1 for im in images):
        raise NotInFamilyError("image of a vector field has order > 1")
    h = [op_split(im)[0] for im in images]
    fields = [op_split(im)[1] for im in images]
    x1d1 = oracle(DiffOp.monomial(RationalPoly.variable(n, 0), unit_index(n, 0)))
    lam_poly = op_split(x1d1)[0] - psi[0] * h[0]
    if not lam_poly.is_constant():
        raise NotInFamilyError("divergence coefficient is not constant")
    lam = lam_poly.constant_term()
    pushed = [h[i] - divergence(fields[i]).scale(lam) for i in range(n)]
    omega = _recover_form([phi.pull_function(w) for w in pushed])
    params = D1Parameters(kappa, lam, omega, phi)
    _check_residuals(oracle, lambda d: d1_automorphism(kappa, lam, omega, phi, d), d1_probes(n, probe_degree))
    return params


def s_recover_parameters(oracle: Callable[[PolySymbol], PolySymbol], n: int, probe_degree: int = 2) -> SParameters:
    """Recover (kappa, w, phi) from an automorphism of S given as a black box."""
    kappa_poly = _function_value(oracle(PolySymbol.constant(n, 1)), "Phi(1)")
    if not kappa_poly.is_constant() or kappa_poly.is_zero():
        raise NotInFamilyError("Phi(1) is not a nonzero constant")
    kappa = kappa_poly.constant_term()
    psi = [_function_value(oracle(PolySymbol.x(n, j)), f"Phi(x{j + 1})").scale(1 / kappa) for j in range(n)]
    phi = _recover_phi(psi)
    c = []
    for i in range(n):
        im = oracle(PolySymbol.xi(n, i))
        if im.xi_degree() > 1:
            raise NotInFamilyError("image of xi_i is not affine in xi")
        c.append(im.component(0).coeff(zero_index(n)))
    # w_j = sum_i (d_j psi^i) c_i
    comps = [
        sum((poly_partial(psi[i], j) * c[i] for i in range(n)), RationalPoly.zero(n)) for j in range(n)
    ]
    omega = _recover_form(comps)
    params = SParameters(kappa, omega, phi)
    _check_residuals(oracle, lambda p: s_automorphism(kappa, omega, phi, p), s_probes(n, probe_degree))
    return params


def d_recover_parameters(oracle: Callable[[DiffOp], DiffOp], n: int, probe_degree: int = 2, probe_order: int = 2) -> DParameters:
    """Recover (a, w, phi) from an automorphism of D given as a black box."""
    sign_poly = _function_value(oracle(DiffOp.identity(n)), "Phi(1)")
    if sign_poly == RationalPoly.constant(n, 1):
        a = 0
    elif sign_poly == RationalPoly.constant(n, -1):
        a = 1
    else:
        raise NotInFamilyError("Phi(1) is neither 1 nor -1")
    sign = 1 - 2 * a
    psi = [_function_value(oracle(DiffOp.x(n, j)), f"Phi(x{j + 1})").scale(sign) for j in range(n)]
    phi = _recover_phi(psi)
    back = phi.inverted()

    def stripped(d):
        out = pushforward(back, oracle(d))
        return conjugation_c(out) if a else out

    comps = []
    for i in range(n):
        rem = stripped(DiffOp.partial(n, i)) - DiffOp.partial(n, i)
        comps.append(_function_value(rem, f"residual of d{i + 1}"))
    omega = _recover_form(comps)
    params = DParameters(a, omega, phi)
    _check_residuals(oracle, lambda d: d_automorphism(a, omega, phi, d), d_probes(n, probe_degree, probe_order))
    return params


# -- descriptors --------------------------------------------------------------


@dataclass
class AutoSpec:
    """Structured description of an automorphism; ``as_map`` gives its action."""

    family: str  # "D1", "S" or "D"
    dim: int
    kappa: Fraction = Fraction(1)
    lam: Fraction = Fraction(0)
    a: int = 0
    omega: OneForm | None = None
    phi: PolyDiffeo | None = None

    def __post_init__(self):
        if self.family not in ("D1", "S", "D"):
            raise ValueError(f"unknown family {self.family!r}")
        self.kappa = as_rational(self.kappa)
        self.lam = as_rational(self.lam)
        if not self.kappa:
            raise ZeroKappaError("kappa must be nonzero")
        if self.omega is None:
            self.omega = OneForm.zero(self.dim)
        if self.phi is None:
            self.phi = PolyDiffeo.identity(self.dim)
        if self.family == "D":
            if self.a not in (0, 1):
                raise ValueError("a must be 0 or 1")
            self.kappa = Fraction((-1) ** self.a)
        if self.omega.dim != self.dim or self.phi.dim != self.dim:
            raise DimensionError("parameter dimensions disagree")

    def as_map(self) -> Callable:
        if self.family == "D1":
            return lambda d: d1_automorphism(self.kappa, self.lam, self.omega, self.phi, d)
        if self.family == "S":
            return lambda p: s_automorphism(self.kappa, self.omega, self.phi, p)
        return lambda d: d_automorphism(self.a, self.omega, self.phi, d)

    def __call__(self, x):
        return self.as_map()(x)


def recover(spec_family: str, oracle: Callable, n: int):
    if spec_family == "D1":
        p = d1_recover_parameters(oracle, n)
        return AutoSpec("D1", n, kappa=p.kappa, lam=p.lam, omega=p.omega, phi=p.phi)
    if spec_family == "S":
        p = s_recover_parameters(oracle, n)
        return AutoSpec("S", n, kappa=p.kappa, omega=p.omega, phi=p.phi)
    if spec_family == "D":
        p = d_recover_parameters(oracle, n)
        return AutoSpec("D", n, a=p.a, omega=p.omega, phi=p.phi)
    raise ValueError(f"unknown family {spec_family!r}")


def induced_symbol_map(phi_map: Callable[[DiffOp], DiffOp], d: DiffOp) -> PolySymbol:
    """tilde Phi(sigma(D)) = sigma(Phi(D)) for a filtration-preserving map."""
    return principal_symbol(phi_map(d))


# -- verification ---------------------------------------------------------------


@dataclass
class VerifyReport:
    algebra: str
    trials: int
    seed: int
    failures: list = field(default_factory=list)  # (trial, check)
    checks: dict = field(default_factory=dict)  # check name -> count run

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def first_failure(self):
        return self.failures[0] if self.failures else None

    def to_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "trials": self.trials,
            "seed": self.seed,
            "passed": self.passed,
            "failures": [{"trial": t, "check": c} for t, c in self.failures],
            "checks": dict(self.checks),
        }


def trial_rng(seed: int, trial: int) -> random.Random:
    """Per-trial generator; depends only on (seed, trial)."""
    return random.Random(f"{seed}:{trial}")


def _h_checks(phi_map, kappa, x: DiffOp, y: DiffOp, f: RationalPoly) -> str | None:
    """The projections of the homomorphism property onto A and D_c, for D_c elements x, y."""
    from .weyl import op_apply

    def phi0(d):
        return op_split(phi_map(d))[0]

    def phic(d):
        return op_split(phi_map(d))[1]

    def br_c(a, b):
        return op_split(op_bracket(a, b))[1]

    fop = DiffOp.from_poly(f)
    inv = 1 / kappa
    px, py = phic(x), phic(y)
    if op_apply(px, f) != phi0(op_bracket(x, fop)).scale(inv):
        return "H1"
    if br_c(px, fop) != phic(br_c(x, fop)).scale(inv):
        return "H2"
    if phi0(op_bracket(x, y)) != op_apply(px, phi0(y)) - op_apply(py, phi0(x)):
        return "H3"
    lhs = phic(op_bracket(x, y))
    rhs = br_c(px, DiffOp.from_poly(phi0(y))) + br_c(DiffOp.from_poly(phi0(x)), py) + op_bracket(px, py)
    if lhs != rhs:
        return "H4"
    return None


def _scalar_on_functions(phi_map, n: int):
    """kappa when Phi = kappa id on functions (checked on 1 and coordinates), else None."""
    im = phi_map(DiffOp.identity(n))
    if not im.is_function() or not im.as_poly().is_constant():
        return None
    kappa = im.as_poly().constant_term()
    if not kappa:
        return None
    for j in range(n):
        if phi_map(DiffOp.x(n, j)) != DiffOp.x(n, j).scale(kappa):
            return None
    return kappa


def verify_automorphism(
    phi_map: Callable,
    algebra: str,
    trials: int,
    seed: int,
    n: int = 2,
    max_order: int = 2,
    coeff_degree: int = 2,
    max_terms: int = 3,
    sampler: Callable | None = None,
) -> VerifyReport:
    """Check Phi[a, b] == [Phi a, Phi b] on random pairs; for D^1 also the split equations H1-H4.

    ``sampler(rng)`` may override the pair generator and must return (a, b).
    """
    from . import sampling

    if trials < 1:
        raise ValueError("trials must be >= 1")
    if algebra not in ("D", "D1", "S"):
        raise ValueError(f"unknown algebra {algebra!r}")
    report = VerifyReport(algebra, trials, seed)
    kappa = _scalar_on_functions(phi_map, n) if algebra == "D1" else None
    for t in range(trials):
        rng = trial_rng(seed, t)
        if sampler is not None:
            a, b = sampler(rng)
        elif algebra == "S":
            a = sampling.random_symbol(rng, n, max_order, coeff_degree, max_terms)
            b = sampling.random_symbol(rng, n, max_order, coeff_degree, max_terms)
        else:
            order = 1 if algebra == "D1" else max_order
            a = sampling.random_op(rng, n, order, coeff_degree, max_terms)
            b = sampling.random_op(rng, n, order, coeff_degree, max_terms)
        if algebra == "S":
            ok = phi_map(poisson_bracket(a, b)) == poisson_bracket(phi_map(a), phi_map(b))
        else:
            ok = phi_map(op_bracket(a, b)) == op_bracket(phi_map(a), phi_map(b))
        report.checks["bracket"] = report.checks.get("bracket", 0) + 1
        if not ok:
            report.failures.append((t, "bracket"))
            continue
        if algebra == "D1" and kappa is not None:
            x = sampling.random_vector_field(rng, n, coeff_degree, max_terms).to_op()
            y = sampling.random_vector_field(rng, n, coeff_degree, max_terms).to_op()
            f = sampling.random_poly(rng, n, coeff_degree, max_terms)
            report.checks["H1-H4"] = report.checks.get("H1-H4", 0) + 1
            failed = _h_checks(phi_map, kappa, x, y, f)
            if failed:
                report.failures.append((t, failed))
    return report
