"""Order-2 extension constraints for automorphisms of D and their exact solution.

Setting.  After removing the e^(omega_bar) part, an automorphism with Phi = kappa id on
functions acts on D^1 by f -> kappa f, X -> X + lam div X, and on D^2 as
kappa^-1 id + psi_2 with psi_2 : D^2 -> D^1 lowering.  Write psi_2 = psi_20 + psi_2c
(function part and D_c part).  The homomorphism property forces

    psi_2c(Delta) = (1 - 1/kappa) Delta + (lam/kappa) div([Delta, .]_c)          (A)
    psi_20(L_X Delta) - X(psi_20 Delta)
        = -lam Delta(div X) - (lam^2/kappa) div([Delta, div X]_c)                 (B)

for Delta in D^2_c and vector fields X, plus the restriction psi_2 = psi_1 on D^1_c.

psi_2 is taken local with constant coefficients:

    psi_20(h d^a) = sum_b t[a, b] d^b h,      psi_2c(h d^a) = sum_{b, i} s[a, b, i] (d^b h) d_i

Both sides of (A) and (B) are bilinear and translation covariant, and the truncated
families are closed under translation, so evaluating at x = 0 loses nothing.

Every right-hand side is a combination of the five weights (1, 1/k, lam/k, lam,
lam^2/k), so one elimination per (n, d) serves every (kappa, lam).  Each consistency
condition a . w = 0 becomes, after multiplying by kappa, a polynomial in (kappa, lam);
for a given kappa its rational roots in lam are the only candidates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .linalg import EliminationResult, SparseEliminator
from .ratpoly import (
    RationalPoly,
    as_rational,
    monomials_of_degree,
    monomials_up_to,
    multi_factorial,
    poly_derivative,
    poly_partial,
    unit_index,
)
from .weyl import DiffOp, divergence, op_apply, op_bracket, op_split

RHS_BASIS = ("1", "1/kappa", "lambda/kappa", "lambda", "lambda^2/kappa")


def rhs_weights(kappa, lam) -> tuple:
    kappa = as_rational(kappa)
    lam = as_rational(lam)
    if not kappa:
        raise ValueError("kappa must be nonzero")
    inv = 1 / kappa
    return (Fraction(1), inv, lam * inv, lam, lam * lam * inv)


@dataclass(frozen=True)
class TruncatedSpace:
    """Operators f d^a with |a| <= 2, deg f <= coeff_degree; vector fields of degree <= field_degree."""

    dim: int
    coeff_degree: int
    field_degree: int = 3
    order: int = 2

    def __post_init__(self):
        if self.order != 2:
            raise ValueError("only order 2 is supported")
        if self.dim < 1 or self.coeff_degree < 0 or self.field_degree < 0:
            raise ValueError("invalid truncation")

    @property
    def alphas(self) -> list:
        """Differential multi-indices of D^2_c: 1 <= |a| <= 2."""
        return [a for a in monomials_up_to(self.dim, 2) if sum(a)]

    @property
    def basis(self) -> list:
        """Deterministic monomial basis (coefficient exponent, a) of the whole space."""
        return [(b, a) for a in monomials_up_to(self.dim, 2) for b in monomials_up_to(self.dim, self.coeff_degree)]

    @property
    def dc_basis(self) -> list:
        return [(b, a) for (b, a) in self.basis if sum(a)]

    def op(self, b, a) -> DiffOp:
        return DiffOp.monomial(RationalPoly.monomial(b), a)

    @property
    def fields(self) -> list:
        n = self.dim
        return [(m, i) for m in monomials_up_to(n, self.field_degree) for i in range(n)]

    def field(self, m, i) -> DiffOp:
        return DiffOp.monomial(RationalPoly.monomial(m), unit_index(self.dim, i))

    @property
    def beta_bound(self) -> int:
        # coefficients of L_X Delta reach degree coeff_degree + field_degree - 1
        return self.coeff_degree + max(self.field_degree - 1, 0)


def t_unknown(alpha, beta):
    return ("t", tuple(alpha), tuple(beta))


def s_unknown(alpha, beta, i):
    return ("s", tuple(alpha), tuple(beta), i)


C_UNKNOWNS = (("c", 1), ("c", 2))


def _lf20(d: DiffOp) -> dict:
    """psi_20(d)(0) as a linear form in the t unknowns."""
    out: dict = {}
    for alpha, g in d.items():
        if not sum(alpha):
            continue
        for beta, c in g.items():
            key = t_unknown(alpha, beta)
            out[key] = out.get(key, 0) + c * multi_factorial(beta)
    return out


def _lf2c_apply(d: DiffOp, f: RationalPoly) -> dict:
    """psi_2c(d)(f)(0) as a linear form in the s unknowns."""
    n = d.dim
    grad0 = [poly_partial(f, i).constant_term() for i in range(n)]
    out: dict = {}
    for alpha, g in d.items():
        if not sum(alpha):
            continue
        for beta, c in g.items():
            for i in range(n):
                if grad0[i]:
                    key = s_unknown(alpha, beta, i)
                    out[key] = out.get(key, 0) + c * multi_factorial(beta) * grad0[i]
    return out


def _sub(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


def _at0(p: RationalPoly) -> Fraction:
    return p.constant_term()


def _partial_coeffs(d: DiffOp, i: int) -> DiffOp:
    return DiffOp(d.dim, {a: poly_partial(g, i) for a, g in d.items()})


def _div_c(d: DiffOp) -> RationalPoly:
    """div of the D_c part of an operator of order <= 1."""
    _, dc = op_split(d)
    if dc.order() > 1:
        raise ValueError("expected an operator of order <= 1")
    return divergence(dc)


@dataclass
class LinearSystem:
    """Rows over labelled unknowns with right-hand sides in the span of RHS_BASIS."""

    space: TruncatedSpace
    rows: list = field(default_factory=list)  # (row dict, rhs tuple, label)
    weights: tuple | None = None
    _result: EliminationResult | None = None

    def add(self, row: dict, rhs, label) -> None:
        self.rows.append((row, tuple(Fraction(v) for v in rhs), label))
        self._result = None

    @property
    def unknowns(self) -> list:
        seen: dict = {}
        for row, _, _ in self.rows:
            for k in row:
                seen.setdefault(k, None)
        return list(seen)

    def eliminate(self) -> EliminationResult:
        if self._result is None:
            elim = SparseEliminator(len(RHS_BASIS))
            for row, rhs, label in self.rows:
                elim.add(row, rhs, label)
            self._result = elim.result()
        return self._result

    def bind(self, kappa, lam) -> "LinearSystem":
        bound = LinearSystem(self.space, self.rows, rhs_weights(kappa, lam))
        bound._result = self._result
        return bound

    def is_consistent(self) -> bool:
        return self.eliminate().is_consistent(self._weights())

    def failed_rows(self) -> list:
        return self.eliminate().failed_conditions(self._weights())

    def solve(self) -> dict:
        return self.eliminate().solve(self._weights())

    def determined(self, unknown) -> bool:
        return self.eliminate().determined(unknown)

    def residual(self, values: dict, label_filter=None) -> list:
        """Labels of rows violated by an explicit assignment of the unknowns."""
        w = self._weights()
        bad = []
        for row, rhs, label in self.rows:
            if label_filter and not label_filter(label):
                continue
            lhs = sum((c * values.get(k, 0) for k, c in row.items()), Fraction(0))
            if lhs != sum((a * b for a, b in zip(rhs, w)), Fraction(0)):
                bad.append(label)
        return bad

    def _weights(self):
        if self.weights is None:
            raise ValueError("system is not bound to (kappa, lambda); call bind()")
        return self.weights


@lru_cache(maxsize=32)
def _generic_system(space: TruncatedSpace) -> LinearSystem:
    n = space.dim
    sys_ = LinearSystem(space)
    test_fns = [RationalPoly.monomial(e) for e in monomials_up_to(n, 2) if sum(e)]
    # (A): psi_2c on D^2_c, tested on functions of degree 1..2
    for b, a in space.dc_basis:
        delta = space.op(b, a)
        for f in test_fns:
            lhs = _lf2c_apply(delta, f)
            df0 = _at0(op_apply(delta, f))
            _, brc = op_split(op_bracket(delta, DiffOp.from_poly(f)))
            div0 = _at0(divergence(brc))
            sys_.add(lhs, (df0, -df0, div0, 0, 0), ("A", b, a, str(f)))
    # restriction to D^1_c: psi_20(X) = lam div X
    for b, a in space.dc_basis:
        if sum(a) != 1:
            continue
        x = space.op(b, a)
        sys_.add(_lf20(x), (0, 0, 0, _at0(divergence(x)), 0), ("R", b, a))
    # (B): the L_X equation
    for b, a in space.dc_basis:
        delta = space.op(b, a)
        shifted = [_partial_coeffs(delta, j) for j in range(n)]
        for m, i in space.fields:
            x = space.field(m, i)
            lhs = _lf20(op_bracket(x, delta))
            if not sum(m):
                lhs = _sub(lhs, _lf20(shifted[i]))
            dv = divergence(x)
            r_lam = -_at0(op_apply(delta, dv))
            _, brc = op_split(op_bracket(delta, DiffOp.from_poly(dv)))
            r_lam2 = -_at0(divergence(brc))
            sys_.add(lhs, (0, 0, 0, r_lam, r_lam2), ("B", b, a, m, i))
    # links to the pairing constants
    e1 = unit_index(n, 0)
    sys_.add({("c", 1): 1, t_unknown(e1, e1): -1}, (0,) * 5, ("link", 1))
    e11 = tuple(2 if k == 0 else 0 for k in range(n))
    sys_.add({("c", 2): 1, t_unknown(e11, e11): -1}, (0,) * 5, ("link", 2))
    sys_.eliminate()
    return sys_


def build_order2_constraints(kappa, lam, space: TruncatedSpace) -> LinearSystem:
    """The constraint system for given (kappa, lambda); solve or test it via the result."""
    return _generic_system(space).bind(kappa, lam)


def _condition_poly(cond: tuple, kappa: Fraction) -> list:
    """kappa * (a . w) as coefficients [l^0, l^1, l^2] of a polynomial in lambda."""
    a0, a1, a2, a3, a4 = cond
    return [a0 * kappa + a1, a2 + a3 * kappa, a4]


def _rational_roots(coeffs: list):
    """Rational roots of c0 + c1 l + c2 l^2; None if the polynomial is identically zero."""
    c0, c1, c2 = coeffs
    if not (c0 or c1 or c2):
        return None
    if not c2:
        return set() if not c1 else {-c0 / c1}
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        return set()
    num, den = disc.numerator, disc.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn != num or rd * rd != den:
        return set()
    r = Fraction(rn, rd)
    return {(-c1 + r) / (2 * c2), (-c1 - r) / (2 * c2)}


class UnderdeterminedError(RuntimeError):
    """The truncation is too small to pin lambda or the pairing constants."""


@dataclass(frozen=True)
class Admissible:
    kappa: Fraction
    lam: Fraction
    c1: Fraction
    c2: Fraction

    def as_tuple(self) -> tuple:
        return (self.kappa, self.lam, self.c1, self.c2)


def lambda_candidates(space: TruncatedSpace, kappa) -> set | None:
    """lambda values for which the system at ``kappa`` is consistent; None means every lambda."""
    kappa = as_rational(kappa)
    res = _generic_system(space).eliminate()
    out = None
    for cond in res.conditions:
        roots = _rational_roots(_condition_poly(cond, kappa))
        if roots is None:
            continue
        out = roots if out is None else out & roots
    return out


def solve_admissible(space: TruncatedSpace, kappa_grid) -> set:
    """All (kappa, lambda, c1, c2) with a consistent system, kappa ranging over the grid."""
    kappa_grid = [as_rational(k) for k in kappa_grid]
    if not kappa_grid:
        raise ValueError("kappa grid is empty")
    found = set()
    for kappa in kappa_grid:
        if not kappa:
            continue
        lams = lambda_candidates(space, kappa)
        if lams is None:
            raise UnderdeterminedError(f"lambda is not determined at kappa={kappa}")
        for lam in sorted(lams):
            system = build_order2_constraints(kappa, lam, space)
            if not system.is_consistent():
                continue
            for c in C_UNKNOWNS:
                if not system.determined(c):
                    raise UnderdeterminedError(f"{c} not determined at kappa={kappa}, lambda={lam}")
            sol = system.solve()
            found.add(Admissible(kappa, lam, sol[("c", 1)], sol[("c", 2)]))
    return found


# -- the pairing ansatz ---------------------------------------------------


def pairing_polynomial(n: int, k: int) -> RationalPoly:
    """<Y, eta>^k in the 2n variables (Y, eta)."""
    pair = sum(
        (RationalPoly.variable(2 * n, i) * RationalPoly.variable(2 * n, n + i) for i in range(n)),
        RationalPoly.zero(2 * n),
    )
    return pair ** k


def psi_pairing_form(table: dict, n: int, k: int) -> RationalPoly:
    """psi(eta; Y^k) from a table {(a, b): t[a, b]} of psi_20(h d^a) = sum_b t[a, b] d^b h."""
    out = RationalPoly.zero(2 * n)
    for alpha in monomials_of_degree(n, k):
        weight = Fraction(multi_factorial((k,) + (0,) * (n - 1)), multi_factorial(alpha))
        for (a, b), t in table.items():
            if a == alpha and t:
                out = out + RationalPoly.monomial(tuple(alpha) + tuple(b), weight * t)
    return out


def fit_pairing_constants(candidate: dict, n: int) -> dict | None:
    """c_k with candidate[k] == c_k <Y, eta>^k for every k, or None when no such constants exist."""
    out = {}
    for k, poly in candidate.items():
        target = pairing_polynomial(n, k)
        lead = next(iter(sorted(target.terms)))
        c = poly.coeff(lead) / target.coeff(lead)
        if poly != target.scale(c):
            return None
        out[k] = c
    return out


def gl_invariance_check(candidate: dict, n: int | None = None) -> bool:
    """True when each psi(eta; Y^k) (a polynomial in (Y, eta)) is a multiple of <Y, eta>^k."""
    if not candidate:
        return True
    if n is None:
        n = next(iter(candidate.values())).dim // 2
    return fit_pairing_constants(candidate, n) is not None


# -- tables of actual automorphisms --------------------------------------------


def extract_psi(phi_map, kappa, space: TruncatedSpace) -> dict:
    """Unknown values {t, s} read off an order-2 action with Phi = kappa id on functions.

    t[a, b] = psi_20(x^b d^a)(0) / b!  and  s[a, b, i] = [d_i] psi_2c(x^b d^a)(0) / b!.
    """
    kappa = as_rational(kappa)
    n = space.dim
    out: dict = {}
    for a in space.alphas:
        for b in monomials_up_to(n, space.beta_bound):
            delta = DiffOp.monomial(RationalPoly.monomial(b), a)
            psi = phi_map(delta) - delta.scale(1 / kappa)
            if psi.order() > 1:
                raise ValueError("psi_2 is not lowering")
            f0, dc = op_split(psi)
            scale = Fraction(1, multi_factorial(b))
            v = f0.constant_term() * scale
            if v:
                out[t_unknown(a, b)] = v
            for i in range(n):
                v = dc.coeff(unit_index(n, i)).constant_term() * scale
                if v:
                    out[s_unknown(a, b, i)] = v
    e1 = unit_index(n, 0)
    e11 = tuple(2 if k == 0 else 0 for k in range(n))
    out[("c", 1)] = out.get(t_unknown(e1, e1), Fraction(0))
    out[("c", 2)] = out.get(t_unknown(e11, e11), Fraction(0))
    return out


def t_table(values: dict) -> dict:
    return {(k[1], k[2]): v for k, v in values.items() if k[0] == "t"}


def reconstruct_action(kappa, values: dict, n: int):
    """Order <= 2 action kappa^-1 id + psi_2 on D^2_c, kappa on functions, from solved unknowns."""
    kappa = as_rational(kappa)
    t = {}
    s = {}
    for k, v in values.items():
        if not v:
            continue
        if k[0] == "t":
            t.setdefault(k[1], []).append((k[2], v))
        elif k[0] == "s":
            s.setdefault(k[1], []).append((k[2], k[3], v))

    def phi(d: DiffOp) -> DiffOp:
        if d.order() > 2:
            raise ValueError("reconstructed action is defined on D^2 only")
        f0, dc = op_split(d)
        out = DiffOp.from_poly(f0.scale(kappa)) + dc.scale(1 / kappa)
        for alpha, h in dc.items():
            g = RationalPoly.zero(n)
            for beta, v in t.get(alpha, ()):
                g = g + poly_derivative(h, beta).scale(v)
            terms = {}
            for beta, i, v in s.get(alpha, ()):
                e = unit_index(n, i)
                c = poly_derivative(h, beta).scale(v)
                terms[e] = terms[e] + c if e in terms else c
            out = out + DiffOp.from_poly(g) + DiffOp(n, terms)
        return out

    return phi


def solve_values(kappa, lam, space: TruncatedSpace) -> dict:
    """A solution of the bound system (free unknowns set to 0)."""
    return build_order2_constraints(kappa, lam, space).solve()


def symbolic_roots() -> set:
    """Substituting 1 - kappa = 2 lam and c1 = lam, c2 = -lam into c2 = lam^2 / kappa.

    -lam = lam^2 / (1 - 2 lam)  <=>  lam (lam - 1) = 0, giving the two admissible tuples.
    """
    out = set()
    for lam in _rational_roots([Fraction(0), Fraction(-1), Fraction(1)]):
        kappa = 1 - 2 * lam
        out.add((kappa, lam, lam, -lam))
    return out


def classify_report(n: int, coeff_degree: int, kappa_grid=None, field_degree: int = 3) -> dict:
    from .sampling import KAPPA_GRID

    grid = list(kappa_grid) if kappa_grid is not None else list(KAPPA_GRID)
    space = TruncatedSpace(n, coeff_degree, field_degree)
    found = solve_admissible(space, grid)
    res = _generic_system(space).eliminate()
    return {
        "admissible": [
            {"kappa": str(a.kappa), "lambda": str(a.lam), "c1": str(a.c1), "c2": str(a.c2)}
            for a in sorted(found, key=lambda a: (-a.kappa, a.lam))
        ],
        "n": n,
        "coeff_degree": coeff_degree,
        "field_degree": field_degree,
        "rows": len(_generic_system(space).rows),
        "rank": res.rank,
        "conditions": [
            {"coefficients": [str(v) for v in cond], "basis": list(RHS_BASIS)} for cond in res.conditions
        ],
    }
