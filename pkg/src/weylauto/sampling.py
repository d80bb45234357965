"""Seeded random generators for operators, symbols, closed forms and diffeomorphisms.

Everything takes a ``random.Random`` so a fixed seed reproduces a run exactly.
Coefficients are small integers or halves to keep exact arithmetic cheap.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .classical import PolySymbol
from .ratpoly import RationalPoly, monomials_up_to
from .weyl import DiffOp, VectorField

KAPPA_GRID = (Fraction(1), Fraction(-1), Fraction(2), Fraction(-2), Fraction(1, 2), Fraction(3))
LAMBDA_GRID = (Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(2))


def random_coeff(rng: random.Random, allow_zero: bool = False) -> Fraction:
    while True:
        c = Fraction(rng.randint(-3, 3), rng.choice((1, 1, 2)))
        if c or allow_zero:
            return c


def random_poly(rng: random.Random, n: int, degree: int, max_terms: int = 3) -> RationalPoly:
    basis = monomials_up_to(n, degree)
    k = rng.randint(1, min(max_terms, len(basis)))
    return RationalPoly(n, {e: random_coeff(rng) for e in rng.sample(basis, k)})


def random_op(rng: random.Random, n: int, order: int, coeff_degree: int, max_terms: int = 3) -> DiffOp:
    """Nonzero operator with up to ``max_terms`` differential monomials."""
    alphas = monomials_up_to(n, order)
    k = rng.randint(1, min(max_terms, len(alphas)))
    chosen = rng.sample(alphas, k)
    # make sure the top order actually occurs
    if all(sum(a) < order for a in chosen):
        chosen[0] = rng.choice([a for a in alphas if sum(a) == order])
    return DiffOp(n, {a: random_poly(rng, n, coeff_degree, 2) for a in chosen})


def random_vector_field(rng: random.Random, n: int, coeff_degree: int, max_terms: int = 3) -> VectorField:
    comps = [RationalPoly.zero(n)] * n
    for _ in range(rng.randint(1, max(1, min(max_terms, n)))):
        comps[rng.randrange(n)] = random_poly(rng, n, coeff_degree, 2)
    return VectorField(comps)


def random_symbol(rng: random.Random, n: int, xi_degree: int, coeff_degree: int, max_terms: int = 3) -> PolySymbol:
    return PolySymbol(n, dict(random_op(rng, n, xi_degree, coeff_degree, max_terms).items()))


def random_constant_symbol(rng: random.Random, n: int, xi_degree: int, max_terms: int = 3) -> PolySymbol:
    """Symbol with constant coefficients: its Hamiltonian field is a translation field."""
    return random_symbol(rng, n, xi_degree, 0, max_terms)


def random_closed_form(rng: random.Random, n: int, degree: int, max_terms: int = 2):
    """d f for a random f of degree <= degree + 1 with no constant term."""
    from .autos import OneForm

    f = random_poly(rng, n, degree + 1, max_terms)
    f = f - f.constant_term()
    return OneForm.exact(f)


def random_diffeo(rng: random.Random, n: int, degree: int = 2):
    """Affine map composed with a triangular one: exact polynomial inverse both ways."""
    from .autos import PolyDiffeo

    while True:
        # unit upper-triangular times a diagonal of +-1, +-2 keeps the inverse small
        m = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            m[i][i] = Fraction(rng.choice((1, -1, 2, -2, 1)))
            for j in range(i + 1, n):
                m[i][j] = Fraction(rng.randint(-1, 1))
        perm = list(range(n))
        rng.shuffle(perm)
        m = [m[p] for p in perm]
        shift = [Fraction(rng.randint(-1, 1)) for _ in range(n)]
        try:
            aff = PolyDiffeo.affine(m, shift)
        except ZeroDivisionError:
            continue
        break
    adds = [RationalPoly.zero(n)]
    for i in range(1, n):
        if degree >= 2 and rng.random() < 0.7:
            basis = [e for e in monomials_up_to(n, degree) if sum(e) >= 1 and not any(e[i:])]
            e = rng.choice(basis)
            adds.append(RationalPoly.monomial(e, random_coeff(rng)))
        else:
            adds.append(RationalPoly.zero(n))
    tri = PolyDiffeo.triangular(adds)
    return tri.then(aff) if rng.random() < 0.5 else aff.then(tri)


def random_kappa(rng: random.Random) -> Fraction:
    return rng.choice(KAPPA_GRID)


def random_lambda(rng: random.Random) -> Fraction:
    return rng.choice(LAMBDA_GRID)
