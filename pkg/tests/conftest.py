import random
from fractions import Fraction

import pytest

from weylauto.expr import BinOp, Neg, Num, Pow, Var, parse_operator, parse_poly, parse_symbol


@pytest.fixture
def rng():
    return random.Random(20261015)


def op(text, dim=None):
    return parse_operator(text, dim)


def poly(text, dim=None):
    return parse_poly(text, dim)


def sym(text, dim=None):
    return parse_symbol(text, dim)


def random_ast(rng: random.Random, depth: int, families=("x", "d")):
    """Random well-formed AST over the given variable families."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.4:
            return Num(Fraction(rng.randint(0, 9), rng.choice([1, 1, 2, 3])))
        return Var(rng.choice(families), rng.randint(1, 3))
    kind = rng.random()
    if kind < 0.55:
        return BinOp(rng.choice("+-*"), random_ast(rng, depth - 1, families), random_ast(rng, depth - 1, families))
    if kind < 0.75:
        return Neg(random_ast(rng, depth - 1, families))
    return Pow(random_ast(rng, depth - 1, families), rng.randint(0, 3))
