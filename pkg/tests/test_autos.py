import random
from fractions import Fraction

import pytest

from weylauto import sampling
from weylauto.autos import (
    AutoSpec,
    NotInFamilyError,
    NotInvertibleError,
    OneForm,
    OrderTooHighError,
    PolyDiffeo,
    ZeroKappaError,
    conjugation_c,
    conjugation_closed_form,
    conjugation_local,
    d1_automorphism,
    d1_recover_parameters,
    d_automorphism,
    d_recover_parameters,
    exp_omega_bar,
    invert_polynomial_map,
    omega_bar,
    pushforward,
    recover,
    s_automorphism,
    s_recover_parameters,
    trial_rng,
    twisted_operator,
    u_kappa,
    verify_automorphism,
)
from weylauto.classical import PolySymbol, poisson_bracket
from weylauto.ratpoly import NotClosedError, RationalPoly, identity_map, monomials_up_to
from weylauto.weyl import DiffOp, divergence, formal_adjoint, op_apply, op_bracket, op_compose, op_split

from conftest import op, poly, sym

DX1 = OneForm([RationalPoly.constant(1, 1)])


# -- omega_bar and its exponential ---------------------------------------------


def test_omega_bar_examples():
    assert omega_bar(DX1, op("d1")) == DiffOp.identity(1)
    assert omega_bar(DX1, op("d1^2")) == op("2*d1")
    assert not omega_bar(DX1, op("x1^2 + 3"))


def test_exp_omega_bar_examples():
    assert exp_omega_bar(DX1, op("d1^2")) == op("d1^2 + 2*d1 + 1")
    f = op("x1^3 - 2")
    assert exp_omega_bar(DX1, f) == f
    d = op("x1*d1^2 + x2*d2", 2)
    assert exp_omega_bar(OneForm.zero(2), d) == d


def test_exp_omega_bar_is_twist():
    # e^(omega_bar) D = e^(-f) o D o e^(f) where omega = df: d_i -> d_i + omega_i
    rng = random.Random(61)
    for _ in range(60):
        n = rng.randint(1, 3)
        omega = sampling.random_closed_form(rng, n, 2)
        d = sampling.random_op(rng, n, rng.randint(0, 3), 2)
        assert exp_omega_bar(omega, d) == twisted_operator(omega, d)


def test_omega_bar_is_lowering_derivation():
    rng = random.Random(67)
    for _ in range(60):
        n = rng.randint(1, 2)
        omega = sampling.random_closed_form(rng, n, 2)
        a, b = sampling.random_op(rng, n, 2, 2), sampling.random_op(rng, n, 2, 2)
        assert omega_bar(omega, a).order() <= a.order() - 1
        lhs = omega_bar(omega, op_bracket(a, b))
        assert lhs == op_bracket(omega_bar(omega, a), b) + op_bracket(a, omega_bar(omega, b))
        lhs = omega_bar(omega, op_compose(a, b))
        assert lhs == op_compose(omega_bar(omega, a), b) + op_compose(a, omega_bar(omega, b))


def test_exp_omega_bar_bracket_automorphism():
    rng = random.Random(71)
    for _ in range(60):
        n = rng.randint(1, 2)
        omega = sampling.random_closed_form(rng, n, 2)
        a, b = sampling.random_op(rng, n, 2, 2), sampling.random_op(rng, n, 2, 2)
        assert exp_omega_bar(omega, op_bracket(a, b)) == op_bracket(exp_omega_bar(omega, a), exp_omega_bar(omega, b))


def test_one_form_closedness():
    with pytest.raises(NotClosedError):
        OneForm([poly("x2"), poly("-x1", 2)])
    w = OneForm.exact(poly("x1*x2"))
    assert w.components == (poly("x2", 2), poly("x1", 2))
    assert w(op("d1", 2)) == poly("x2", 2)


# -- conjugation C -----------------------------------------------------------------


def test_conjugation_examples():
    f = op("x1^2 - 3*x1*x2", 2)
    assert conjugation_c(f) == -f
    assert conjugation_c(op("x1*d1")) == op("x1*d1 + 1")
    assert conjugation_c(op("d1^2")) == op("-d1^2")


def test_conjugation_on_fields_adds_divergence():
    rng = random.Random(73)
    for _ in range(40):
        x = sampling.random_vector_field(rng, 2, 3).to_op()
        assert conjugation_c(x) == x + DiffOp.from_poly(divergence(x))


def test_conjugation_three_evaluators_300():
    rng = random.Random(79)
    for _ in range(300):
        n = rng.randint(1, 3)
        d = sampling.random_op(rng, n, rng.randint(0, 4), 3)
        c = conjugation_c(d)
        assert c == -formal_adjoint(d)
        assert conjugation_c(c) == d
        assert c.order() == d.order()
        assert conjugation_closed_form(d) == c
        assert conjugation_local(d) == c


def test_conjugation_characteristic_properties():
    rng = random.Random(83)
    for _ in range(60):
        n = rng.randint(1, 2)
        d = sampling.random_op(rng, n, 2, 2)
        e = sampling.random_op(rng, n, 2, 2)
        f = DiffOp.from_poly(sampling.random_poly(rng, n, 2))
        x = sampling.random_vector_field(rng, n, 2).to_op()
        assert conjugation_c(op_compose(d, f)) == op_compose(f, conjugation_c(d))
        assert conjugation_c(op_compose(d, x)) == -op_compose(conjugation_c(x), conjugation_c(d))
        assert conjugation_c(op_bracket(d, e)) == op_bracket(conjugation_c(d), conjugation_c(e))


# -- U_kappa -------------------------------------------------------------------------


def test_u_kappa_examples():
    f = sym("x1^2 + x2", 2)
    assert u_kappa(3, f) == f.scale(3)
    assert u_kappa(2, sym("xi1^2")) == sym("1/2*xi1^2")
    p = sym("x1*xi1^3 + xi2 + x2", 2)
    assert u_kappa(1, p) == p
    with pytest.raises(ZeroKappaError):
        u_kappa(0, p)


def test_u_kappa_poisson_automorphism():
    rng = random.Random(89)
    for kappa in sampling.KAPPA_GRID:
        for _ in range(20):
            n = rng.randint(1, 3)
            p, q = sampling.random_symbol(rng, n, 3, 2), sampling.random_symbol(rng, n, 3, 2)
            assert u_kappa(kappa, poisson_bracket(p, q)) == poisson_bracket(u_kappa(kappa, p), u_kappa(kappa, q))


def test_verify_u_kappa_passes():
    rep = verify_automorphism(lambda p: u_kappa(Fraction(1, 2), p), "S", 40, seed=1)
    assert rep.passed


# -- diffeomorphisms and pushforward -------------------------------------------------


def test_polydiffeo_checks():
    with pytest.raises(NotInvertibleError):
        PolyDiffeo([poly("x1 + x2^2"), poly("x2", 2)], identity_map(2))
    with pytest.raises(NotInvertibleError):
        PolyDiffeo.from_inverse([poly("x1^2")])
    with pytest.raises(NotInvertibleError):
        PolyDiffeo.affine([[1, 1], [2, 2]])
    phi = PolyDiffeo.triangular([RationalPoly.zero(2), poly("x1^2", 2)])
    assert phi.forward[1] == poly("x2 + x1^2")
    assert phi.inverse[1] == poly("x2 - x1^2")
    assert phi.then(phi.inverted()).is_identity()


def test_invert_polynomial_map():
    rng = random.Random(97)
    for _ in range(30):
        n = rng.randint(1, 3)
        phi = sampling.random_diffeo(rng, n)
        assert invert_polynomial_map(list(phi.forward)) == list(phi.inverse)


def test_pushforward_examples():
    d = op("x1*d1^2 + x2", 2)
    assert pushforward(PolyDiffeo.identity(2), d) == d
    shift = PolyDiffeo.translation([5])
    assert pushforward(shift, op("x1")) == op("x1 - 5")
    assert pushforward(shift, op("d1")) == op("d1")


def test_pushforward_linear_chain_rule_oracle():
    # phi(x) = Mx; (phi_* D) g = (D(g o phi)) o phi^-1, checked on x^i and x^i x^j
    m = [[2, 1], [1, 1]]
    phi = PolyDiffeo.affine(m)
    for d in (op("d1", 2), op("d2", 2), op("x1*d2 + d1^2", 2)):
        pushed = pushforward(phi, d)
        for e in monomials_up_to(2, 2):
            g = RationalPoly.monomial(e)
            expected = phi.push_function(op_apply(d, phi.pull_function(g)))
            assert op_apply(pushed, g) == expected
    # d1 -> 2 d1 + d2 is the first column of M
    assert pushforward(phi, op("d1", 2)) == op("2*d1 + d2", 2)


def test_pushforward_is_algebra_automorphism():
    rng = random.Random(101)
    for _ in range(40):
        n = rng.randint(1, 2)
        phi = sampling.random_diffeo(rng, n)
        a, b = sampling.random_op(rng, n, 2, 2), sampling.random_op(rng, n, 2, 2)
        assert pushforward(phi, op_compose(a, b)) == op_compose(pushforward(phi, a), pushforward(phi, b))
        for e in monomials_up_to(n, 2):
            g = RationalPoly.monomial(e)
            assert op_apply(pushforward(phi, a), g) == phi.push_function(op_apply(a, phi.pull_function(g)))


# -- D^1 family --------------------------------------------------------------------


def test_d1_examples():
    ident, zero = PolyDiffeo.identity(2), OneForm.zero(2)
    x = op("x1*x2*d1 + 3*d2 + x1^2", 2)
    f, xc = op_split(x)
    assert d1_automorphism(4, 0, zero, ident, x) == xc + DiffOp.from_poly(f.scale(4))
    assert d1_automorphism(1, 1, OneForm.zero(1), PolyDiffeo.identity(1), op("x1*d1")) == op("x1*d1 + 1")
    assert d1_automorphism(Fraction(2, 3), 5, zero, ident, DiffOp.identity(2)) == DiffOp.constant(2, Fraction(2, 3))
    with pytest.raises(OrderTooHighError):
        d1_automorphism(1, 0, zero, ident, op("d1^2", 2))
    with pytest.raises(ZeroKappaError):
        d1_automorphism(0, 0, zero, ident, x)


def test_d1_recovery_examples():
    p = d1_recover_parameters(lambda d: d1_automorphism(2, 0, OneForm.zero(1), PolyDiffeo.identity(1), d), 1)
    assert (p.kappa, p.lam, p.omega.is_zero(), p.phi.is_identity()) == (2, 0, True, True)
    p = d1_recover_parameters(lambda d: d1_automorphism(1, 1, OneForm.zero(1), PolyDiffeo.identity(1), d), 1)
    assert p.lam == 1 and p.kappa == 1


def test_d1_recovery_round_trip():
    rng = random.Random(103)
    for _ in range(15):
        n = rng.randint(1, 2)
        kappa, lam = sampling.random_kappa(rng), sampling.random_lambda(rng)
        omega, phi = sampling.random_closed_form(rng, n, 2), sampling.random_diffeo(rng, n)
        p = d1_recover_parameters(lambda d: d1_automorphism(kappa, lam, omega, phi, d), n)
        assert (p.kappa, p.lam, p.omega, p.phi) == (kappa, lam, omega, phi)


def test_bracket_breaking_map_not_in_family():
    # agrees with the identity on functions and coordinate fields, but squares x1 d1
    def broken(d):
        out = d
        f, xc = op_split(d)
        c = xc.coeff((1,))
        if c:
            out = out + DiffOp.from_poly(c * c)
        return out

    with pytest.raises(NotInFamilyError):
        d1_recover_parameters(broken, 1)
    assert not verify_automorphism(broken, "D1", 20, seed=2, n=1).passed


# -- S family ----------------------------------------------------------------------


def test_s_examples():
    assert s_automorphism(1, DX1, PolyDiffeo.identity(1), sym("xi1")) == sym("xi1 + 1")
    p = sym("x1*xi2^2 + xi1", 2)
    assert s_automorphism(1, OneForm.zero(2), PolyDiffeo.identity(2), p) == p
    phi = PolyDiffeo.triangular([RationalPoly.zero(2), poly("x1^2", 2)])
    f = poly("x1*x2 + 1")
    got = s_automorphism(3, sampling.random_closed_form(random.Random(1), 2, 2), phi, PolySymbol.from_poly(f))
    assert got == PolySymbol.from_poly(phi.push_function(f).scale(3))


def test_s_round_trip():
    rng = random.Random(107)
    for _ in range(8):
        n = rng.randint(1, 2)
        kappa = sampling.random_kappa(rng)
        omega, phi = sampling.random_closed_form(rng, n, 2), sampling.random_diffeo(rng, n)
        oracle = lambda p: s_automorphism(kappa, omega, phi, p)
        assert verify_automorphism(oracle, "S", 10, seed=3, n=n).passed
        r = s_recover_parameters(oracle, n)
        assert (r.kappa, r.omega, r.phi) == (kappa, omega, phi)


# -- D family ----------------------------------------------------------------------


def test_d_examples():
    d = op("x1*d2^2 + d1 - x2", 2)
    assert d_automorphism(0, OneForm.zero(2), PolyDiffeo.identity(2), d) == d
    f = op("x1^2 + 1")
    assert d_automorphism(1, OneForm.zero(1), PolyDiffeo.identity(1), f) == -f
    assert d_automorphism(1, OneForm.zero(1), PolyDiffeo.identity(1), op("x1*d1")) == op("x1*d1 + 1")


def test_d_recovery_examples():
    p = d_recover_parameters(lambda d: d_automorphism(1, OneForm.zero(1), PolyDiffeo.identity(1), d), 1)
    assert p.a == 1
    p = d_recover_parameters(lambda d: d_automorphism(0, DX1, PolyDiffeo.identity(1), d), 1)
    assert p.omega(op("d1")) == RationalPoly.constant(1, 1)
    omega = OneForm.exact(poly("x1*x2"))
    phi = PolyDiffeo.translation([1, -2])
    p = d_recover_parameters(lambda d: d_automorphism(1, omega, phi, d), 2)
    assert (p.a, p.omega, p.phi) == (1, omega, phi)


def test_d_family_bracket_and_recovery():
    rng = random.Random(109)
    for a in (0, 1):
        for _ in range(4):
            n = rng.randint(1, 2)
            omega, phi = sampling.random_closed_form(rng, n, 2), sampling.random_diffeo(rng, n)
            oracle = lambda d: d_automorphism(a, omega, phi, d)
            assert verify_automorphism(oracle, "D", 8, seed=4, n=n, coeff_degree=1).passed
            p = d_recover_parameters(oracle, n)
            assert (p.a, p.omega, p.phi) == (a, omega, phi)


def test_d_restricts_to_d1_family():
    # a D automorphism on D^1 is the D^1 member with kappa = (-1)^a, lambda = a
    omega = OneForm.exact(poly("x1^2 - x1"))
    phi = PolyDiffeo.translation([3])
    spec = recover("D1", lambda d: d_automorphism(1, omega, phi, d), 1)
    assert (spec.kappa, spec.lam) == (-1, 1)


# -- verification harness ------------------------------------------------------------


def test_verify_conjugation_passes():
    rep = verify_automorphism(conjugation_c, "D", 60, seed=5)
    assert rep.passed and rep.checks["bracket"] == 60


def test_verify_doubling_fails():
    rep = verify_automorphism(lambda d: d.scale(2), "D", 20, seed=6)
    assert not rep.passed and rep.first_failure[1] == "bracket"


def test_verify_d1_runs_h_checks():
    ident = PolyDiffeo.identity(2)
    rep = verify_automorphism(lambda d: d1_automorphism(2, 1, OneForm.zero(2), ident, d), "D1", 20, seed=7)
    assert rep.passed and rep.checks["H1-H4"] == 20


def test_verify_is_deterministic():
    a = verify_automorphism(lambda d: d.scale(2), "D", 10, seed=8).to_dict()
    b = verify_automorphism(lambda d: d.scale(2), "D", 10, seed=8).to_dict()
    assert a == b
    assert trial_rng(1, 2).random() == trial_rng(1, 2).random()


def test_autospec_invariants():
    with pytest.raises(ZeroKappaError):
        AutoSpec("S", 1, kappa=0, omega=OneForm.zero(1), phi=PolyDiffeo.identity(1))
    spec = AutoSpec("D", 1, a=1, omega=OneForm.zero(1), phi=PolyDiffeo.identity(1))
    assert spec.kappa == -1
    assert spec(op("x1")) == op("-x1")
