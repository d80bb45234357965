from fractions import Fraction

import pytest

from weylauto import sampling
from weylauto.autos import conjugation_c, trial_rng, verify_automorphism
from weylauto.classify import (
    Admissible,
    TruncatedSpace,
    build_order2_constraints,
    classify_report,
    extract_psi,
    gl_invariance_check,
    lambda_candidates,
    pairing_polynomial,
    psi_pairing_form,
    reconstruct_action,
    solve_admissible,
    solve_values,
    symbolic_roots,
    t_table,
)
from weylauto.ratpoly import RationalPoly

EXPECTED = {(1, 0, 0, 0), (-1, 1, 1, -1)}
GRID = [1, -1, 2, Fraction(1, 2), -2]


def _tuples(found):
    return {a.as_tuple() for a in found}


def test_identity_parameters_consistent():
    system = build_order2_constraints(1, 0, TruncatedSpace(2, 3))
    assert system.is_consistent()
    sol = system.solve()
    assert sol[("c", 1)] == 0 and sol[("c", 2)] == 0


def test_conjugation_parameters_consistent():
    system = build_order2_constraints(-1, 1, TruncatedSpace(2, 3))
    assert system.is_consistent()
    sol = system.solve()
    assert (sol[("c", 1)], sol[("c", 2)]) == (1, -1)


def test_violating_first_condition_is_inconsistent():
    # kappa = 2, lambda = 0 has 1 - kappa != 2 lambda
    system = build_order2_constraints(2, 0, TruncatedSpace(2, 3))
    assert not system.is_consistent()
    assert system.failed_rows()


def test_solve_admissible_examples():
    assert _tuples(solve_admissible(TruncatedSpace(2, 3), GRID)) == EXPECTED


def test_solve_admissible_n1_needs_cubic_fields():
    assert _tuples(solve_admissible(TruncatedSpace(1, 3, field_degree=3), GRID)) == EXPECTED
    # with quadratic fields only the one-dimensional truncation admits extra tuples
    loose = _tuples(solve_admissible(TruncatedSpace(1, 3, field_degree=2), sampling.KAPPA_GRID))
    assert EXPECTED < loose


def test_lambda_candidates_follow_first_condition():
    space = TruncatedSpace(2, 2)
    for kappa in (Fraction(3), Fraction(-2), Fraction(1, 2)):
        cands = lambda_candidates(space, kappa)
        assert cands is not None
        assert cands <= {(1 - kappa) / 2}


def test_symbolic_roots():
    assert symbolic_roots() == EXPECTED
    # hand algebra: 1 - kappa = 2 lam, c1 = lam, c2 = -lam, c2 = lam^2 / kappa
    for kappa, lam, c1, c2 in symbolic_roots():
        assert 1 - kappa == 2 * lam and c1 == lam and c1 + c2 == 0
        assert c2 == Fraction(lam * lam) / kappa


@pytest.mark.parametrize("n,d", [(1, 2), (1, 3), (2, 2), (2, 3)])
def test_classification_stable(n, d):
    assert _tuples(solve_admissible(TruncatedSpace(n, d), sampling.KAPPA_GRID)) == EXPECTED


def test_rows_satisfied_by_identity_and_conjugation():
    for n in (1, 2):
        space = TruncatedSpace(n, 2)
        for kappa, lam, phi in ((1, 0, lambda d: d), (-1, 1, conjugation_c)):
            values = extract_psi(phi, kappa, space)
            assert build_order2_constraints(kappa, lam, space).residual(values) == []


def test_solution_matches_extracted_values():
    space = TruncatedSpace(2, 2)
    for kappa, lam, phi in ((1, 0, lambda d: d), (-1, 1, conjugation_c)):
        extracted = extract_psi(phi, kappa, space)
        solved = solve_values(kappa, lam, space)
        assert solved[("c", 1)] == extracted[("c", 1)]
        assert solved[("c", 2)] == extracted[("c", 2)]


def _mixed_sampler(n):
    def sample(rng):
        a = sampling.random_op(rng, n, 1, 2)
        b = sampling.random_op(rng, n, rng.randint(1, 2), 2)
        return a, b

    return sample


def test_reconstructed_actions_are_automorphisms():
    n = 2
    space = TruncatedSpace(n, 2)
    for a in solve_admissible(space, sampling.KAPPA_GRID):
        values = solve_values(a.kappa, a.lam, space)
        phi = reconstruct_action(a.kappa, values, n)
        rep = verify_automorphism(phi, "D", 30, seed=11, n=n, sampler=_mixed_sampler(n))
        assert rep.passed, (a, rep.failures)
    # kappa = -1 reconstruction acts as C on D^2
    phi = reconstruct_action(-1, solve_values(-1, 1, space), n)
    for t in range(20):
        d = sampling.random_op(trial_rng(12, t), n, 2, 2)
        assert phi(d) == conjugation_c(d)


def test_pairing_tables_of_solutions():
    n = 2
    space = TruncatedSpace(n, 2)
    for kappa, lam, c1, c2 in EXPECTED:
        table = t_table(extract_psi(lambda d: d if kappa == 1 else conjugation_c(d), kappa, space))
        candidate = {k: psi_pairing_form(table, n, k) for k in (1, 2)}
        assert gl_invariance_check(candidate, n)
        assert candidate[1] == pairing_polynomial(n, 1).scale(c1)
        assert candidate[2] == pairing_polynomial(n, 2).scale(c2)


def test_gl_invariance_examples():
    n = 2
    v = [RationalPoly.variable(2 * n, i) for i in range(2 * n)]
    pair = v[0] * v[2] + v[1] * v[3]
    assert gl_invariance_check({1: pair}, n)
    assert gl_invariance_check({2: pair * pair}, n)
    norms = (v[0] * v[0] + v[1] * v[1]) * (v[2] * v[2] + v[3] * v[3])
    assert not gl_invariance_check({2: norms}, n)
    # Y orthogonal to eta: the pairing vanishes, the O(n) invariant does not
    point = [1, 0, 0, 1]
    assert pair.evaluate(point) == 0 and norms.evaluate(point) == 1


def test_report_shape():
    rep = classify_report(2, 2)
    assert rep["n"] == 2 and rep["coeff_degree"] == 2
    assert {(Fraction(a["kappa"]), Fraction(a["lambda"]), Fraction(a["c1"]), Fraction(a["c2"])) for a in rep["admissible"]} == EXPECTED
    assert rep["conditions"]


def test_admissible_tuple():
    a = Admissible(Fraction(1), Fraction(0), Fraction(0), Fraction(0))
    assert a.as_tuple() == (1, 0, 0, 0)
    with pytest.raises(ValueError):
        TruncatedSpace(2, 3, order=3)
