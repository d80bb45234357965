"""Randomized exact verification suites.

Each suite takes ``(trials, seed)`` and returns a :class:`SuiteReport`.  Trial ``t``
draws everything from ``trial_rng(seed, t)``, so a report is reproducible and does
not depend on the order in which trials run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import sampling
from .autos import (
    AutoSpec,
    NotInFamilyError,
    PolyDiffeo,
    conjugation_c,
    conjugation_closed_form,
    conjugation_local,
    d1_recover_parameters,
    d_recover_parameters,
    exp_omega_bar,
    omega_bar,
    s_recover_parameters,
    trial_rng,
    twisted_operator,
    u_kappa,
    verify_automorphism,
)
from .classical import (
    PolySymbol,
    ad_nilpotency_probe,
    bracket_filtration_probe,
    full_symbol,
    hamiltonian_apply,
    nested_bracket,
    nested_poisson,
    poisson_bracket,
    principal_symbol,
    symbol_bracket_filtration_probe,
    symbol_compat_check,
)
from .ratpoly import RationalPoly, monomials_up_to
from .weyl import (
    NEG_INF,
    DiffOp,
    divergence,
    formal_adjoint,
    lie_derivative,
    lie_derivative_symbolic,
    op_bracket,
    op_compose,
)


@dataclass
class SuiteReport:
    suite: str
    trials: int
    seed: int
    failures: list = field(default_factory=list)  # (trial, check)
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, trial: int, name: str, ok: bool) -> bool:
        self.checks[name] = self.checks.get(name, 0) + 1
        if not ok:
            self.failures.append((trial, name))
        return ok

    def to_dict(self) -> dict:
        out = {
            "suite": self.suite,
            "trials": self.trials,
            "seed": self.seed,
            "passed": self.passed,
            "failures": [{"trial": t, "check": c} for t, c in self.failures],
            "checks": dict(self.checks),
        }
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        counts = ", ".join(f"{k}={v}" for k, v in self.checks.items())
        text = f"{self.suite}: {status} ({self.trials} trials, seed {self.seed}; {counts})"
        if self.failures:
            t, c = self.failures[0]
            text += f"; first failure: trial {t}, check {c}"
        return text


def _dim(rng) -> int:
    return rng.randint(1, 3)


def lemma_c(trials: int, seed: int) -> SuiteReport:
    """Characteristic properties of C = -adjoint, plus the independent evaluators."""
    rep = SuiteReport("lemma-C", trials, seed)
    for t in range(trials):
        rng = trial_rng(seed, t)
        n = _dim(rng)
        order = rng.randint(0, 4)
        d = sampling.random_op(rng, n, order, 3, 3)
        e = sampling.random_op(rng, n, rng.randint(0, 3), 3, 3)
        f = sampling.random_poly(rng, n, 3)
        x = sampling.random_vector_field(rng, n, 3).to_op()
        fop = DiffOp.from_poly(f)
        cd = conjugation_c(d)
        rep.check(t, "C(f)=-f", conjugation_c(fop) == -fop)
        rep.check(t, "C(X)=X+divX", conjugation_c(x) == x + DiffOp.from_poly(divergence(x)))
        rep.check(t, "C(D.f)=f.C(D)", conjugation_c(op_compose(d, fop)) == op_compose(fop, cd))
        rep.check(t, "C(D.X)=-C(X).C(D)", conjugation_c(op_compose(d, x)) == -op_compose(conjugation_c(x), cd))
        rep.check(t, "C^2=id", conjugation_c(cd) == d)
        rep.check(t, "C[D,E]=[CD,CE]", conjugation_c(op_bracket(d, e)) == op_bracket(cd, conjugation_c(e)))
        rep.check(t, "C=-adjoint", cd == -formal_adjoint(d) and cd == conjugation_closed_form(d))
        rep.check(t, "order-preserving", cd.order() == d.order())
        # single-term operator for the local shift formula
        alpha = rng.choice(monomials_up_to(n, 4))
        single = DiffOp.monomial(sampling.random_poly(rng, n, 3), alpha)
        rep.check(t, "C=local-shift", conjugation_local(single) == conjugation_c(single))
    return rep


def exp_omega(trials: int, seed: int) -> SuiteReport:
    """omega_bar is a lowering derivation; its exponential is a bracket automorphism."""
    rep = SuiteReport("exp-omega", trials, seed)
    for t in range(trials):
        rng = trial_rng(seed, t)
        n = _dim(rng)
        w = sampling.random_closed_form(rng, n, 2)
        w2 = sampling.random_closed_form(rng, n, 2)
        d = sampling.random_op(rng, n, rng.randint(0, 3), 2, 3)
        e = sampling.random_op(rng, n, rng.randint(0, 3), 2, 3)
        f = DiffOp.from_poly(sampling.random_poly(rng, n, 3))
        wd, we = omega_bar(w, d), omega_bar(w, e)
        rep.check(t, "lowering", wd.order() <= d.order() - 1)
        rep.check(t, "bracket-derivation", omega_bar(w, op_bracket(d, e)) == op_bracket(wd, e) + op_bracket(d, we))
        rep.check(t, "product-derivation", omega_bar(w, op_compose(d, e)) == op_compose(wd, e) + op_compose(d, we))
        rep.check(t, "linear-in-omega", omega_bar(w + w2.scale(2), d) == wd + omega_bar(w2, d).scale(2))
        ed, ee = exp_omega_bar(w, d), exp_omega_bar(w, e)
        rep.check(t, "automorphism", exp_omega_bar(w, op_bracket(d, e)) == op_bracket(ed, ee))
        rep.check(t, "identity-on-A", exp_omega_bar(w, f) == f)
        rep.check(t, "truncation-exact", exp_omega_bar(w, d, terms=max(d.order(), 0) + 1) == ed)
        rep.check(t, "ad-series=e^-f.D.e^f", ed == twisted_operator(w, d))
    return rep


def theorem1(trials: int, seed: int, nested: int = 50) -> SuiteReport:
    """sigma is multiplicative and bracket compatible (top component or 0)."""
    rep = SuiteReport("theorem1", trials, seed)
    branches = {"equal": 0, "zero": 0}
    for t in range(trials):
        rng = trial_rng(seed, t)
        n = _dim(rng)
        # every fifth pair has constant coefficients, where brackets of symbols vanish
        cdeg = 0 if t % 5 == 4 else rng.randint(0, 3)
        d1 = sampling.random_op(rng, n, rng.randint(0, 3), cdeg, 3)
        d2 = sampling.random_op(rng, n, rng.randint(0, 3), cdeg, 3)
        r = symbol_compat_check(d1, d2)
        branches[r.branch] += 1
        rep.check(t, "product", r.product_ok)
        rep.check(t, "bracket", r.bracket_ok)
        if t < nested:
            ops = [sampling.random_op(rng, n, rng.randint(0, 3), rng.randint(0, 2), 2) for _ in range(3)]
            expected = nested_poisson([principal_symbol(o) for o in ops])
            k = sum(o.order() for o in ops) - 2
            actual = full_symbol(nested_bracket(ops)).component(k)
            rep.check(t, "corollary-nested", actual == expected and nested_bracket(ops).order() <= k)
    rep.notes.append(f"branches: equal={branches['equal']}, zero={branches['zero']}")
    rep.check(-1, "both-branches-witnessed", trials < 5 or (branches["equal"] > 0 and branches["zero"] > 0))
    return rep


def lie_derivative_suite(trials: int, seed: int) -> SuiteReport:
    """L_X D via the bracket equals the normal-ordering symbol evaluator."""
    rep = SuiteReport("lie-derivative", trials, seed)
    for t in range(trials):
        rng = trial_rng(seed, t)
        n = _dim(rng)
        x = sampling.random_vector_field(rng, n, 3)
        d = sampling.random_op(rng, n, rng.randint(0, 4), 3, 3)
        rep.check(t, "bracket=symbolic", lie_derivative(x, d) == lie_derivative_symbolic(x, d))
    return rep


def _pair_sampler(n: int, order: int, cdeg: int) -> Callable:
    def sample(rng):
        return (sampling.random_op(rng, n, order, cdeg, 3), sampling.random_op(rng, n, order, cdeg, 3))

    return sample


def d1_family(trials: int, seed: int, draws: int = 20) -> SuiteReport:
    """Random D^1 automorphisms preserve brackets and are recovered exactly."""
    rep = SuiteReport("d1-family", trials, seed)
    for k in range(draws):
        rng = trial_rng(seed, -1 - k)
        n = _dim(rng)
        kappa, lam = sampling.random_kappa(rng), sampling.random_lambda(rng)
        w = sampling.random_closed_form(rng, n, 2)
        # odd draws keep phi = id so that the split equations H1-H4 apply
        phi = PolyDiffeo.identity(n) if k % 2 else sampling.random_diffeo(rng, n)
        spec = AutoSpec("D1", n, kappa=kappa, lam=lam, omega=w, phi=phi)
        vr = verify_automorphism(spec.as_map(), "D1", trials, seed * 1000 + k, n=n, coeff_degree=2)
        for name, count in vr.checks.items():
            rep.checks[name] = rep.checks.get(name, 0) + count
        rep.failures.extend((tr, f"{c}[draw {k}]") for tr, c in vr.failures)
        try:
            p = d1_recover_parameters(spec.as_map(), n)
            ok = (p.kappa, p.lam, p.omega, p.phi) == (kappa, lam, w, phi)
        except NotInFamilyError:
            ok = False
        rep.check(k, "recovery-round-trip", ok)
    return rep


def s_family(trials: int, seed: int, draws: int = 20) -> SuiteReport:
    """Random automorphisms of S preserve Poisson brackets; generators and S_0 behave."""
    rep = SuiteReport("s-family", trials, seed)
    for k in range(draws):
        rng = trial_rng(seed, -1 - k)
        n = _dim(rng)
        kappa = sampling.random_kappa(rng)
        w = sampling.random_closed_form(rng, n, 2)
        phi = sampling.random_diffeo(rng, n)
        spec = AutoSpec("S", n, kappa=kappa, omega=w, phi=phi)
        vr = verify_automorphism(spec.as_map(), "S", trials, seed * 1000 + k, n=n, max_order=2, coeff_degree=2)
        for name, count in vr.checks.items():
            rep.checks[name] = rep.checks.get(name, 0) + count
        rep.failures.extend((tr, f"{c}[draw {k}]") for tr, c in vr.failures)
        f = sampling.random_poly(rng, n, 3)
        rep.check(k, "S0-restriction", spec(PolySymbol.from_poly(f)) == PolySymbol.from_poly(phi.push_function(f).scale(kappa)))
        untwisted = AutoSpec("S", n, kappa=kappa, omega=w)
        gens = all(
            untwisted(PolySymbol.xi(n, i)) == PolySymbol.xi(n, i) + PolySymbol.from_poly(w.components[i])
            for i in range(n)
        )
        rep.check(k, "covector-translation", gens)
        try:
            p = s_recover_parameters(spec.as_map(), n)
            ok = (p.kappa, p.omega, p.phi) == (kappa, w, phi)
        except NotInFamilyError:
            ok = False
        rep.check(k, "recovery-round-trip", ok)
    return rep


def d_family(trials: int, seed: int, draws: int = 10) -> SuiteReport:
    """phi_* o C^a o e^(omega_bar) preserves brackets, is recovered, and induces U_(+-1)."""
    rep = SuiteReport("d-family", trials, seed)
    for a in (0, 1):
        for k in range(draws):
            rng = trial_rng(seed, f"{a}:{k}")
            n = rng.randint(1, 2)
            w = sampling.random_closed_form(rng, n, 1)
            phi = sampling.random_diffeo(rng, n)
            spec = AutoSpec("D", n, a=a, omega=w, phi=phi)
            vr = verify_automorphism(
                spec.as_map(), "D", trials, seed * 1000 + 100 * a + k, n=n, sampler=_pair_sampler(n, 2, 1)
            )
            for name, count in vr.checks.items():
                rep.checks[name] = rep.checks.get(name, 0) + count
            rep.failures.extend((tr, f"{c}[a={a}, draw {k}]") for tr, c in vr.failures)
            try:
                p = d_recover_parameters(spec.as_map(), n)
                ok = (p.a, p.omega, p.phi) == (a, w, phi)
            except NotInFamilyError:
                ok = False
            rep.check(k, "recovery-round-trip", ok)
            local = AutoSpec("D", n, a=a, omega=w)
            ops = [sampling.random_op(rng, n, rng.randint(0, 3), 2, 3) for _ in range(5)]
            induced = all(
                principal_symbol(local(d)) == u_kappa((-1) ** a, principal_symbol(d)) for d in ops
            )
            rep.check(k, "induced-symbol=U", induced)
    return rep


def poisson_axioms(trials: int, seed: int) -> SuiteReport:
    """Antisymmetry, Jacobi and Leibniz for the commutator and the Poisson bracket."""
    rep = SuiteReport("poisson-axioms", trials, seed)
    for t in range(trials):
        rng = trial_rng(seed, t)
        n = _dim(rng)
        a, b, c = (sampling.random_op(rng, n, rng.randint(0, 3), 3, 2) for _ in range(3))
        ab = op_bracket(a, b)
        rep.check(t, "weyl-antisymmetry", ab == -op_bracket(b, a))
        jac = op_bracket(a, op_bracket(b, c)) + op_bracket(b, op_bracket(c, a)) + op_bracket(c, ab)
        rep.check(t, "weyl-jacobi", not jac)
        rep.check(
            t,
            "weyl-leibniz",
            op_bracket(a, op_compose(b, c)) == op_compose(ab, c) + op_compose(b, op_bracket(a, c)),
        )
        rep.check(t, "weyl-filtration", ab.order() <= a.order() + b.order() - 1)
        p, q, r = (sampling.random_symbol(rng, n, rng.randint(0, 3), 3, 2) for _ in range(3))
        pq = poisson_bracket(p, q)
        rep.check(t, "poisson-antisymmetry", pq == -poisson_bracket(q, p))
        jac = poisson_bracket(p, poisson_bracket(q, r)) + poisson_bracket(q, poisson_bracket(r, p)) + poisson_bracket(r, pq)
        rep.check(t, "poisson-jacobi", not jac)
        rep.check(t, "poisson-leibniz", poisson_bracket(p, q * r) == pq * r + q * poisson_bracket(p, r))
        rep.check(t, "poisson-grading", pq.xi_degree() <= p.xi_degree() + q.xi_degree() - 1)
    return rep


def nilpotency(trials: int, seed: int, max_m: int = 5) -> SuiteReport:
    """The polynomial model is not distinguishing: ad of d_1 is nilpotent on polynomials.

    Also checks the forward filtration inclusions and that functions are
    locally nilpotent.
    """
    rep = SuiteReport("nilpotency", trials, seed)
    for n in (1, 2, 3):
        d1 = DiffOp.partial(n, 0)
        for m in range(max_m + 1):
            r = ad_nilpotency_probe(d1, m + 1, probe_degree=m)
            monos = {k: v for k, v in r.depths.items() if not k.startswith("d")}
            rep.check(-1, "ad_d1-vanishes-at-m+1", all(v is not None and v <= m + 1 for v in monos.values()))
            sharp = RationalPoly.variable(n, 0) ** m
            rep.check(-1, "depth-sharp", r.depths[str(sharp)] == m + 1)
        r = ad_nilpotency_probe(DiffOp.x(n, 0), 3)
        fields = {k: v for k, v in r.depths.items() if k.startswith("d")}
        funcs = {k: v for k, v in r.depths.items() if not k.startswith("d")}
        rep.check(-1, "function-nilpotent", all(v == 1 for v in funcs.values()) and fields["d1"] == 2)
    rep.notes.append("ad of d1 dies on every polynomial probe: the distinguishing property fails for polynomial coefficients")
    for t in range(trials):
        rng = trial_rng(seed, t)
        n = _dim(rng)
        p = sampling.random_constant_symbol(rng, n, rng.randint(1, 3))
        f = sampling.random_poly(rng, n, max_m)
        m = f.degree()
        iterated = PolySymbol.from_poly(f)
        for _ in range(m + 1):
            iterated = poisson_bracket(p, iterated)
        h = hamiltonian_apply(p, f, m + 1)
        rep.check(t, "hamiltonian=iterated-bracket", h == iterated)
        rep.check(t, "hamiltonian-vanishes", not h)
        d = sampling.random_op(rng, n, rng.randint(0, 3), 2, 3)
        k = d.order()
        try:
            fwd = bracket_filtration_probe(d, max(k - 1, -1))
        except AssertionError:
            fwd = False
        rep.check(t, "filtration-forward", fwd)
        if k is not NEG_INF and k >= 1:
            rep.check(t, "filtration-sharp", not bracket_filtration_probe(d, k - 2))
        s = sampling.random_symbol(rng, n, rng.randint(0, 3), 2, 3)
        top = s.xi_degree()
        try:
            sfwd = symbol_bracket_filtration_probe(s, max(top - 1, 0) if top is not NEG_INF else 0)
        except AssertionError:
            sfwd = False
        rep.check(t, "symbol-filtration-forward", sfwd)
    return rep


SUITES: dict = {
    "lemma-C": lemma_c,
    "exp-omega": exp_omega,
    "theorem1": theorem1,
    "d1-family": d1_family,
    "s-family": s_family,
    "d-family": d_family,
    "poisson-axioms": poisson_axioms,
    "nilpotency": nilpotency,
    "lie-derivative": lie_derivative_suite,
}


def run_suite(name: str, trials: int, seed: int) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(name)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    return SUITES[name](trials, seed)
