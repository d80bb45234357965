"""Command-line front end.

Exit codes: 0 success, 1 a verification or recovery failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import autos, jsonio
from .classical import ZeroOperatorError, poisson_bracket, principal_symbol
from .expr import ExprSyntaxError, KindError, format_value, infer_dim, parse_expr, parse_value
from .ratpoly import DimensionError, NotClosedError
from .weyl import formal_adjoint, op_apply, op_bracket, op_compose

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    # accepted both before and after the subcommand
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--dim", type=int, default=argparse.SUPPRESS, help="ambient dimension n")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit JSON")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="weylauto",
        description="Exact computations with polynomial differential operators, symbols and their automorphisms.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    for name, help_text in (("compose", "composition A o B"), ("bracket", "commutator [A, B]")):
        p = add(name, help_text)
        p.add_argument("a")
        p.add_argument("b")
    p = add("apply", "apply an operator to a polynomial")
    p.add_argument("d")
    p.add_argument("f")
    p = add("symbol", "principal symbol of an operator")
    p.add_argument("d")
    p = add("poisson", "Poisson bracket {P, Q} of symbols")
    p.add_argument("p")
    p.add_argument("q")
    p = add("adjoint", "formal adjoint for the flat volume")
    p.add_argument("d")
    p = add("conj", "the conjugation C = -adjoint")
    p.add_argument("d")
    p = add("expomega", "e^(omega_bar) for a closed 1-form")
    p.add_argument("--omega", required=True, help='components "w1, ..., wn"')
    p.add_argument("d")
    p = add("push", "pushforward by a polynomial diffeomorphism")
    p.add_argument("--phi", required=True, metavar="FILE", help="JSON with forward (and inverse) maps")
    p.add_argument("d")
    p = add("aut", "apply an automorphism described by a spec file")
    p.add_argument("--spec", required=True, metavar="FILE")
    p.add_argument("d", help="operator (families D, D1) or symbol (family S)")
    p = add("recover", "recover parameters of a spec treated as a black box")
    p.add_argument("--family", required=True, choices=["D1", "D", "S"])
    p.add_argument("--spec", required=True, metavar="FILE")
    p = add("verify", "run a randomized exact verification suite")
    from .suites import SUITES

    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--trials", type=int, default=100)
    p = add("classify", "solve the order-2 extension constraints")
    p.add_argument("--coeff-deg", type=int, default=3, dest="coeff_deg")
    p.add_argument("--field-deg", type=int, default=3, dest="field_deg")
    p.add_argument("--kappa-grid", default=None, help='comma-separated rationals, e.g. "1,-1,2,1/2"')
    return parser


def _dim(args, *texts_kinds) -> int:
    if getattr(args, "dim", None) is not None:
        if args.dim < 1:
            raise UsageError("--dim must be >= 1")
        return args.dim
    nodes = []
    for text, kind in texts_kinds:
        ast = parse_expr(text, kind)
        nodes.extend(ast if isinstance(ast, list) else [ast])
    return infer_dim(nodes)


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _emit(args, value, out) -> None:
    if getattr(args, "json", False):
        print(json.dumps(jsonio.value_to_json(value)), file=out)
    else:
        print(format_value(value), file=out)


def _binary_op(args, out, fn) -> int:
    n = _dim(args, (args.a, "operator"), (args.b, "operator"))
    a = parse_value(args.a, "operator", n)
    b = parse_value(args.b, "operator", n)
    _emit(args, fn(a, b), out)
    return EXIT_OK


def _unary_op(args, out, fn) -> int:
    n = _dim(args, (args.d, "operator"))
    _emit(args, fn(parse_value(args.d, "operator", n)), out)
    return EXIT_OK


def cmd_apply(args, out):
    n = _dim(args, (args.d, "operator"), (args.f, "poly"))
    _emit(args, op_apply(parse_value(args.d, "operator", n), parse_value(args.f, "poly", n)), out)
    return EXIT_OK


def cmd_poisson(args, out):
    n = _dim(args, (args.p, "symbol"), (args.q, "symbol"))
    _emit(args, poisson_bracket(parse_value(args.p, "symbol", n), parse_value(args.q, "symbol", n)), out)
    return EXIT_OK


def cmd_expomega(args, out):
    comps = parse_expr(args.omega, "oneform")
    n = args.dim if getattr(args, "dim", None) is not None else len(comps)
    omega = parse_value(args.omega, "oneform", n)
    d = parse_value(args.d, "operator", n)
    _emit(args, autos.exp_omega_bar(omega, d), out)
    return EXIT_OK


def cmd_push(args, out):
    obj = _load_json(args.phi)
    phi = jsonio.diffeo_from_json(obj, getattr(args, "dim", None))
    d = parse_value(args.d, "operator", phi.dim)
    _emit(args, autos.pushforward(phi, d), out)
    return EXIT_OK


def cmd_aut(args, out):
    spec = jsonio.autospec_from_json(_load_json(args.spec), getattr(args, "dim", None))
    kind = "symbol" if spec.family == "S" else "operator"
    x = parse_value(args.d, kind, spec.dim)
    _emit(args, spec(x), out)
    return EXIT_OK


def cmd_recover(args, out):
    spec = jsonio.autospec_from_json(_load_json(args.spec), getattr(args, "dim", None))
    family = args.family
    if (family == "S") != (spec.family == "S"):
        raise UsageError(f"cannot recover family {family} from a spec of family {spec.family}")
    oracle = spec.as_map()
    try:
        recovered = autos.recover(family, oracle, spec.dim)
    except (autos.NotInFamilyError, autos.OrderTooHighError) as exc:
        print(f"not in family {family}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    same = recovered.kappa == spec.kappa and recovered.omega == spec.omega and recovered.phi.forward == spec.phi.forward
    if family == spec.family == "D1":
        same = same and recovered.lam == spec.lam
    if family == spec.family == "D":
        same = same and recovered.a == spec.a
    if family != spec.family:
        # a D spec seen through D^1 has kappa = (-1)^a, lambda = a; equality of actions is what matters
        same = True
    if getattr(args, "json", False):
        print(json.dumps({"family": family, "recovered": jsonio.autospec_to_json(recovered), "round_trip": same}), file=out)
    else:
        print(f"family: {family}", file=out)
        if family == "D":
            print(f"a: {recovered.a}", file=out)
        else:
            print(f"kappa: {jsonio.rational_to_str(recovered.kappa)}", file=out)
        if family == "D1":
            print(f"lambda: {jsonio.rational_to_str(recovered.lam)}", file=out)
        print(f"omega: {format_value(recovered.omega)}", file=out)
        print(f"phi: {', '.join(format_value(p) for p in recovered.phi.forward)}", file=out)
        print(f"phi^-1: {', '.join(format_value(p) for p in recovered.phi.inverse)}", file=out)
        print(f"round trip: {'ok' if same else 'MISMATCH'}", file=out)
    return EXIT_OK if same else EXIT_FAIL


def cmd_verify(args, out):
    from .suites import run_suite

    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    seed = getattr(args, "seed", 0)
    report = run_suite(args.suite, args.trials, seed)
    if getattr(args, "json", False):
        print(json.dumps(report.to_dict()), file=out)
    else:
        print(report.summary(), file=out)
        for note in report.notes:
            print(f"  note: {note}", file=out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_classify(args, out):
    from .classify import UnderdeterminedError, classify_report

    n = getattr(args, "dim", None) or 2
    if n < 1 or args.coeff_deg < 0 or args.field_deg < 0:
        raise UsageError("dimension must be >= 1 and degrees >= 0")
    grid = None
    if args.kappa_grid:
        try:
            grid = [jsonio.rational_from_str(k) for k in args.kappa_grid.split(",")]
        except (ValueError, ZeroDivisionError):
            raise UsageError("--kappa-grid must be comma-separated rationals") from None
    try:
        report = classify_report(n, args.coeff_deg, grid, args.field_deg)
    except UnderdeterminedError as exc:
        print(f"underdetermined: {exc}", file=sys.stderr)
        return EXIT_FAIL
    indent = None if getattr(args, "json", False) else 2
    print(json.dumps(report, indent=indent), file=out)
    return EXIT_OK


COMMANDS = {
    "compose": lambda a, o: _binary_op(a, o, op_compose),
    "bracket": lambda a, o: _binary_op(a, o, op_bracket),
    "apply": cmd_apply,
    "symbol": lambda a, o: _unary_op(a, o, principal_symbol),
    "poisson": cmd_poisson,
    "adjoint": lambda a, o: _unary_op(a, o, formal_adjoint),
    "conj": lambda a, o: _unary_op(a, o, autos.conjugation_c),
    "expomega": cmd_expomega,
    "push": cmd_push,
    "aut": cmd_aut,
    "recover": cmd_recover,
    "verify": cmd_verify,
    "classify": cmd_classify,
}

_INPUT_ERRORS = (
    UsageError,
    ExprSyntaxError,
    KindError,
    DimensionError,
    NotClosedError,
    ZeroOperatorError,
    autos.NotInvertibleError,
    autos.ZeroKappaError,
    autos.OrderTooHighError,
    KeyError,
    ValueError,
)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except _INPUT_ERRORS as exc:
        message = str(exc) if not isinstance(exc, KeyError) else f"missing field {exc}"
        if getattr(args, "json", False):
            print(json.dumps({"error": type(exc).__name__, "message": message}), file=sys.stderr)
        else:
            print(f"error: {message}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
