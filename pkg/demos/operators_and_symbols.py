"""
Operators, brackets and symbols
===============================

Differential operators with polynomial coefficients, kept in normal order.
"""

from weylauto.classical import poisson_bracket, principal_symbol, symbol_compat_check
from weylauto.expr import parse_operator, parse_poly, parse_symbol
from weylauto.weyl import formal_adjoint, op_apply, op_bracket, op_compose

# composition moves every x to the left of every d
a = parse_operator("d1^2")
b = parse_operator("x1^2")
print("d1^2 o x1^2      =", op_compose(a, b))
print("[d1^2, x1^2]     =", op_bracket(a, b))

# operators act on polynomials
print("(x1*d1^2)(x1^3)  =", op_apply(parse_operator("x1*d1^2"), parse_poly("x1^3")))

# the adjoint for the flat volume
print("adjoint(x1*d1)   =", formal_adjoint(parse_operator("x1*d1")))

# the bracket drops the order by one, and the top part is the Poisson bracket of symbols
d1 = parse_operator("x2*d1^2 + d2", 2)
d2 = parse_operator("x1^2*d2", 2)
s1, s2 = principal_symbol(d1), principal_symbol(d2)
print("sigma(D1), sigma(D2) =", s1, ",", s2)
print("{sigma(D1), sigma(D2)} =", poisson_bracket(s1, s2))
print("sigma([D1, D2])        =", principal_symbol(op_bracket(d1, d2)))
print("compatibility:", symbol_compat_check(d1, d2))

# the canonical pair, squared
print("{xi1^2, x1} =", poisson_bracket(parse_symbol("xi1^2"), parse_symbol("x1")))
