"""
Automorphisms and their recovery
================================

Build an automorphism of the operator algebra from its parameters, check it
preserves brackets, then read the parameters back from the map alone.
"""

from weylauto.autos import (
    OneForm,
    PolyDiffeo,
    conjugation_c,
    d_automorphism,
    d_recover_parameters,
    exp_omega_bar,
    verify_automorphism,
)
from weylauto.expr import parse_operator, parse_poly

n = 2
omega = OneForm.exact(parse_poly("x1*x2"))  # closed 1-form x2 dx1 + x1 dx2
phi = PolyDiffeo.triangular([parse_poly("0", n), parse_poly("x1^2", n)])  # (x1, x2 + x1^2)

# the conjugation C adds the divergence to a vector field and negates functions
print("C(x1*d1)  =", conjugation_c(parse_operator("x1*d1")))
print("C(x1^2)   =", conjugation_c(parse_operator("x1^2")))

# e^(omega_bar) shifts each d_i by omega_i
print("e^w(d1*d2) =", exp_omega_bar(omega, parse_operator("d1*d2")))


def auto(d):
    return d_automorphism(1, omega, phi, d)


print("Phi(d1)   =", auto(parse_operator("d1", n)))
print("Phi(x2)   =", auto(parse_operator("x2", n)))

report = verify_automorphism(auto, "D", trials=50, seed=1, n=n, coeff_degree=1)
print("bracket preserved on 50 random pairs:", report.passed)

params = d_recover_parameters(auto, n)
print("recovered a =", params.a)
print("recovered omega =", params.omega)
print("recovered phi =", params.phi)
print("round trip:", params.omega == omega and params.phi == phi)

# scaling by 2 is not an automorphism
print("D -> 2D passes:", verify_automorphism(lambda d: d.scale(2), "D", trials=20, seed=1).passed)
