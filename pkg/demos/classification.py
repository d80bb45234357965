"""
Order-2 extensions
==================

Which order-1 automorphisms (kappa on functions, X -> X + lam div X on fields)
extend to second-order operators?  Assemble the linear constraints on a
truncated space and solve them exactly.
"""

from weylauto.classify import TruncatedSpace, build_order2_constraints, classify_report, symbolic_roots

space = TruncatedSpace(dim=2, coeff_degree=3)
for kappa, lam in [(1, 0), (-1, 1), (2, 0), (3, -1)]:
    system = build_order2_constraints(kappa, lam, space)
    print(f"kappa={kappa:>2}, lambda={lam:>2}: consistent={system.is_consistent()}")

report = classify_report(2, 3)
print("rows:", report["rows"], "rank:", report["rank"])
for cond in report["conditions"]:
    print("condition:", " + ".join(f"{c}*({b})" for c, b in zip(cond["coefficients"], cond["basis"]) if c != "0"), "= 0")
print("admissible:", report["admissible"])

# the same two tuples by hand
for t in sorted(symbolic_roots()):
    print("by substitution:", tuple(str(v) for v in t))
