"""Exact rational checks of exponent conditions.

Each condition system returns every violated condition with its slack.
Passing tuples can be reduced to the scalar estimates they rest on.
"""
from divfree_strichartz.exponents import (INF, SELECTORS, ExponentTuple, check,
                                          enumerate_exponents, reduced_tuple,
                                          taggart_reduction)

good = ExponentTuple.build("wave_system", 2, q="8", r="8", qt="inf", s="5/8", k="5/8")
bad = ExponentTuple.build("wave_system", 2, q="4", r="4", qt="inf", s="0", k="0")
for t in (good, bad):
    res = check(t)
    print(t, "->", "pass" if res.passed else "fail")
    for v in res.violations:
        print("   ", v.name, "slack", v.slack)

# reduce to the scalar estimate through the alpha selection
choice = SELECTORS["wave_system"](good)
print("alpha", choice.alpha, "->", reduced_tuple(good, choice))

# the (inf, 2) endpoint for the three-dimensional inhomogeneous estimate
t = ExponentTuple("inhomo_wave3d", 3, q=INF, r=2, qt=INF, k="1/2")
red = reduced_tuple(t, SELECTORS["inhomo_wave3d"](t))
r1, rt1 = taggart_reduction(red)
print(red, f"split: r1={r1}, rt1={rt1}")

# every passing tuple on a small rational grid
tuples = enumerate_exponents("schrodinger", 2, max_denominator=6)
print(len(tuples), "passing Schrodinger tuples in 2D with denominators <= 6")
print("largest k:", max(t.k for t in tuples))
