#!/usr/bin/env python3
"""A tour of the free graded Lie algebra layer.

Elements live inside the tensor algebra; the graded commutator and the
left-normed bracketing map do all the sign bookkeeping.  Everything is
exact rational arithmetic.
"""

from fractions import Fraction

from lietower import (
    GeneratorSet,
    ad_power,
    dynkin,
    graded_bracket,
    is_lie_element,
    lie_basis,
    lie_dim,
    parse_element,
    pbw_euler_check,
)

# Two even generators: the classical setting.
XY = GeneratorSet(["x", "y"], [0, 0])
x = parse_element(XY, "x")
y = parse_element(XY, "y")

print("== brackets in the tensor algebra ==")
print("[x, y]            =", graded_bracket(x, y).pretty())
print("[x, x]            =", graded_bracket(x, x).pretty(), "(even self-brackets vanish)")

# One odd generator: the self-bracket survives.
A = GeneratorSet(["a"], [1])
a = parse_element(A, "a")
print("[a, a], |a| = 1   =", graded_bracket(a, a).pretty(), "(odd self-brackets do not)")
print("(1/2)*[a, a]      =", parse_element(A, "(1/2)*[a,a]").pretty())

print()
print("== the bracketing certificate ==")
w = graded_bracket(x, graded_bracket(x, y))
print("w = [x, [x, y]]   =", w.pretty())
print("dynkin(w) == 3w?  ", dynkin(w) == Fraction(3) * w)
print("is_lie_element(x.y)?", is_lie_element(parse_element(XY, "x") .concat(y)))

print()
print("== dimensions of the graded pieces ==")
print("lengths 1..6 on two even generators:",
      [lie_dim(XY, n, 0) for n in range(1, 7)], "(necklace counts)")
print("lengths 1..4 on one odd generator:  ",
      [lie_dim(A, n, n) for n in range(1, 5)], "([a,[a,a]] dies by the graded Jacobi identity)")

basis = lie_basis(XY, 3, 0)
print("echelon basis at length 3:", "; ".join(b.pretty() for b in basis))

print()
print("== the Poincare-series identity ==")
mixed = GeneratorSet(["x", "a"], [0, 1])
print("tensor algebra = graded-symmetric algebra on the Lie pieces,",
      "coefficientwise up to (length 5, degree 8):",
      pbw_euler_check(mixed, 5, 8))

print()
print("== iterated adjoints ==")
R = GeneratorSet(["x", "y", "z"], [0, 0, 1])
yz = ad_power(parse_element(R, "y"), parse_element(R, "z"), 2)
print("ad_y^2(z) =", yz.pretty())
