#!/usr/bin/env python3
"""The expression language that defines sprays, metrics and densities.

Expressions use the chart variables x1..xn, y1..yn, the operators + - * / ^
(integer powers), and the functions sqrt, sin, cos, exp, log, abs.  The same
parsed tree evaluates over plain floats and over jets, so one definition
feeds both point evaluation and the derivative engine.
"""

from spraylab import exprdsl
from spraylab.exprdsl import ExprSyntaxError, differentiate, evaluate, parse, pretty
from spraylab.jets import lift_point

SRC = "x2*y1^2/3 + x1*y1*y2/3"
ast = parse(SRC, n=2)
print(f"source:  {SRC}")
print(f"pretty:  {pretty(ast)}")

env = [1.0, 2.0, 1.0, 1.0]  # x = (1, 2), y = (1, 1)
print(f"value at x=(1,2), y=(1,1): {evaluate(ast, env)}")

d = differentiate(ast, 0)  # with respect to x1
print(f"d/dx1:   {pretty(d)}  ->  {evaluate(d, env)}")

print()
print("== the same tree over a jet carrier")
lifted = lift_point((1.0, 2.0, 1.0, 1.0), order=2)
j = evaluate(ast, lifted)
print(f"value        : {j.value}")
print(f"d/dy1        : {j.partial((0, 0, 1, 0))}")
print(f"d2/dy1dy2    : {j.partial((0, 0, 1, 1))}")

print()
print("== errors carry source locations")
for bad in ("y3", "x1**2", "x1 + * 2"):
    try:
        parse(bad, n=2)
    except ExprSyntaxError as e:
        print(f"  {bad!r}: {e}")

print()
print("== spray-definition documents")
doc = exprdsl.parse_spray_source(
    "dim = 2\n"
    "G1 = x2*y1^2/3 + x1*y1*y2/3\n"
    "G2 = x2*y1*y2/3 + x1*y2^2/3\n"
    "sigma = exp(x1)\n")
print(f"  dim = {doc.dim}, sigma = {pretty(doc.sigma)}, "
      f"{len(doc.coeffs)} coefficients")
