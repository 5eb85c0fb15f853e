"""Independent reference computations used as test oracles.

Nothing here imports the library's own arithmetic for the quantity being
checked: Bernoulli data comes from sympy, ideals are enumerated as sets, and
Newton polygons are built from raw valuations.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import sympy
from sympy.functions.combinatorial.numbers import jacobi_symbol
from sympy.ntheory import factorint

FUNDAMENTAL_DISCRIMINANTS = [-3, -4, -7, -8, -11, -15, -19, -20, -23, -24, -31, -35, -39, -40,
                             5, 8, 12, 13, 17, 21, 24, 28, 29, 33, 37, 40]


def _q(x) -> Fraction:
    x = sympy.Rational(x)
    return Fraction(int(x.p), int(x.q))


def bernoulli_poly_at(m: int, x: Fraction) -> Fraction:
    return _q(sympy.bernoulli(m, sympy.Rational(x.numerator, x.denominator)))


def kronecker_symbol(D: int, n: int) -> int:
    """(D/n) for n >= 1."""
    out = 1
    for q, e in factorint(n).items():
        if q == 2:
            k = 0 if D % 2 == 0 else (1 if D % 8 in (1, 7) else -1)
        else:
            k = jacobi_symbol(D % q, q)
        out *= k ** e
    return out


def quadratic_bernoulli(D: int, m: int) -> Fraction:
    f = abs(D)
    return Fraction(f) ** (m - 1) * sum(kronecker_symbol(D, a) * bernoulli_poly_at(m, Fraction(a, f))
                                        for a in range(1, f + 1))


def zeta_at(m: int) -> Fraction:
    """zeta(1 - m) = -B_m(1) / m."""
    return -bernoulli_poly_at(m, Fraction(1)) / m


def quadratic_theta(D: int, S, T, m: int) -> list[Fraction]:
    """Theta_{S,T}(1-m) for Q(sqrt D) as [coefficient of 1, coefficient of sigma]."""
    L1 = zeta_at(m)
    Lc = -quadratic_bernoulli(D, m) / m
    for l in S:
        L1 *= 1 - Fraction(l) ** (m - 1)
        Lc *= 1 - kronecker_symbol(D, l) * Fraction(l) ** (m - 1)
    for l in T:
        L1 *= 1 - Fraction(l) ** m
        Lc *= 1 - kronecker_symbol(D, l) * Fraction(l) ** m
    return [(L1 + Lc) / 2, (L1 - Lc) / 2]


def cyclic_group_ring_mul(a, b, n: int, q: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[(i + j) % n] = (out[(i + j) % n] + x * y) % q
    return out


def ideal_as_set(gens, n: int, q: int) -> frozenset:
    """The ideal generated by gens in Z/q[Z/n], enumerated (tiny rings only)."""
    elems = {tuple([0] * n)}
    frontier = list(elems)
    shifts = []
    for g in gens:
        for k in range(n):
            shifts.append(tuple(g[(i - k) % n] % q for i in range(n)))
    while frontier:
        nxt = []
        for x in frontier:
            for s in shifts:
                y = tuple((a + b) % q for a, b in zip(x, s))
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(elems)


def newton_polygon_lambda(vals: list[float]) -> int:
    """Horizontal length of the strictly descending part of the lower hull."""
    pts = [(k, v) for k, v in enumerate(vals) if v != float("inf")]
    hull: list = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    lam = 0
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if y2 < y1:
            lam = x2
    return lam


def vandermonde_vp(nodes: list[Fraction], p: int) -> int:
    prod = sympy.Integer(1)
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            prod *= sympy.Rational(nodes[j] - nodes[i])
    num, den = sympy.fraction(prod)
    return sympy.multiplicity(p, num) - sympy.multiplicity(p, den)


def all_vectors(n: int, q: int):
    return product(range(q), repeat=n)
