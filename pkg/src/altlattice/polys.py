"""Dense univariate polynomials with exact rational coefficients.

A polynomial is a list of coefficients in ascending order,
``[c0, c1, c2]`` meaning ``c0 + c1*t + c2*t**2``.  Coefficients are ints
or Fractions; results are always trimmed (no trailing zeros, ``[]`` is 0).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p) -> int:
    return len(trim(p)) - 1


def add(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def sub(p, q):
    return add(p, [-c for c in q])


def scale(p, k):
    return trim([k * c for c in p])


def mul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def power(p, n: int):
    result = [1]
    base = p
    while n:
        if n & 1:
            result = mul(result, base)
        base = mul(base, base)
        n >>= 1
    return result


def divmod_poly(p, q):
    """Quotient and remainder over the rationals."""
    q = trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(c) for c in trim(p)]
    lead = Fraction(q[-1])
    out = [Fraction(0)] * max(0, len(r) - len(q) + 1)
    while len(r) >= len(q) and r:
        k = r[-1] / lead
        shift = len(r) - len(q)
        out[shift] = k
        for i, c in enumerate(q):
            r[shift + i] -= k * c
        r = trim(r)
    return trim(out), r


def content(p) -> int:
    return reduce(math.gcd, (int(c) for c in p), 0)


def primitive(p):
    """Integer polynomial with coprime coefficients and positive leading term."""
    p = trim(p)
    if not p:
        return []
    den = reduce(lambda acc, c: acc * Fraction(c).denominator // math.gcd(acc, Fraction(c).denominator), p, 1)
    ints = [int(Fraction(c) * den) for c in p]
    g = content(ints)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def _pseudo_rem(p, q):
    p, q = trim(p), trim(q)
    lead = q[-1]
    while len(p) >= len(q) and p:
        shift = len(p) - len(q)
        top = p[-1]
        p = [c * lead for c in p]
        for i, c in enumerate(q):
            p[shift + i] -= top * c
        p = trim(p)
    return p


def gcd(p, q):
    """Primitive gcd of two integer polynomials (primitive remainder sequence)."""
    a, b = primitive(p), primitive(q)
    if degree(a) < degree(b):
        a, b = b, a
    while b:
        r = _pseudo_rem(a, b)
        a, b = b, primitive(r)
    return primitive(a) if a else []


def exact_div(p, q):
    """Quotient of integer polynomials; raises ArithmeticError on a remainder."""
    quot, rem = divmod_poly(p, q)
    if rem:
        raise ArithmeticError("polynomial division left a remainder")
    return quot


def horner(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc
