"""Even-a evaluation through Jacobi's dn, and the (10, 1) case study.

For even a and gcd(a, b) = 1,

    F_(a,b)(x) = (pi/(a x)) sum_{j<a} cos(pi (2j+1) b / a) log dn((2j+1) K / a)

with x = K/K'.  dn is computed from its nome product; the duplication
map and the exact polynomial built from it serve as a verification path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpc, mpf

from altlattice import polys
from altlattice.numerics import (
    ConsistencyError,
    ConvergenceError,
    DomainError,
    EllipticContext,
    PrecisionContext,
    context_from_alpha,
    to_mpf,
)
from altlattice.sums import Evaluation, Method

_MAX_FACTORS = 10**6


def _dn_product(u, ectx: EllipticContext, ctx: PrecisionContext):
    """dn(u) and the number of product factors used.

    dn(u) = (1-alpha)**(1/4) prod_{n>=1} (1 + 2 q**(2n-1) cos 2v + q**(4n-2))
                                       / (1 - 2 q**(2n-1) cos 2v + q**(4n-2)),
    v = pi u / (2K).  Complex u is folded into |Im u| <= K' first, using
    dn(u + 2iK') = -dn(u).
    """
    with ctx.workdps():
        sign = 1
        if isinstance(u, (mpc, complex)):
            u = mpc(u)
            period = 2 * ectx.bigKprime
            shift = int(mpmath.nint(u.imag / period))
            if shift:
                u -= mpc(0, shift * period)
                sign = -1 if shift % 2 else 1
            if u.imag == 0:
                u = u.real
        else:
            u = to_mpf(u, ctx)
        q = ectx.q
        c2 = 2 * mpmath.cos(mpmath.pi * u / ectx.bigK)
        bound = abs(c2) + 2
        tau = ctx.tau
        prod = mpf(1)
        qn = q
        count = 0
        while qn * bound >= tau:
            qq = qn * qn
            prod *= (1 + c2 * qn + qq) / (1 - c2 * qn + qq)
            qn *= q * q
            count += 1
            if count > _MAX_FACTORS:
                raise ConvergenceError("dn product did not converge")
        return sign * mpmath.root(ectx.alpha_c, 4) * prod, max(count, 1)


def dn_q_product(u, ectx: EllipticContext, ctx: PrecisionContext):
    """Jacobi dn(u) for the modulus in ``ectx``; real or complex ``u``."""
    return _dn_product(u, ectx, ctx)[0]


@dataclass(frozen=True)
class DnValue:
    """dn(j K / a) together with the context it was computed in."""

    j: int
    a: int
    value: mpf
    ectx: EllipticContext


def dn_value(j: int, a: int, ectx: EllipticContext, ctx: PrecisionContext) -> DnValue:
    with ctx.workdps():
        return DnValue(j, a, dn_q_product(j * ectx.bigK / a, ectx, ctx), ectx)


def dup_map(x, alpha):
    """The rational map with dn(2z) = dup_map(dn(z)).

    Pure arithmetic, so Fractions give exact results and mpf/mpc inputs
    are evaluated at the caller's precision.
    """
    t = x * x
    p = (t - 1) * (1 + (t - 1) / alpha)
    den = t - p
    if den == 0:
        raise DomainError("duplication map has a pole at this argument")
    return (t + p) / den


@dataclass(frozen=True)
class DnReduced:
    """``(1-alpha)**kprime_exp * d_index**power`` with ``d_k = dn(k K / a)``.

    ``index`` is None when no dn factor remains.
    """

    index: int | None
    power: int
    kprime_exp: Fraction
    a: int

    def __str__(self):
        parts = []
        if self.kprime_exp:
            parts.append(f"(1-alpha)^({self.kprime_exp})")
        if self.index is not None:
            d = f"d{self.index}"
            parts.append(d if self.power == 1 else f"1/{d}")
        if not parts:
            return "1"
        if len(parts) == 2 and self.power == -1:
            return f"{parts[0]}/d{self.index}"
        return "*".join(parts)


def dn_symmetry_reduce(j: int, a: int) -> DnReduced:
    """Rewrite dn(j K / a) through the real symmetries of dn.

    Uses d_{2a-j} = d_j, d_{a-j} = sqrt(1-alpha)/d_j, d_{a/2} = (1-alpha)**(1/4),
    d_0 = 1 and d_a = sqrt(1-alpha); the remaining index is below a/2.
    """
    if a < 2 or a % 2:
        raise DomainError("dn_symmetry_reduce needs an even a >= 2")
    j %= 2 * a
    if j > a:
        j = 2 * a - j
    if j == 0:
        return DnReduced(None, 0, Fraction(0), a)
    if j == a:
        return DnReduced(None, 0, Fraction(1, 2), a)
    if 2 * j == a:
        return DnReduced(None, 0, Fraction(1, 4), a)
    if 2 * j > a:
        return DnReduced(a - j, -1, Fraction(1, 2), a)
    return DnReduced(j, 1, Fraction(0), a)


def _as_context(alpha, ctx) -> EllipticContext:
    if isinstance(alpha, EllipticContext):
        return alpha
    return context_from_alpha(alpha, ctx)


def dn_sum_coefficients(a: int, b: int):
    """Coefficients of the reduced even-a formula.

    Returns ``(dn_coeffs, kprime_coeff)`` with

        (a x / pi) F_(a,b)(x) = sum_k dn_coeffs[k] log d_k + kprime_coeff log(1 - alpha)

    where d_k = dn(k K / a).  Coefficients are mpf at the current precision.
    """
    coeffs: dict[int, mpf] = {}
    kprime = mpf(0)
    for j in range(a):
        c = mpmath.cos(mpmath.pi * (2 * j + 1) * b / a)
        red = dn_symmetry_reduce(2 * j + 1, a)
        if red.kprime_exp:
            kprime += c * red.kprime_exp
        if red.index is not None:
            coeffs[red.index] = coeffs.get(red.index, 0) + c * red.power
    return coeffs, kprime


def eval_dn_sum(a: int, b: int, alpha, ctx: PrecisionContext) -> Evaluation:
    """F_(a,b)(x) for even a at x = K/K' from dn values.

    ``alpha`` is the parameter k**2 in (0, 1) or a prebuilt EllipticContext
    (preferred when starting from x, as it carries 1 - alpha exactly).
    """
    if a < 2 or a % 2:
        raise DomainError("the dn formula needs an even a >= 2")
    if math.gcd(a, b) != 1:
        raise DomainError(f"gcd(a, b) must be 1, got a={a}, b={b}")
    with ctx.workdps():
        ectx = _as_context(alpha, ctx)
        coeffs, kprime = dn_sum_coefficients(a, b)
        work = 0
        total = kprime * mpmath.log(ectx.alpha_c)
        for k, c in coeffs.items():
            d, used = _dn_product(k * ectx.bigK / a, ectx, ctx)
            work += used
            total += c * mpmath.log(d)
        value = mpmath.pi / (a * ectx.x) * total
        return Evaluation(value, Method.JACOBI, ctx.digits, max(work, 1))


def f10_1_decomposition(alpha, ctx: PrecisionContext) -> mpf:
    """F_(10,1)(x) assembled from d1 = dn(K/10) and d3 = dn(3K/10).

    (5x/pi) F_(10,1) = sqrt((5+sqrt5)/2) log d1 + sqrt((5-sqrt5)/2) log d3
                       - ((cos(pi/10) + cos(3 pi/10))/2) log(1-alpha)
    """
    with ctx.workdps():
        ectx = _as_context(alpha, ctx)
        d1 = dn_q_product(ectx.bigK / 10, ectx, ctx)
        d3 = dn_q_product(3 * ectx.bigK / 10, ectx, ctx)
        s5 = mpmath.sqrt(5)
        c1, c3 = mpmath.cospi(mpf(1) / 10), mpmath.cospi(mpf(3) / 10)
        body = (mpmath.sqrt((5 + s5) / 2) * mpmath.log(d1)
                + mpmath.sqrt((5 - s5) / 2) * mpmath.log(d3)
                - (c1 + c3) / 2 * mpmath.log(ectx.alpha_c))
        return mpmath.pi / (5 * ectx.x) * body


def printed_10_example(alpha, ctx: PrecisionContext) -> mpf:
    """The d1/d3 decomposition as it is printed for (a, b) = (10, 1).

    (pi/(5x)) [sqrt((5-sqrt5)/2) log d1 - sqrt((5+sqrt5)/2) log d3
               + (sqrt(5-2 sqrt5)/4) log(1-alpha)]

    Numerically this is F_(10,3)(x), not F_(10,1)(x); kept verbatim so the
    discrepancy stays visible.
    """
    with ctx.workdps():
        ectx = _as_context(alpha, ctx)
        d1 = dn_q_product(ectx.bigK / 10, ectx, ctx)
        d3 = dn_q_product(3 * ectx.bigK / 10, ectx, ctx)
        s5 = mpmath.sqrt(5)
        body = (mpmath.sqrt((5 - s5) / 2) * mpmath.log(d1)
                - mpmath.sqrt((5 + s5) / 2) * mpmath.log(d3)
                + mpmath.sqrt(5 - 2 * s5) / 4 * mpmath.log(ectx.alpha_c))
        return mpmath.pi / (5 * ectx.x) * body


DN_2K5_RADICAL = "(1+sqrt(5)+2*sqrt(2+sqrt(5))-sqrt(2*(5+sqrt(5))))/4"
DN_6K5_RADICAL = "(1+sqrt(5)-2*sqrt(2+sqrt(5))+sqrt(2*(5+sqrt(5))))/4"


def dn_fifth_values(ectx: EllipticContext, ctx: PrecisionContext):
    """dn(2K/5) and dn(6K/5) at alpha = 1/2, checked against their radicals."""
    from altlattice.expr import parse_const_expr

    with ctx.workdps():
        if abs(ectx.alpha - mpf(1) / 2) > ctx.eps:
            raise DomainError("the radical forms hold only for alpha = 1/2")
        d4 = dn_q_product(2 * ectx.bigK / 5, ectx, ctx)
        d12 = dn_q_product(6 * ectx.bigK / 5, ectx, ctx)
        for value, text in ((d4, DN_2K5_RADICAL), (d12, DN_6K5_RADICAL)):
            expected = parse_const_expr(text).evaluate(ctx)
            if abs(value - expected) > ctx.eps:
                raise ConsistencyError(f"dn value {value} does not match {text}")
        return d4, d12


@dataclass(frozen=True)
class DupPolynomial:
    """Integer polynomial in X with only even powers.

    ``coeffs[i]`` multiplies ``X**(2*i)``.  ``cofactor`` is what the
    rationalised numerator leaves after division (also even in X).
    """

    coeffs: tuple
    degree: int
    alpha: Fraction
    cofactor: tuple = ()

    def __call__(self, X):
        return polys.horner(self.coeffs, X * X)

    def x_coeffs(self) -> list:
        """Ascending coefficients in X, odd powers included as zeros."""
        out = []
        for c in self.coeffs:
            out.extend((c, 0))
        return out[:-1]


def _duplication_step(s_num, s_den, alpha: Fraction):
    # f(y) as polynomials in t = X**2, given y**2 = s_num/s_den; f(y) = N(y**2)/D(y**2)
    inv = 1 / alpha
    big_n = [inv - 1, 2 - 2 * inv, inv]          # s + (s-1) + (s-1)**2/alpha
    big_d = [1 - inv, 2 * inv, -inv]             # 1 - (s-1)**2/alpha
    basis = [polys.mul(s_den, s_den), polys.mul(s_num, s_den), polys.mul(s_num, s_num)]

    def combine(cs):
        out = []
        for c, b in zip(cs, basis):
            out = polys.add(out, polys.scale(b, c))
        return out

    return combine(big_n), combine(big_d)


def _iterates(alpha: Fraction, depth: int):
    """[(num, den)] of f, f(f), ... as polynomials in t = X**2."""
    levels = []
    s_num, s_den = [0, 1], [1]
    for _ in range(depth):
        num, den = _duplication_step(s_num, s_den, alpha)
        levels.append((num, den))
        s_num, s_den = polys.mul(num, num), polys.mul(den, den)
    return levels


def _norm_numerator(first, other, alpha: Fraction):
    # numerator of f(X) * g(X) - sqrt(1 - alpha), times its conjugate
    a = polys.mul(first[0], other[0])
    b = polys.mul(first[1], other[1])
    return polys.primitive(polys.sub(polys.mul(a, a), polys.scale(polys.mul(b, b), 1 - alpha)))


def _lemniscatic_conjugates(ctx: PrecisionContext):
    # dn(z K/10)**2 over Gaussian z = 1 + 2(m + n i) prime to 5, at alpha = 1/2
    ectx = context_from_alpha(mpf(1) / 2, ctx)
    roots = []
    with ctx.workdps():
        for m in range(10):
            for n in range(20):
                if ((1 + 2 * m) ** 2 + 4 * n * n) % 5 == 0:
                    continue
                u = mpc(ectx.bigK * (1 + 2 * m), 2 * n * ectx.bigKprime) / 10
                t = dn_q_product(u, ectx, ctx) ** 2
                if all(abs(t - r) > mpf(10) ** (-ctx.digits // 2) for r in roots):
                    roots.append(t)
    return roots


def _integer_poly_from_roots(roots, ctx):
    with ctx.workdps():
        coeffs = [mpc(1)]
        for r in roots:
            # multiply by (1 - t/r): constant term stays 1
            inv = -1 / r
            nxt = coeffs + [mpc(0)]
            for i in range(len(coeffs)):
                nxt[i + 1] += inv * coeffs[i]
            coeffs = nxt
        out = []
        for c in coeffs:
            k = int(mpmath.nint(c.real))
            if abs(c - k) > mpf("1e-6"):
                raise ConsistencyError("conjugate product does not have integer coefficients")
            out.append(k)
        return out


def build_d1d3_polynomial(alpha=Fraction(1, 2)) -> DupPolynomial:
    """Integer polynomial with roots dn(K/10) and dn(3K/10).

    Expands the numerator of f(X) f(f(f(X))) - sqrt(1-alpha) exactly and
    rationalises it against its conjugate.  The factor shared with
    f(X) f(f(X)) - sqrt(1-alpha), whose roots are dn((2k+1)K/6) and
    dn(K/2), is divided out exactly.  At alpha = 1/2 the quotient is
    further split: the factor through dn(K/10) is rebuilt from its
    conjugates dn(zK/10) and its exact divisibility is checked.
    """
    try:
        alpha = Fraction(alpha)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"alpha must be rational, got {alpha!r}") from exc
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    levels = _iterates(alpha, 3)
    full = _norm_numerator(levels[0], levels[2], alpha)
    sixth = _norm_numerator(levels[0], levels[1], alpha)
    common = polys.gcd(full, sixth)
    reduced = polys.primitive(polys.exact_div(full, common))
    if alpha != Fraction(1, 2):
        return DupPolynomial(tuple(reduced), 2 * polys.degree(reduced), alpha)
    ctx = PrecisionContext(90)
    factor = _integer_poly_from_roots(_lemniscatic_conjugates(ctx), ctx)
    factor = polys.primitive(factor)
    cofactor = polys.primitive(polys.exact_div(reduced, factor))
    return DupPolynomial(tuple(factor), 2 * polys.degree(factor), alpha, tuple(cofactor))


def rationalised_numerator(alpha=Fraction(1, 2)) -> list:
    """The full rationalised numerator of f(X) f(f(f(X))) - sqrt(1-alpha), in t = X**2."""
    alpha = Fraction(alpha)
    levels = _iterates(alpha, 3)
    return _norm_numerator(levels[0], levels[2], alpha)


eval_theorem3 = eval_dn_sum
