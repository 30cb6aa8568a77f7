"""Precision handling, error types and the complete elliptic integral.

Every routine in the package takes an explicit :class:`PrecisionContext`
and performs its arithmetic inside ``ctx.workdps()``.  mpmath is the
big-float provider; values returned are ``mpf``/``mpc`` at working
precision and are only rounded when printed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class ConvergenceError(ArithmeticError):
    """An adaptive series, product or continued fraction failed to settle."""


class ConsistencyError(ArithmeticError):
    """Two routes that must agree did not (precision loss or a bug)."""


@dataclass(frozen=True)
class PrecisionContext:
    """Requested decimal digits plus guard digits.

    ``guard`` defaults to ``10 + ceil(digits / 10)``.
    """

    digits: int
    guard: int = field(default=0)

    def __post_init__(self):
        if not isinstance(self.digits, int) or self.digits < 1:
            raise DomainError(f"digits must be a positive integer, got {self.digits!r}")
        if self.guard <= 0:
            object.__setattr__(self, "guard", 10 + -(-self.digits // 10))

    @property
    def dps(self) -> int:
        return self.digits + self.guard

    @property
    def tau(self) -> mpf:
        """Truncation threshold ``10**-(digits + guard)``."""
        with mp.workdps(self.dps):
            return mpf(10) ** (-self.dps)

    @property
    def eps(self) -> mpf:
        """Target accuracy ``10**-digits`` of public results."""
        with mp.workdps(self.dps):
            return mpf(10) ** (-self.digits)

    def workdps(self):
        return mp.workdps(self.dps)

    def with_digits(self, digits: int) -> "PrecisionContext":
        return PrecisionContext(digits)


def to_mpf(value, ctx: PrecisionContext) -> mpf:
    """Convert ``value`` to an mpf at the working precision of ``ctx``.

    Accepts ints, Fractions, decimal strings, floats, mpf, and anything
    with an ``evaluate(ctx)`` method (parsed constant expressions).
    """
    with ctx.workdps():
        if hasattr(value, "evaluate"):
            value = value.evaluate(ctx)
        if isinstance(value, Fraction):
            result = mpf(value.numerator) / value.denominator
        else:
            result = mpf(value)
        if not mpmath.isfinite(result):
            raise DomainError(f"non-finite value {value!r}")
        return result


def agm(a, b, ctx: PrecisionContext) -> mpf:
    """Arithmetic-geometric mean of two positive reals."""
    with ctx.workdps():
        a, b = to_mpf(a, ctx), to_mpf(b, ctx)
        if a <= 0 or b <= 0:
            raise DomainError("agm requires positive arguments")
        tau = ctx.tau
        # quadratic convergence: a few dozen steps reach thousands of digits
        for _ in range(200):
            if abs(a - b) < tau * a:
                return (a + b) / 2
            a, b = (a + b) / 2, mpmath.sqrt(a * b)
        raise ConvergenceError("agm did not converge")


def _k_from_complement(alpha_c: mpf, ctx: PrecisionContext) -> mpf:
    # K(alpha) = pi / (2 agm(1, sqrt(1 - alpha))); takes 1 - alpha directly
    return mpmath.pi / (2 * agm(1, mpmath.sqrt(alpha_c), ctx))


def ellip_K(alpha, ctx: PrecisionContext) -> mpf:
    """Complete elliptic integral of the first kind, parameter ``alpha = k**2``."""
    with ctx.workdps():
        alpha = to_mpf(alpha, ctx)
        if not 0 < alpha < 1:
            raise DomainError(f"ellip_K needs 0 < alpha < 1, got {alpha}")
        return _k_from_complement(1 - alpha, ctx)


def ellip_Kprime(alpha, ctx: PrecisionContext) -> mpf:
    """Complementary integral ``K'(alpha) = K(1 - alpha)``."""
    with ctx.workdps():
        alpha = to_mpf(alpha, ctx)
        if not 0 < alpha < 1:
            raise DomainError(f"ellip_Kprime needs 0 < alpha < 1, got {alpha}")
        return _k_from_complement(alpha, ctx)


@dataclass(frozen=True)
class EllipticContext:
    """Modulus, complete integrals, nome and the ratio ``x = K/K'``.

    ``alpha_c`` holds ``1 - alpha`` computed without cancellation; it is
    what the dn product and K need when alpha is close to 1.
    """

    alpha: mpf
    alpha_c: mpf
    bigK: mpf
    bigKprime: mpf
    q: mpf
    x: mpf


def context_from_x(x, ctx: PrecisionContext) -> EllipticContext:
    """Build the elliptic data for nome ``q = exp(-pi/x)``.

    Both alpha and 1 - alpha come from theta quotients, so no root finding
    is involved and neither loses relative precision at the extremes.
    """
    from altlattice import qseries

    with ctx.workdps():
        x = to_mpf(x, ctx)
        if x <= 0:
            raise DomainError("x must be positive")
        q = mpmath.exp(-mpmath.pi / x)
        alpha, alpha_c = qseries.modulus_from_nome(q, ctx)
        bigK = _k_from_complement(alpha_c, ctx)
        bigKprime = _k_from_complement(alpha, ctx)
        return EllipticContext(alpha, alpha_c, bigK, bigKprime, q, x)


def context_from_alpha(alpha, ctx: PrecisionContext) -> EllipticContext:
    """Build the elliptic data from the parameter alpha directly."""
    with ctx.workdps():
        alpha = to_mpf(alpha, ctx)
        if not 0 < alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
        alpha_c = 1 - alpha
        bigK = _k_from_complement(alpha_c, ctx)
        bigKprime = _k_from_complement(alpha, ctx)
        x = bigK / bigKprime
        q = mpmath.exp(-mpmath.pi / x)
        return EllipticContext(alpha, alpha_c, bigK, bigKprime, q, x)


def fixed_point(value, places: int) -> str:
    """Render ``value`` in plain decimal notation with ``places`` decimals."""
    with mp.workdps(places + 20 + max(0, int(mpmath.log10(abs(value) + 1)))):
        scaled = int(mpmath.nint(mpf(value) * mpf(10) ** places))
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    if places == 0:
        return sign + digits
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def digits_of_agreement(a, b, cap: int) -> int:
    """Number of decimal places to which ``a`` and ``b`` agree, capped."""
    diff = abs(mpf(a) - mpf(b))
    if diff == 0:
        return cap
    return max(0, min(cap, int(math.floor(-mpmath.log10(diff)))))
