"""Theta functions, q-Pochhammer products and two continued fractions.

Notation follows Ramanujan: ``phi(q) = sum q**(n*n)``,
``psi(q) = sum_{n>=0} q**(n(n+1)/2)``, ``chi(q) = (-q; q**2)_inf`` and
``f(-q) = (q; q)_inf``.  Every function accepts a signed real nome, so
``theta_phi(-q)`` is phi(-q) and ``theta_f(-q)`` is f(-q).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import mpmath
from mpmath import mpf, mpc

from altlattice.numerics import (
    ConvergenceError,
    DomainError,
    PrecisionContext,
    to_mpf,
)

log = logging.getLogger(__name__)

_MAX_TERMS = 10**6
_MAX_DEPTH = 1 << 20


def _nome(q, ctx):
    q = to_mpf(q, ctx)
    if abs(q) >= 1:
        raise DomainError(f"|q| must be < 1, got {q}")
    if abs(q) > 0.9:
        log.warning("nome %s is close to 1; convergence will be slow", mpmath.nstr(q, 6))
    return q


def _to_complex(a, ctx):
    if isinstance(a, (mpc, complex)):
        return mpc(a)
    return mpc(to_mpf(a, ctx))


def qpochhammer(a, q, ctx: PrecisionContext):
    """``(a; q)_inf``, truncated once ``|a| |q|**j`` drops below tau.

    Returns an mpf for real ``a`` and an mpc otherwise.
    """
    with ctx.workdps():
        q = _nome(q, ctx)
        real = not isinstance(a, (mpc, complex))
        a = _to_complex(a, ctx)
        tau = ctx.tau
        prod = mpc(1)
        term = a
        for _ in range(_MAX_TERMS):
            if abs(term) < tau:
                return prod.real if real else prod
            prod *= 1 - term
            term *= q
        raise ConvergenceError("q-Pochhammer product did not converge")


def theta_phi(q, ctx: PrecisionContext) -> mpf:
    """phi(q) = 1 + 2 sum_{n>=1} q**(n*n)."""
    with ctx.workdps():
        q = _nome(q, ctx)
        tau = ctx.tau
        total = mpf(1)
        n = 1
        while n < _MAX_TERMS:
            term = 2 * q ** (n * n)
            total += term
            if abs(term) < tau * abs(total):
                return total
            n += 1
        raise ConvergenceError("phi series did not converge")


def theta_psi(q, ctx: PrecisionContext) -> mpf:
    """psi(q) = sum_{n>=0} q**(n(n+1)/2)."""
    with ctx.workdps():
        q = _nome(q, ctx)
        tau = ctx.tau
        total = mpf(1)
        n = 1
        while n < _MAX_TERMS:
            term = q ** (n * (n + 1) // 2)
            total += term
            if abs(term) < tau * abs(total):
                return total
            n += 1
        raise ConvergenceError("psi series did not converge")


def theta_chi(q, ctx: PrecisionContext) -> mpf:
    """chi(q) = (-q; q**2)_inf."""
    with ctx.workdps():
        q = _nome(q, ctx)
        return qpochhammer(-q, q * q, ctx)


def theta_f(q, ctx: PrecisionContext) -> mpf:
    """Ramanujan's f(q) = (-q; -q)_inf, so that ``theta_f(-q) = (q; q)_inf``."""
    with ctx.workdps():
        q = _nome(q, ctx)
        return qpochhammer(-q, -q, ctx)


@dataclass(frozen=True)
class ThetaSuite:
    phi: mpf
    psi: mpf
    chi: mpf
    fminus: mpf


def theta_suite(q, ctx: PrecisionContext) -> ThetaSuite:
    return ThetaSuite(
        phi=theta_phi(q, ctx),
        psi=theta_psi(q, ctx),
        chi=theta_chi(q, ctx),
        fminus=theta_f(-to_mpf(q, ctx), ctx),
    )


def general_f(a, b, ctx: PrecisionContext):
    """Ramanujan's general theta function by the Jacobi triple product.

    ``f(a, b) = (-a; ab)_inf (-b; ab)_inf (ab; ab)_inf`` for ``|ab| < 1``.
    """
    with ctx.workdps():
        real = not isinstance(a, (mpc, complex)) and not isinstance(b, (mpc, complex))
        a, b = _to_complex(a, ctx), _to_complex(b, ctx)
        ab = a * b
        if abs(ab) >= 1:
            raise DomainError("general_f requires |ab| < 1")
        if ab.imag == 0:
            nome = ab.real
        else:
            raise DomainError("general_f requires a real product ab")
        value = qpochhammer(-a, nome, ctx) * qpochhammer(-b, nome, ctx) * qpochhammer(ab, nome, ctx)
        value = mpc(value)
        return value.real if real else value


def modulus_from_nome(q, ctx: PrecisionContext):
    """Return ``(alpha, 1 - alpha)`` for nome ``q``.

    ``1 - alpha = phi(-q)**4 / phi(q)**4`` and, equivalently,
    ``alpha = 16 q psi(q**2)**4 / phi(q)**4``; both are formed directly so
    neither suffers cancellation.
    """
    with ctx.workdps():
        q = _nome(q, ctx)
        phi4 = theta_phi(q, ctx) ** 4
        alpha_c = theta_phi(-q, ctx) ** 4 / phi4
        alpha = 16 * q * theta_psi(q * q, ctx) ** 4 / phi4
        return alpha, alpha_c


def real_root(value, n: int):
    """Real n-th root; negative values allowed for odd n."""
    if value < 0:
        if n % 2 == 0:
            raise DomainError("even root of a negative number")
        return -mpmath.root(-value, n)
    return mpmath.root(value, n)


def _backward_cf(partials, depth):
    # evaluates 1/(1 + c_1/(1 + c_2/(1 + ... c_depth)))-style tail from the bottom
    tail = mpf(0)
    for k in range(depth, 0, -1):
        tail = partials(k) / (1 + tail)
    return 1 / (1 + tail)


def _adaptive_cf(partials, ctx, what):
    tau = ctx.tau
    depth = 8
    prev = _backward_cf(partials, depth)
    while depth < _MAX_DEPTH:
        depth *= 2
        cur = _backward_cf(partials, depth)
        if abs(cur - prev) < tau * abs(cur):
            return cur, depth
        prev = cur
    raise ConvergenceError(f"{what} continued fraction did not stabilise")


def rr_cf(q, ctx: PrecisionContext, *, with_depth: bool = False):
    """Rogers-Ramanujan continued fraction R(q).

    ``R(q) = q**(1/5) / (1 + q/(1 + q**2/(1 + ...)))`` evaluated by backward
    recurrence; the depth doubles until two successive depths agree.  For
    negative q the real fifth root is used, so R(q) is real.
    """
    with ctx.workdps():
        q = _nome(q, ctx)
        if q == 0:
            return (mpf(0), 0) if with_depth else mpf(0)
        body, depth = _adaptive_cf(lambda k: q ** k, ctx, "Rogers-Ramanujan")
        value = real_root(q, 5) * body
        return (value, depth) if with_depth else value


def cubic_cf(q, ctx: PrecisionContext, *, with_depth: bool = False):
    """Ramanujan's cubic continued fraction G(q).

    ``G(q) = q**(1/3) / (1 + (q + q**2)/(1 + (q**2 + q**4)/(1 + ...)))``
    with the real cube root for negative q.
    """
    with ctx.workdps():
        q = _nome(q, ctx)
        if q == 0:
            return (mpf(0), 0) if with_depth else mpf(0)
        body, depth = _adaptive_cf(lambda k: q ** k + q ** (2 * k), ctx, "cubic")
        value = real_root(q, 3) * body
        return (value, depth) if with_depth else value
