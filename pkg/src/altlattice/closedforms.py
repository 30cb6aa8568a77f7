"""Closed forms for F_(a,1)(x), a = 3, 4, 5, 6, and identity verification.

With q = exp(-pi/x):

    u      = -q**(1/3) chi(q) / chi(q**3)**3          (= G(-q))
    alpha8 = 1 - phi(-q**8)**4 / phi(q**8)**4
    mu     = R(-q) R(q**2)**2

    F_(3,1) = -(2 pi/(9x)) log((1 + u**3)/(1 - 8 u**3))
    F_(4,1) = -(pi/(sqrt2 x)) log((1 - alpha8**(1/8))/(1 + alpha8**(1/8)))
    F_(5,1) = -(pi/(5 sqrt5 x)) log(P(mu)/Q(mu)) - (pi/(5x)) log((1 + mu - mu**2)/(1 - 4mu - mu**2))
    F_(6,1) = -(pi/(sqrt3 x)) log((A + B)/(A - B)),
              A = phi(-q**4) - 3 phi(-q**36),  B = 2 sqrt3 q f(-q**24)

where P, Q = 2 - mu + 18 mu**2 + mu**3 + 2 mu**4 +/- 5 sqrt5 (mu + mu**3).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import mpmath
from mpmath import mpf

from altlattice import qseries
from altlattice.elliptic import eval_dn_sum
from altlattice.expr import ConstExpr, parse_const_expr
from altlattice.numerics import (
    ConsistencyError,
    DomainError,
    PrecisionContext,
    context_from_x,
    to_mpf,
)
from altlattice.sums import (
    Evaluation,
    Method,
    SumSpec,
    eval_csch,
    eval_naive,
    eval_product,
    normalize,
)


def _nome(x, ctx):
    x = to_mpf(x, ctx)
    if x <= 0:
        raise DomainError("x must be positive")
    return x, mpmath.exp(-mpmath.pi / x)


def _series_terms(q, ctx) -> int:
    # number of theta terms needed for q**(n*n) < tau
    return max(1, math.isqrt(int(ctx.dps * math.log(10) / -float(mpmath.log(q)))) + 1)


@dataclass(frozen=True)
class ClosedFormParams:
    u: mpf
    alpha8: mpf
    mu: mpf


def cubic_parameter(q, ctx: PrecisionContext) -> mpf:
    """u = -q**(1/3) chi(q) / chi(q**3)**3."""
    with ctx.workdps():
        return -qseries.real_root(q, 3) * qseries.theta_chi(q, ctx) / qseries.theta_chi(q ** 3, ctx) ** 3


def quartic_parameter(q, ctx: PrecisionContext):
    """alpha8 = 1 - phi(-q**8)**4/phi(q**8)**4 and its eighth root.

    Formed as 16 q**8 psi(q**16)**4 / phi(q**8)**4, which is the same
    number without the cancellation that ruins small q.
    """
    with ctx.workdps():
        q8 = q ** 8
        phi = qseries.theta_phi(q8, ctx)
        psi = qseries.theta_psi(q8 * q8, ctx)
        alpha8 = 16 * q8 * psi ** 4 / phi ** 4
        root8 = mpmath.sqrt(2) * q * mpmath.sqrt(psi / phi)
        return alpha8, root8


def quintic_parameter(q, ctx: PrecisionContext) -> tuple[mpf, int]:
    """mu = R(-q) R(q**2)**2 and the larger continued-fraction depth used."""
    with ctx.workdps():
        r1, d1 = qseries.rr_cf(-q, ctx, with_depth=True)
        r2, d2 = qseries.rr_cf(q * q, ctx, with_depth=True)
        return r1 * r2 * r2, d1 + d2


def closed_form_params(x, ctx: PrecisionContext) -> ClosedFormParams:
    with ctx.workdps():
        _, q = _nome(x, ctx)
        return ClosedFormParams(
            u=cubic_parameter(q, ctx),
            alpha8=quartic_parameter(q, ctx)[0],
            mu=quintic_parameter(q, ctx)[0],
        )


def f31(x, ctx: PrecisionContext) -> Evaluation:
    with ctx.workdps():
        x, q = _nome(x, ctx)
        u = cubic_parameter(q, ctx)
        g, depth = qseries.cubic_cf(-q, ctx, with_depth=True)
        if abs(u - g) > ctx.eps:
            raise ConsistencyError(f"u from chi ({u}) and G(-q) ({g}) disagree")
        u3 = u ** 3
        arg = (1 + u3) / (1 - 8 * u3)
        if arg <= 0:
            raise DomainError("log argument in the a=3 closed form is not positive")
        value = -2 * mpmath.pi / (9 * x) * mpmath.log(arg)
        return Evaluation(value, Method.CLOSED3, ctx.digits, depth + 2 * _series_terms(q, ctx))


def f41(x, ctx: PrecisionContext) -> Evaluation:
    with ctx.workdps():
        x, q = _nome(x, ctx)
        alpha8, root8 = quartic_parameter(q, ctx)
        if not 0 < alpha8 < 1:
            raise ConsistencyError(f"alpha8 = {alpha8} is outside (0, 1)")
        direct = 1 - qseries.theta_phi(-q ** 8, ctx) ** 4 / qseries.theta_phi(q ** 8, ctx) ** 4
        if abs(direct - alpha8) > ctx.eps:
            raise ConsistencyError("the two forms of alpha8 disagree")
        value = -mpmath.pi / (mpmath.sqrt(2) * x) * mpmath.log((1 - root8) / (1 + root8))
        return Evaluation(value, Method.CLOSED4, ctx.digits, 2 * _series_terms(q ** 8, ctx))


def quintic_log_ratios(mu):
    """The two log arguments of the a=5 closed form, as (big, little)."""
    s5 = mpmath.sqrt(5)
    base = 2 - mu + 18 * mu ** 2 + mu ** 3 + 2 * mu ** 4
    odd = 5 * s5 * (mu + mu ** 3)
    den = 1 - 4 * mu - mu ** 2
    if den == 0:
        raise DomainError("1 - 4 mu - mu^2 vanishes")
    if base - odd <= 0:
        raise DomainError("denominator of the a=5 closed form is not positive")
    return (base + odd) / (base - odd), (1 + mu - mu ** 2) / den


def f51(x, ctx: PrecisionContext) -> Evaluation:
    with ctx.workdps():
        x, q = _nome(x, ctx)
        mu, depth = quintic_parameter(q, ctx)
        big, little = quintic_log_ratios(mu)
        chi_ratio = qseries.theta_chi(q ** 5, ctx) / qseries.theta_chi(q, ctx) ** 5
        if abs(little - chi_ratio) > ctx.eps * abs(chi_ratio):
            raise ConsistencyError(f"mu check failed: {little} vs chi quotient {chi_ratio}")
        if little <= 0:
            raise DomainError("log argument in the a=5 closed form is not positive")
        s5 = mpmath.sqrt(5)
        value = (-mpmath.pi / (5 * s5 * x) * mpmath.log(big)
                 - mpmath.pi / (5 * x) * mpmath.log(little))
        return Evaluation(value, Method.CLOSED5, ctx.digits, depth)


def sextic_theta_parts(q, ctx: PrecisionContext):
    """A = phi(-q**4) - 3 phi(-q**36) and B = 2 sqrt3 q f(-q**24)."""
    with ctx.workdps():
        A = qseries.theta_phi(-q ** 4, ctx) - 3 * qseries.theta_phi(-q ** 36, ctx)
        B = 2 * mpmath.sqrt(3) * q * qseries.theta_f(-q ** 24, ctx)
        return A, B


def f61(x, ctx: PrecisionContext) -> Evaluation:
    with ctx.workdps():
        x, q = _nome(x, ctx)
        A, B = sextic_theta_parts(q, ctx)
        arg = (A + B) / (A - B)
        if arg <= 0:
            raise DomainError("log argument in the a=6 closed form is not positive")
        value = -mpmath.pi / (mpmath.sqrt(3) * x) * mpmath.log(arg)
        return Evaluation(value, Method.CLOSED6, ctx.digits, 3 * _series_terms(q ** 4, ctx))


CLOSED_FORMS = {3: f31, 4: f41, 5: f51, 6: f61}


# --- method dispatch -------------------------------------------------------

def closed_form_applies(spec: SumSpec) -> bool:
    return spec.a in CLOSED_FORMS and normalize(spec)[0].b == 1


def applicable_methods(spec: SumSpec) -> list[Method]:
    """High-precision methods able to evaluate ``spec`` (the naive sum excluded)."""
    methods = [Method.CSCH, Method.PRODUCT]
    if closed_form_applies(spec):
        methods.append(Method(f"closed{spec.a}"))
    if spec.a % 2 == 0:
        methods.append(Method.JACOBI)
    return methods


def evaluate(spec: SumSpec, method: Method | str, ctx: PrecisionContext, *, naive_n: int = 2000) -> Evaluation:
    """Evaluate ``spec`` with one named method.

    ``method`` may also be ``"closed"``, meaning whichever closed form fits a.
    Closed forms are applied to the normalised spec and the sign restored.
    """
    if method == "closed":
        if spec.a not in CLOSED_FORMS:
            raise DomainError(f"no closed form for a={spec.a}; closed forms cover a = 3..6")
        method = f"closed{spec.a}"
    method = Method(method)
    if method is Method.CSCH:
        return eval_csch(spec, ctx)
    if method is Method.PRODUCT:
        return eval_product(spec, ctx)
    if method is Method.NAIVE:
        return eval_naive(spec, naive_n, ctx)
    if method is Method.JACOBI:
        if spec.a % 2:
            raise DomainError("the dn formula needs an even a")
        with ctx.workdps():
            return eval_dn_sum(spec.a, spec.b, context_from_x(spec.x, ctx), ctx)
    a = int(method.value[-1])
    if spec.a != a:
        raise DomainError(f"{method.value} does not apply to a={spec.a}")
    canonical, sign = normalize(spec)
    if canonical.b != 1:
        raise DomainError(f"no closed form for (a, b) = ({spec.a}, {spec.b}); it reduces to b={canonical.b}")
    result = CLOSED_FORMS[a](spec.x, ctx)
    if sign < 0:
        with ctx.workdps():
            result.value = -result.value
    return result


# --- identity records ------------------------------------------------------

@dataclass(frozen=True)
class IdentityRecord:
    spec: SumSpec
    rhs: ConstExpr
    source: str
    digits_required: int
    name: str = ""

    @classmethod
    def from_fields(cls, fields: dict) -> "IdentityRecord":
        missing = {"a", "b", "x_expr", "rhs_expr"} - fields.keys()
        if missing:
            raise ValueError(f"record lacks fields {sorted(missing)}")
        spec = SumSpec(int(fields["a"]), int(fields["b"]), parse_const_expr(str(fields["x_expr"])))
        return cls(
            spec=spec,
            rhs=parse_const_expr(str(fields["rhs_expr"])),
            source=str(fields.get("source", "")),
            digits_required=int(fields.get("digits", 50)),
            name=str(fields.get("name", "")),
        )

    def label(self) -> str:
        return self.name or f"F_({self.spec.a},{self.spec.b})({self.spec.x.text})"


@dataclass
class VerificationReport:
    label: str
    passed: bool
    digits_required: int
    max_deviation: mpf | None = None
    deviations: dict = field(default_factory=dict)
    rhs_value: mpf | None = None
    error: str | None = None


def verify_identity(rec: IdentityRecord, ctx: PrecisionContext) -> VerificationReport:
    """Evaluate the left side by every applicable method and compare with the right side."""
    work_ctx = ctx if ctx.digits >= rec.digits_required else PrecisionContext(rec.digits_required)
    with work_ctx.workdps():
        tol = mpf(10) ** (-rec.digits_required)
        rhs = rec.rhs.evaluate(work_ctx)
        deviations = {}
        for method in applicable_methods(rec.spec):
            value = evaluate(rec.spec, method, work_ctx).value
            deviations[method.value] = abs(value - rhs)
        worst = max(deviations.values())
        return VerificationReport(
            label=rec.label(),
            passed=bool(worst < tol),
            digits_required=rec.digits_required,
            max_deviation=worst,
            deviations=deviations,
            rhs_value=rhs,
        )


@dataclass
class SuiteEntry:
    """One line of a suite file: a parsed record or the reason it failed to parse."""

    line: int
    record: IdentityRecord | None = None
    error: str | None = None


def parse_suite(text: str) -> list[SuiteEntry]:
    """Parse a suite: one JSON object per line; blank lines and '#' comments skipped."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            fields = json.loads(line)
            if not isinstance(fields, dict):
                raise ValueError("record is not a JSON object")
            entries.append(SuiteEntry(lineno, IdentityRecord.from_fields(fields)))
        except (ValueError, DomainError) as exc:
            entries.append(SuiteEntry(lineno, error=str(exc).splitlines()[0]))
    return entries


def bundled_suite_text() -> str:
    return resources.files("altlattice").joinpath("data/identities.jsonl").read_text()


def load_suite(path: str | Path) -> list[SuiteEntry]:
    """Load a suite file; the name ``paper`` selects the bundled suite."""
    if str(path) == "paper":
        return parse_suite(bundled_suite_text())
    return parse_suite(Path(path).read_text())
