"""Command-line front end: ``altlattice eval | verify | bench | dn``.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import mpmath

from altlattice.closedforms import (
    applicable_methods,
    evaluate,
    load_suite,
    verify_identity,
)
from altlattice.elliptic import build_d1d3_polynomial, dn_fifth_values, dn_value
from altlattice.expr import ExprSyntaxError, parse_const_expr
from altlattice.numerics import (
    ConsistencyError,
    ConvergenceError,
    DomainError,
    PrecisionContext,
    context_from_alpha,
    context_from_x,
    digits_of_agreement,
    fixed_point,
)
from altlattice.sums import Method, SumSpec, eval_csch, eval_naive, eval_product

DIGITS_ENV = "ALTLATTICE_DIGITS"
DEFAULT_DIGITS = 50
MIN_DIGITS, MAX_DIGITS = 10, 1000

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _digits(value: str) -> int:
    try:
        digits = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"digits must be an integer, got {value!r}") from None
    if not MIN_DIGITS <= digits <= MAX_DIGITS:
        raise argparse.ArgumentTypeError(f"digits must lie in [{MIN_DIGITS}, {MAX_DIGITS}], got {digits}")
    return digits


def _default_digits() -> int:
    raw = os.environ.get(DIGITS_ENV)
    if raw is None:
        return DEFAULT_DIGITS
    try:
        return _digits(raw)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"{DIGITS_ENV}: {exc}") from None


def _spec(args) -> SumSpec:
    return SumSpec(args.a, args.b, parse_const_expr(args.x))


def _emit(args, record: dict, text: str):
    if args.json:
        print(json.dumps(record), flush=True)
    else:
        print(text, flush=True)


def _timed(fn, *a, **kw):
    start = time.perf_counter()
    result = fn(*a, **kw)
    return result, (time.perf_counter() - start) * 1000


def _eval_record(spec, x_text, result, places, elapsed_ms):
    return {
        "a": spec.a,
        "b": spec.b,
        "x": x_text,
        "method": result.method.value,
        "value": fixed_point(result.value, places),
        "digits": result.digits_achieved,
        "work": result.work,
        "elapsed_ms": round(elapsed_ms, 3),
    }


def cmd_eval(args) -> int:
    spec = _spec(args)
    ctx = PrecisionContext(args.digits)
    if args.method == "all":
        methods = applicable_methods(spec)
    elif args.method == "closed":
        if not any(m.value.startswith("closed") for m in applicable_methods(spec)):
            raise UsageError(f"no closed form for (a, b) = ({spec.a}, {spec.b}); closed forms cover a = 3..6 with b = 1 after normalisation")
        methods = [Method(f"closed{spec.a}")]
    elif args.method == "jacobi" and spec.a % 2:
        raise UsageError("the jacobi method needs an even a")
    else:
        methods = [Method(args.method)]
    results = []
    for method in methods:
        result, ms = _timed(evaluate, spec, method, ctx, naive_n=args.N)
        places = args.digits if method is not Method.NAIVE else 15
        results.append(result)
        rec = _eval_record(spec, args.x, result, places, ms)
        _emit(args, rec, f"{rec['method']:<8} {rec['value']}  work={rec['work']}  {rec['elapsed_ms']:.1f} ms")
    if len(results) > 1:
        for i, r in enumerate(results):
            for s in results[i + 1:]:
                with ctx.workdps():
                    delta = abs(r.value - s.value)
                _emit(args,
                      {"delta": [r.method.value, s.method.value], "value": mpmath.nstr(delta, 3)},
                      f"delta {r.method.value}-{s.method.value}: {mpmath.nstr(delta, 3)}")
    return EXIT_OK


def _verify_one(record, digits):
    rep = verify_identity(record, PrecisionContext(digits))
    return rep.label, rep.passed, mpmath.nstr(rep.max_deviation, 3), {k: mpmath.nstr(v, 3) for k, v in rep.deviations.items()}


def cmd_verify(args) -> int:
    try:
        entries = load_suite(args.suite)
    except OSError as exc:
        raise UsageError(f"cannot read suite {args.suite!r}: {exc.strerror}") from None
    if not entries:
        _emit(args, {"records": 0}, "0 records")
        return EXIT_OK
    ok = True
    n_passed = 0
    jobs = max(1, min(args.jobs or os.cpu_count() or 1, len(entries)))
    runnable = [e for e in entries if e.record is not None]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = {id(e): pool.submit(_verify_one, e.record, args.digits) for e in runnable}
        # the reporter walks entries in file order, so output is deterministic
        for e in entries:
            if e.record is None:
                ok = False
                _emit(args, {"line": e.line, "status": "error", "error": e.error},
                      f"ERROR line {e.line}: {e.error}")
                continue
            try:
                label, passed, worst, devs = futures[id(e)].result()
            except (DomainError, ConsistencyError, ConvergenceError) as exc:
                ok = False
                _emit(args, {"line": e.line, "name": e.record.label(), "status": "error", "error": str(exc)},
                      f"ERROR {e.record.label()}: {exc}")
                continue
            ok = ok and passed
            n_passed += passed
            status = "pass" if passed else "fail"
            _emit(args, {"line": e.line, "name": label, "status": status, "max_deviation": worst, "deviations": devs},
                  f"{status.upper():<5} {label:<16} max deviation {worst}")
    total = len(entries)
    _emit(args, {"records": total, "passed": n_passed, "ok": ok}, f"{total} records, {n_passed} passed")
    return EXIT_OK if ok else EXIT_FAIL


def bench_rows(spec: SumSpec, digits: int, naive_n: int = 2000):
    """Time each applicable method and measure the digits it actually delivers.

    The csch and product routes are truncated at 10**-(digits+1), the cost
    of reaching the target rather than the guard-padded working threshold.
    """
    ctx = PrecisionContext(digits)
    ref_ctx = PrecisionContext(digits + 20)
    reference = eval_csch(spec, ref_ctx).value
    thr = Fraction(1, 10 ** (digits + 1))
    rows = []
    for method in applicable_methods(spec):
        if method is Method.CSCH:
            result, ms = _timed(eval_csch, spec, ctx, threshold=thr)
        elif method is Method.PRODUCT:
            result, ms = _timed(eval_product, spec, ctx, threshold=thr)
        else:
            result, ms = _timed(evaluate, spec, method, ctx)
        with ref_ctx.workdps():
            achieved = digits_of_agreement(result.value, reference, digits + 20)
        rows.append((method.value, ms, result.work, achieved))
    result, ms = _timed(eval_naive, spec, naive_n, ctx)
    with ref_ctx.workdps():
        rows.append(("naive", ms, result.work, digits_of_agreement(result.value, reference, digits + 20)))
    return rows


def cmd_bench(args) -> int:
    spec = _spec(args)
    rows = bench_rows(spec, args.digits, args.N)
    if not args.json:
        print(f"F_({spec.a},{spec.b})({args.x}) at {args.digits} digits")
        print(f"{'method':<9}{'time_ms':>10}{'work':>12}{'digits':>8}")
    for name, ms, work, achieved in rows:
        _emit(args, {"a": spec.a, "b": spec.b, "x": args.x, "method": name, "elapsed_ms": round(ms, 3),
                     "work": work, "digits": achieved},
              f"{name:<9}{ms:>10.2f}{work:>12}{achieved:>8}")
    return EXIT_OK


def cmd_dn(args) -> int:
    if args.poly:
        poly = build_d1d3_polynomial(Fraction(1, 2))
        print(json.dumps({"alpha": "1/2", "degree": poly.degree, "coefficients_even_powers": list(poly.coeffs)}))
        return EXIT_OK
    ctx = PrecisionContext(args.digits)
    with ctx.workdps():
        if args.x is not None:
            ectx = context_from_x(parse_const_expr(args.x), ctx)
        else:
            ectx = context_from_alpha(parse_const_expr(args.alpha), ctx)
        js = [args.j] if args.j is not None else range(args.a + 1)
        for j in js:
            value = dn_value(j, args.a, ectx, ctx).value
            _emit(args, {"j": j, "a": args.a, "value": fixed_point(value, args.digits)},
                  f"dn({j}K/{args.a}) = {fixed_point(value, args.digits)}")
        if abs(ectx.alpha - mpmath.mpf(1) / 2) < ctx.eps:
            d4, d12 = dn_fifth_values(ectx, ctx)
            for label, value in (("2K/5", d4), ("6K/5", d12)):
                _emit(args, {"radical_check": label, "value": fixed_point(value, args.digits), "ok": True},
                      f"dn({label}) = {fixed_point(value, args.digits)} matches its radical form")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="altlattice",
        description="High-precision alternating lattice sums F_(a,b)(x).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--digits", type=_digits, default=None,
                       help=f"decimal digits (default ${DIGITS_ENV} or {DEFAULT_DIGITS})")
        p.add_argument("--json", action="store_true", help="one JSON object per output line")

    def spec_args(p):
        p.add_argument("--a", type=int, required=True)
        p.add_argument("--b", type=int, required=True)
        p.add_argument("--x", required=True, help="positive constant expression, e.g. 4/sqrt(7)")
        p.add_argument("--N", type=int, default=2000, help="cut-off for the naive double sum")

    p = sub.add_parser("eval", help="evaluate F_(a,b)(x)")
    spec_args(p)
    p.add_argument("--method", default="csch",
                   choices=["naive", "csch", "product", "closed", "jacobi", "all"])
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="check a suite of identities")
    p.add_argument("--suite", default="paper", help="suite file, or 'paper' for the bundled one")
    p.add_argument("--jobs", type=int, default=None, help="worker processes")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="compare cost and accuracy of the methods")
    spec_args(p)
    common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("dn", help="print dn(jK/a)")
    p.add_argument("--a", type=int, default=10)
    p.add_argument("--j", type=int, default=None)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--alpha", default="1/2", help="modulus alpha = k^2 (expression)")
    group.add_argument("--x", default=None, help="K/K' instead of alpha")
    p.add_argument("--poly", action="store_true", help="emit the degree-64 polynomial through dn(K/10)")
    common(p)
    p.set_defaults(func=cmd_dn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.digits is None:
            args.digits = _default_digits()
        return args.func(args)
    except ExprSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
