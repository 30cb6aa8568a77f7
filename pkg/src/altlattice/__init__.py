"""Alternating lattice sums F_(a,b)(x) to arbitrary precision."""

from altlattice.closedforms import (
    IdentityRecord,
    applicable_methods,
    evaluate,
    f31,
    f41,
    f51,
    f61,
    load_suite,
    verify_identity,
)
from altlattice.elliptic import build_d1d3_polynomial, dn_q_product, eval_dn_sum
from altlattice.expr import ConstExpr, ExprSyntaxError, parse_const_expr
from altlattice.numerics import (
    ConsistencyError,
    ConvergenceError,
    DomainError,
    PrecisionContext,
    context_from_alpha,
    context_from_x,
    ellip_K,
    ellip_Kprime,
)
from altlattice.sums import Evaluation, Method, SumSpec, eval_csch, eval_naive, eval_product, normalize

__all__ = [
    "ConsistencyError", "ConstExpr", "ConvergenceError", "DomainError", "Evaluation",
    "ExprSyntaxError", "IdentityRecord", "Method", "PrecisionContext", "SumSpec",
    "applicable_methods", "build_d1d3_polynomial", "context_from_alpha", "context_from_x",
    "dn_q_product", "ellip_K", "ellip_Kprime", "eval_csch", "eval_naive", "eval_product",
    "eval_dn_sum", "evaluate", "f31", "f41", "f51", "f61", "load_suite", "normalize",
    "parse_const_expr", "verify_identity",
]
