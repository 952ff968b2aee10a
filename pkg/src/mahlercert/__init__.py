"""Exact hypertranscendence certification for linear Mahler systems."""

__version__ = "0.1.0"

from .algebra import Poly, RatFun, is_monomial, mahler_substitute, monomial_decompose, ord_at_zero, theta_derive
from .certifier import (
    Assumption,
    AssumptionKind,
    Certificate,
    Hyperalgebraic,
    NotHyperalgebraicWithin,
    ScalarMahlerEq,
    Verdict,
    certify,
    certify_equation,
    classify_order1,
    companion_matrix,
    direct_sum,
    replay_certificate,
    sl_assumption,
)
from .errors import ERROR_CODES, MahlerError
from .parser import eval_expr, parse_expr
from .series import (
    TruncatedSeries,
    find_relations,
    gen_baum_sweet,
    gen_rudin_shapiro,
    pade_reconstruct,
    verify_series_solution,
)
from .solvers import Found, NotFoundWithin, SolveBounds, solve_integrability, solve_multiplicative, solve_telescoper
from .systems import MahlerSystem, baum_sweet_system, rudin_shapiro_system

__all__ = [
    "Assumption", "AssumptionKind", "Certificate", "ERROR_CODES", "Found", "Hyperalgebraic",
    "MahlerError", "MahlerSystem", "NotFoundWithin", "NotHyperalgebraicWithin", "Poly", "RatFun",
    "ScalarMahlerEq", "SolveBounds", "TruncatedSeries", "Verdict", "baum_sweet_system", "certify",
    "certify_equation", "classify_order1", "companion_matrix", "direct_sum", "eval_expr",
    "find_relations", "gen_baum_sweet", "gen_rudin_shapiro", "is_monomial", "mahler_substitute",
    "monomial_decompose", "ord_at_zero", "pade_reconstruct", "parse_expr", "replay_certificate",
    "rudin_shapiro_system", "sl_assumption", "solve_integrability", "solve_multiplicative",
    "solve_telescoper", "theta_derive", "verify_series_solution",
]
