"""Rational-solution solvers for the order-one criteria and the matrix
integrability equations.

All solvers are semi-decision procedures: a ``Found`` witness has been
checked exactly against its defining equation, while ``NotFoundWithin``
records the search envelope that was exhausted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .algebra import ONE, Poly, RatFun, mahler_substitute, monomial_decompose, poly_lcm, theta_derive
from .errors import InternalInconsistency, InvalidArgument, PoleStructureError, ShapeMismatch, UnsupportedLambda, ZeroInput
from .linalg import (
    SparseSystem,
    common_denominator,
    mat_add,
    mat_map,
    mat_mul,
    mat_scale,
    mat_sub,
    root_power_poly,
    shape,
)
from .series import TruncatedSeries, pade_reconstruct
from .systems import MahlerSystem


@dataclass(frozen=True)
class SolveBounds:
    """Search envelope for the rational-solution solvers.

    ``max_num_degree``/``max_den_degree`` are the final degree caps; the
    solvers climb to them through ``escalation_steps`` doublings starting at
    cap / 2**escalation_steps.
    """

    max_num_degree: int
    max_den_degree: int
    series_precision: int
    escalation_steps: int = 3

    def __post_init__(self):
        for name in ("max_num_degree", "max_den_degree", "series_precision", "escalation_steps"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise InvalidArgument(f"SolveBounds.{name} must be an integer >= 1, got {value!r}")
        need = 2 * (self.max_num_degree + self.max_den_degree) + 4
        if self.series_precision < need:
            raise InvalidArgument(f"series_precision must be >= {need} for these degree caps")

    @classmethod
    def for_degrees(cls, num: int, den: int | None = None, escalation_steps: int = 3) -> "SolveBounds":
        den = num if den is None else den
        return cls(num, den, 2 * (num + den) + 4, escalation_steps)

    @classmethod
    def default_for(cls, *data) -> "SolveBounds":
        """4 * (total degree of the input data + 1) for both caps."""
        t = 0
        for item in data:
            if isinstance(item, MahlerSystem):
                item = item.A
            if isinstance(item, tuple):
                t = max([t] + [e.total_degree for row in item for e in row])
            else:
                t = max(t, RatFun.coerce(item).total_degree)
        base = 4 * (t + 1)
        return cls.for_degrees(base)

    def ladder(self):
        """Degree caps tried in order; the last one is the full envelope."""
        steps = []
        for i in range(self.escalation_steps + 1):
            scale = 2 ** (self.escalation_steps - i)
            step = (math.ceil(self.max_num_degree / scale), math.ceil(self.max_den_degree / scale))
            if step not in steps:
                steps.append(step)
        return steps

    def as_dict(self):
        return {
            "max_num_degree": self.max_num_degree,
            "max_den_degree": self.max_den_degree,
            "series_precision": self.series_precision,
            "escalation_steps": self.escalation_steps,
        }


@dataclass(frozen=True)
class Found:
    witness: Any
    bounds: SolveBounds
    detail: dict = field(default_factory=dict)

    found = True


@dataclass(frozen=True)
class NotFoundWithin:
    bounds: SolveBounds
    detail: dict = field(default_factory=dict)

    found = False


def _check_radix(p):
    if not isinstance(p, int) or isinstance(p, bool) or p < 2:
        raise InvalidArgument(f"radix p must be an integer >= 2, got {p!r}")


# -- telescoper: lam * d(z^p) - d(z) = b ------------------------------------

def telescoper_residual(d: RatFun, b: RatFun, p: int, lam) -> RatFun:
    return Fraction(lam) * mahler_substitute(d, p) - d - b


def telescoper_candidate(b: RatFun, p: int, lam: Fraction, precision: int):
    """The unique Laurent candidate for d: its principal part (a dict of
    negative exponents) and the power-series part to ``precision`` terms."""
    v = b.ord_at_zero() if not b.is_zero() else 0
    M = max(0, -v)
    vv, cs = b.laurent(precision + M) if not b.is_zero() else (0, [Fraction(0)] * precision)

    def b_coef(e):
        k = e - vv
        return cs[k] if 0 <= k < len(cs) else Fraction(0)

    neg = {}
    for e in range(-1, -M - 1, -1):
        prev = lam * neg.get(e // p, Fraction(0)) if e % p == 0 else Fraction(0)
        neg[e] = prev - b_coef(e)
    for e, val in neg.items():
        if val and p * e < -M:
            raise PoleStructureError(
                f"principal part of b at 0 admits no finite solution (coefficient of z^{e} forced to vanish)"
            )
    pos = [b_coef(0) / (lam - 1)]
    for e in range(1, precision):
        prev = lam * pos[e // p] if e % p == 0 else Fraction(0)
        pos.append(prev - b_coef(e))
    return {e: c for e, c in neg.items() if c}, TruncatedSeries(tuple(pos), precision)


def solve_telescoper(b, p: int, lam, bounds: SolveBounds | None = None):
    """Rational d with lam * d(z**p) - d(z) = b, via the unique Laurent
    candidate and bounded Pade reconstruction of its regular part."""
    _check_radix(p)
    b = RatFun.coerce(b)
    lam = Fraction(lam)
    if lam == 1 or lam == 0:
        raise UnsupportedLambda(f"lambda = {lam} is not supported (must differ from 0 and 1)")
    bounds = bounds or SolveBounds.default_for(b)
    principal, series = telescoper_candidate(b, p, lam, bounds.series_precision)
    principal_rf = RatFun()
    for e, c in principal.items():
        principal_rf = principal_rf + RatFun.z_power(e, c)
    for m, n in bounds.ladder():
        cand = pade_reconstruct(series, m, n)
        if cand is None:
            continue
        d = principal_rf + cand
        if telescoper_residual(d, b, p, lam).is_zero():
            return Found(d, bounds, {"ladder_step": [m, n]})
    return NotFoundWithin(bounds, {"candidate": "unique Laurent series", "pade_bounds": list(bounds.ladder()[-1])})


# -- multiplicative decomposition a = c z^m f(z^p)/f(z) -----------------------

@dataclass(frozen=True)
class MultiplicativeWitness:
    c: Fraction
    m: int
    f: RatFun

    def recompose(self, p: int) -> RatFun:
        return RatFun.z_power(self.m, self.c) * mahler_substitute(self.f, p) / self.f


def product_candidate(l: RatFun, p: int, precision: int) -> TruncatedSeries:
    """Power series f with f(0) = 1 and f(z^p) = l(z) f(z), i.e. prod_k phi^k(l)^(-1)."""
    num, den = l.num.coeffs, l.den.coeffs
    # l(0) = 1 means num[0] == den[0]
    inv0 = 1 / num[0]
    f = [Fraction(1)]
    for k in range(1, precision):
        acc = Fraction(0)
        for i in range(0, k // p + 1):
            j = k - p * i
            if j < len(den) and den[j]:
                acc += den[j] * f[i]
        for j in range(1, min(k, len(num) - 1) + 1):
            if num[j]:
                acc -= num[j] * f[k - j]
        f.append(acc * inv0)
    return TruncatedSeries(tuple(f), precision)


def solve_multiplicative(a, p: int, bounds: SolveBounds | None = None):
    """Write a = c * z**m * f(z**p)/f(z) with f rational, f(0) = 1."""
    _check_radix(p)
    a = RatFun.coerce(a)
    if a.is_zero():
        raise ZeroInput("solve_multiplicative needs a nonzero a")
    bounds = bounds or SolveBounds.default_for(a)
    dec = monomial_decompose(a)
    series = product_candidate(dec.l, p, bounds.series_precision)
    for m, n in bounds.ladder():
        f = pade_reconstruct(series, m, n)
        if f is None:
            continue
        w = MultiplicativeWitness(dec.c, dec.m, f)
        if w.recompose(p) == a:
            return Found(w, bounds, {"ladder_step": [m, n]})
    return NotFoundWithin(bounds, {"candidate": "infinite product of phi^k(l)^-1", "pade_bounds": list(bounds.ladder()[-1])})


# -- integrability equations -------------------------------------------------------

def integrability_target(system: MahlerSystem, traceless: bool):
    """theta(A) A^-1, minus (1/n) theta(det A)/det A * I when traceless."""
    A = system.A
    tA = mat_map(theta_derive, A)
    target = mat_mul(tA, system.inverse)
    if traceless:
        det = system.det
        corr = theta_derive(det) / det * Fraction(1, system.n)
        target = tuple(
            tuple(e - corr if i == j else e for j, e in enumerate(row)) for i, row in enumerate(target)
        )
    return target


def verify_integrability(system: MahlerSystem, B, traceless: bool) -> bool:
    """Exact check of p phi(B) = A B A^-1 + theta(A) A^-1 [- (1/n) theta(det)/det I]."""
    n = system.n
    try:
        if shape(B) != (n, n):
            raise ShapeMismatch(f"B has shape {shape(B)}, expected {(n, n)}")
    except (TypeError, IndexError):
        raise ShapeMismatch("B is not a matrix") from None
    B = tuple(tuple(RatFun.coerce(e) for e in row) for row in B)
    lhs = mat_scale(system.p, mat_map(lambda e: mahler_substitute(e, system.p), B))
    rhs = mat_add(mat_mul(mat_mul(system.A, B), system.inverse), integrability_target(system, traceless))
    return lhs == rhs


def singular_polynomial(system: MahlerSystem) -> Poly:
    """Squarefree polynomial (prime to z) vanishing at the finite nonzero
    poles of A and of A^-1."""
    entries = [e for row in system.A for e in row] + [e for row in system.inverse for e in row]
    den = common_denominator(entries)
    _, den = den.strip_z()
    return den.squarefree()


def pole_closure(s: Poly, p: int, max_degree: int) -> Poly:
    """lcm of s, and the polynomials whose roots are the p^j-th powers of the
    roots of s, stopping before the degree would exceed max_degree."""
    closure = s.squarefree() if s.degree > 0 else ONE
    if closure.degree > max_degree:
        return ONE
    level = closure
    while True:
        level = root_power_poly(level, p).squarefree()
        nxt = poly_lcm(closure, level)
        if nxt == closure or nxt.degree > max_degree:
            return closure
        closure = nxt


def integrability_ansatz(system: MahlerSystem, num_cap: int, den_cap: int):
    """Denominator z^v * R^mu and numerator degree for B = N / (z^v R^mu)."""
    s = singular_polynomial(system)
    R = pole_closure(s, system.p, den_cap)
    mu = 0 if R.degree <= 0 else max(1, min(4, den_cap // max(1, s.degree)))
    v = den_cap
    Q = R ** mu
    return v, Q, num_cap + v + max(0, Q.degree)


def _integrability_system(system: MahlerSystem, traceless: bool, v: int, Q: Poly, dN: int):
    n, p = system.n, system.p
    A = system.A
    target = mat_mul(integrability_target(system, traceless), A)
    L = common_denominator([e for row in A for e in row] + [e for row in target for e in row])
    Lrf = RatFun.coerce(L)
    LA = [[(Lrf * e).num for e in row] for row in A]
    LR = [[(Lrf * e).num for e in row] for row in target]
    phiQ = Q.dilate(p)
    P1 = [[(Q * LA[j][c]) * p for c in range(n)] for j in range(n)]
    P2 = [[(phiQ * LA[r][i]).shift((p - 1) * v) for i in range(n)] for r in range(n)]
    rhs_poly = [[(phiQ * Q * LR[r][c]).shift(p * v) for c in range(n)] for r in range(n)]

    eq_ids: dict = {}
    rows: dict = {}

    def eq(r, c, k):
        key = (r, c, k)
        idx = eq_ids.get(key)
        if idx is None:
            idx = eq_ids[key] = len(eq_ids)
            rows[idx] = {}
        return idx

    width = dN + 1
    for i in range(n):
        for j in range(n):
            for k in range(width):
                col = (i * n + j) * width + k
                for c in range(n):
                    poly = P1[j][c]
                    for t, val in enumerate(poly.coeffs):
                        if val:
                            row = rows[eq(i, c, p * k + t)]
                            row[col] = row.get(col, 0) + val
                for r in range(n):
                    poly = P2[r][i]
                    for t, val in enumerate(poly.coeffs):
                        if val:
                            row = rows[eq(r, j, k + t)]
                            row[col] = row.get(col, 0) - val
    rhs = {}
    for r in range(n):
        for c in range(n):
            for t, val in enumerate(rhs_poly[r][c].coeffs):
                if val:
                    rhs[eq(r, c, t)] = val
    lin = SparseSystem(n * n * width)
    # low degrees first keeps the elimination banded
    for key in sorted(eq_ids, key=lambda k: (k[2], k[0], k[1])):
        idx = eq_ids[key]
        lin.add_row(rows[idx], rhs.get(idx, 0))
        if not lin.consistent:
            return None
    return lin.solution()


def solve_integrability(system: MahlerSystem, traceless: bool = False, bounds: SolveBounds | None = None):
    """Rational B with p phi(B) = A B A^-1 + theta(A) A^-1 (minus the scalar
    trace correction when ``traceless``), by undetermined coefficients."""
    if not isinstance(system, MahlerSystem):
        raise InvalidArgument("solve_integrability expects a MahlerSystem")
    bounds = bounds or SolveBounds.default_for(system)
    n = system.n
    envelope = None
    for m, dcap in bounds.ladder():
        v, Q, dN = integrability_ansatz(system, m, dcap)
        envelope = {"denominator": f"z^{v} * ({Q.to_str()})", "numerator_degree": dN}
        x = _integrability_system(system, traceless, v, Q, dN)
        if x is None:
            continue
        width = dN + 1
        den = RatFun.coerce(Q.shift(v))
        B = tuple(
            tuple(RatFun(Poly(x[(i * n + j) * width:(i * n + j + 1) * width])) / den for j in range(n))
            for i in range(n)
        )
        if not verify_integrability(system, B, traceless):
            raise InternalInconsistency("linear solve returned a B that fails exact verification")
        return Found(B, bounds, {"ladder_step": [m, dcap], **envelope})
    return NotFoundWithin(bounds, envelope or {})
