"""Truncated power series with exact coefficients.

Covers the automatic-sequence generators, residual checks of phi(Y) = A Y,
Pade-type rational reconstruction and a bounded search for polynomial
relations among series and their theta-derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import lcm

import numpy as np

from .algebra import Poly, RatFun
from .errors import InsufficientPrecision, InternalInconsistency, InvalidArgument, SeriesFormatError, ShapeMismatch
from .linalg import SparseSystem, common_denominator, modular_rank


@dataclass(frozen=True)
class TruncatedSeries:
    """sum_{k < precision} coeffs[k] z**k + O(z**precision)."""

    coeffs: tuple
    precision: int

    def __post_init__(self):
        if self.precision < 1:
            raise InvalidArgument("series precision must be >= 1")
        cs = tuple(Fraction(c) for c in self.coeffs[: self.precision])
        cs = cs + (Fraction(0),) * (self.precision - len(cs))
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def from_ratfun(cls, f: RatFun, precision: int) -> "TruncatedSeries":
        f = RatFun.coerce(f)
        v, cs = f.laurent(precision)
        if v < 0:
            raise InvalidArgument("rational function has a pole at 0; not a power series")
        return cls(tuple([Fraction(0)] * v + cs), precision)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return self.precision

    def truncate(self, n: int) -> "TruncatedSeries":
        if n > self.precision:
            raise InsufficientPrecision(f"cannot extend precision {self.precision} to {n}")
        return TruncatedSeries(self.coeffs[:n], n)

    def valuation(self) -> int:
        """Index of the first nonzero coefficient, or precision if none is known."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return self.precision

    def __add__(self, other):
        return series_add(self, other)

    def __sub__(self, other):
        return series_add(self, series_scale(other, -1))

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        return series_scale(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return series_scale(self, -1)


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    n = min(a.precision, b.precision)
    return TruncatedSeries(tuple(x + y for x, y in zip(a.coeffs[:n], b.coeffs[:n])), n)


def series_scale(a: TruncatedSeries, c) -> TruncatedSeries:
    c = Fraction(c)
    return TruncatedSeries(tuple(c * x for x in a.coeffs), a.precision)


def _convolve(a, b, n):
    if not any(a) or not any(b):
        return [Fraction(0)] * n
    out = np.convolve(np.array(a, dtype=object), np.array(b, dtype=object))[:n]
    return list(out) + [Fraction(0)] * (n - len(out))


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    n = min(a.precision, b.precision)
    return TruncatedSeries(tuple(_convolve(a.coeffs[:n], b.coeffs[:n], n)), n)


def series_theta(s: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(tuple(k * c for k, c in enumerate(s.coeffs)), s.precision)


def series_substitute(s: TruncatedSeries, p: int) -> TruncatedSeries:
    """s(z**p), kept at the input precision."""
    if p < 2:
        raise InvalidArgument("substitution radix must be >= 2")
    n = s.precision
    out = [Fraction(0)] * n
    for k in range(0, (n - 1) // p + 1):
        out[p * k] = s.coeffs[k]
    return TruncatedSeries(tuple(out), n)


def series_negate_z(s: TruncatedSeries) -> TruncatedSeries:
    """s(-z): sign flip on odd indices."""
    return TruncatedSeries(tuple(-c if k % 2 else c for k, c in enumerate(s.coeffs)), s.precision)


def series_poly_mul(q: Poly, s: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(tuple(_convolve(list(q.coeffs), s.coeffs, s.precision)), s.precision)


# -- generators -------------------------------------------------------------

def gen_baum_sweet(N: int) -> TruncatedSeries:
    if N < 1:
        raise InvalidArgument("N must be >= 1")
    a = [0] * N
    a[0] = 1
    for n in range(1, N):
        if n % 2 == 1:
            a[n] = a[n // 2]
        elif n % 4 == 0:
            a[n] = a[n // 4]
        else:
            a[n] = 0
    return TruncatedSeries(tuple(a), N)


def gen_rudin_shapiro(N: int) -> TruncatedSeries:
    if N < 1:
        raise InvalidArgument("N must be >= 1")
    a = [0] * N
    a[0] = 1
    for n in range(1, N):
        half = n // 2
        if n % 2 == 0:
            a[n] = a[half]
        else:
            a[n] = a[half] if half % 2 == 0 else -a[half]
    return TruncatedSeries(tuple(a), N)


# -- residual of phi(Y) = A Y -------------------------------------------------

def verify_series_solution(system, Y, N: int) -> int:
    """z-adic valuation (capped at N) of the row-wise denominator-cleared
    residual L_i phi(Y_i) - (L_i A Y)_i, where L_i clears row i of A."""
    A, p = system.A, system.p
    n = len(A)
    if len(Y) != n:
        raise ShapeMismatch(f"system has size {n} but {len(Y)} series were given")
    for s in Y:
        if s.precision < N:
            raise InsufficientPrecision(f"series precision {s.precision} < N = {N}")
    Y = [s.truncate(N) for s in Y]
    phiY = [series_substitute(s, p) for s in Y]
    best = N
    for i in range(n):
        L = common_denominator(A[i])
        acc = series_poly_mul(L, phiY[i])
        for j in range(n):
            e = A[i][j]
            if e.is_zero():
                continue
            # L clears the row, so L*e is a polynomial
            acc = acc - series_poly_mul((RatFun.coerce(L) * e).num, Y[j])
        best = min(best, acc.valuation())
    return best


# -- rational reconstruction ------------------------------------------------

_PADE_PRIMES = (2147483629, 2147483587, 2147483579, 2147483563)


def _mod_coeffs(coeffs, prime):
    out = []
    for c in coeffs:
        den = c.denominator % prime
        if den == 0:
            return None
        out.append(c.numerator * pow(den, prime - 2, prime) % prime)
    return out


def _mod_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _mod_sub_mul(a, q, b, prime):
    """a - q*b over GF(prime), coefficient lists lowest degree first."""
    out = a[:] + [0] * max(0, len(q) + len(b) - 1 - len(a))
    for i, qi in enumerate(q):
        if qi:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] - qi * bj) % prime
    return _mod_trim(out)


def _mod_divmod(a, b, prime):
    a = a[:]
    inv = pow(b[-1], prime - 2, prime)
    q = [0] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1] * inv % prime
        q[k] = c
        for j, bj in enumerate(b):
            a[j + k] = (a[j + k] - c * bj) % prime
        _mod_trim(a)
    return _mod_trim(q), a


def _pade_mod(coeffs, m, n, prime):
    """Denominator degree of the [m/n] approximant over GF(prime) if it
    reproduces every coefficient, else None."""
    s = _mod_coeffs(coeffs, prime)
    if s is None:
        return "skip"
    K = m + n + 1
    r0, r1 = [0] * K + [1], _mod_trim(s[:K])
    t0, t1 = [], [1]
    while len(r1) - 1 > m:
        q, r = _mod_divmod(r0, r1, prime)
        r0, r1 = r1, r
        t0, t1 = t1, _mod_sub_mul(t0, q, t1, prime)
    if not r1:
        return 0 if not any(s) else None
    if not t1 or t1[0] == 0 or len(t1) - 1 > n:
        return None
    # the check against all coefficients: (t1 * s - r1) must vanish to full precision
    prod = [0] * len(s)
    for i, ti in enumerate(t1):
        if ti:
            for j in range(len(s) - i):
                prod[i + j] = (prod[i + j] + ti * s[j]) % prime
    for k in range(len(s)):
        expect = r1[k] if k < len(r1) else 0
        if prod[k] != expect:
            return None
    return len(t1) - 1


def _pade_exact(s, m, nq):
    """Exact P/Q with deg Q <= nq, Q(0) = 1, deg P <= m matching s, or None."""
    coeffs = s.coeffs
    system = SparseSystem(nq)
    for k in range(m + 1, len(coeffs)):
        # sum_{j=0..nq} q_j s_{k-j} = 0 with q_0 = 1; unknowns q_1..q_nq
        row = {j - 1: coeffs[k - j] for j in range(1, nq + 1) if k - j >= 0 and coeffs[k - j]}
        system.add_row(row, -coeffs[k])
        if not system.consistent:
            return None
    sol = system.solution()
    if sol is None:
        return None
    Q = Poly([1] + sol)
    P = Poly(_convolve(list(Q.coeffs), coeffs, m + 1))
    cand = RatFun(P, Q)
    if cand.num.degree > m or cand.den.degree > nq:
        return None
    return cand


def pade_reconstruct(s: TruncatedSeries, dmax_num: int, dmax_den: int):
    """Rational function P/Q with deg P <= dmax_num, deg Q <= dmax_den and
    Q(0) != 0 whose expansion matches every coefficient of s, else None.

    The [m/n] approximant is located modulo word-size primes (extended
    Euclid over GF(p)), which fixes the denominator degree; the exact
    candidate then comes from a small linear solve over Q and is re-expanded
    against every input coefficient before it is returned.
    """
    m, n = dmax_num, dmax_den
    if m < 0 or n < 0:
        raise InvalidArgument("degree bounds must be nonnegative")
    need = m + n + 2
    if s.precision < need:
        raise InsufficientPrecision(f"precision {s.precision} < {need} required for bounds ({m}, {n})")
    coeffs = [Fraction(c) for c in s.coeffs]
    votes = 0
    for prime in _PADE_PRIMES:
        nq = _pade_mod(coeffs, m, n, prime)
        if nq == "skip":
            continue
        votes += 1
        if nq is not None:
            cand = _pade_exact(s, m, nq)
            if cand is not None and TruncatedSeries.from_ratfun(cand, s.precision).coeffs == s.coeffs:
                return cand
        if votes == 2:
            break
    if votes == 0:
        # every prime divides some denominator; fall back to a dense exact solve
        cand = _pade_exact(s, m, n)
        if cand is not None and TruncatedSeries.from_ratfun(cand, s.precision).coeffs == s.coeffs:
            return cand
    return None


# -- relation search ------------------------------------------------------------

@dataclass(frozen=True)
class Relation:
    """sum over terms of poly(z) * prod_q quantity_q ** exps[q]."""

    terms: tuple  # ((exps, Poly), ...)
    labels: tuple

    def __str__(self):
        parts = []
        for exps, poly in self.terms:
            mono = "*".join(
                lab if e == 1 else f"{lab}^{e}" for lab, e in zip(self.labels, exps) if e
            )
            coef = poly.to_str()
            if not mono:
                parts.append(f"({coef})")
            else:
                parts.append(f"({coef})*{mono}")
        return " + ".join(parts) + " = 0"


@dataclass(frozen=True)
class RelationReport:
    relations: tuple
    search_params: dict
    labels: tuple
    rank_certificate: str


def _quantities(series, r):
    qs, labels = [], []
    for i, g in enumerate(series):
        cur = g
        for j in range(r + 1):
            qs.append(cur)
            labels.append(f"g{i}" if j == 0 else f"theta^{j}(g{i})" if j > 1 else f"theta(g{i})")
            cur = series_theta(cur)
    return qs, labels


def _monomials(nq, D):
    out = []
    for deg in range(D + 1):
        for combo in combinations_with_replacement(range(nq), deg):
            exps = [0] * nq
            for q in combo:
                exps[q] += 1
            out.append(tuple(exps))
    return out


def _integerize(s: TruncatedSeries, N):
    den = lcm(*(c.denominator for c in s.coeffs[:N])) if N else 1
    return [int(c * den) for c in s.coeffs[:N]], den


def evaluate_relation(rel: Relation, quantities, N: int) -> TruncatedSeries:
    """Direct series evaluation of a relation, independent of the matrix."""
    acc = TruncatedSeries((), N)
    for exps, poly in rel.terms:
        term = TruncatedSeries((1,), N)
        for q, e in enumerate(exps):
            for _ in range(e):
                term = series_mul(term, quantities[q].truncate(N))
        acc = acc + series_poly_mul(poly, term)
    return acc


def find_relations(series, r: int, D: int, e: int, N: int) -> RelationReport:
    """All polynomial relations of total degree <= D in {theta^j g_i : j <= r}
    with coefficients in Q[z] of degree <= e that hold to order N.

    Full column rank is certified modulo a prime (rank mod p <= rank over Q);
    otherwise the nullspace is computed exactly over Q.
    """
    if min(r, D, e) < 0:
        raise InvalidArgument("r, D, e must be >= 0")
    for s in series:
        if s.precision < N:
            raise InsufficientPrecision(f"series precision {s.precision} < N = {N}")
    series = [s.truncate(N) for s in series]
    qs, labels = _quantities(series, r)
    monos = _monomials(len(qs), D)
    # integer images of the quantities; the column scale factor is tracked
    ints = [_integerize(q, N) for q in qs]
    columns, scales = [], []
    cache = {tuple([0] * len(qs)): ([1] + [0] * (N - 1), 1)}
    for exps in monos:
        if exps not in cache:
            # build from a cached monomial of degree one less
            q = max(i for i, x in enumerate(exps) if x)
            prev = list(exps)
            prev[q] -= 1
            pv, pd = cache[tuple(prev)]
            qv, qd = ints[q]
            prod = np.convolve(np.array(pv, dtype=object), np.array(qv, dtype=object))[:N]
            cache[exps] = (list(prod), pd * qd)
        vals, den = cache[exps]
        for k in range(e + 1):
            columns.append([0] * k + list(vals[: N - k]))
            scales.append(den)
    ncols = len(columns)
    rows = [{j: columns[j][i] for j in range(ncols) if columns[j][i]} for i in range(N)]
    params = {"r": r, "D": D, "e": e, "N": N}
    rank, _ = modular_rank(rows, ncols)
    if rank == ncols:
        return RelationReport((), params, tuple(labels), f"full column rank {ncols} modulo a prime")
    system = SparseSystem(ncols)
    for row in rows:
        system.add_row(row)
    relations = []
    for vec in system.nullspace():
        # true coefficient = scale * integer-matrix coefficient
        true = [Fraction(v) * scales[j] for j, v in enumerate(vec)]
        scale = lcm(*(x.denominator for x in true if x))
        true = [x * scale for x in true]
        first = next(x for x in true if x)
        if first < 0:
            true = [-x for x in true]
        terms = []
        for mi, exps in enumerate(monos):
            poly = Poly(true[mi * (e + 1):(mi + 1) * (e + 1)])
            if poly:
                terms.append((exps, poly))
        rel = Relation(tuple(terms), tuple(labels))
        if evaluate_relation(rel, qs, N).valuation() < N:
            raise InternalInconsistency("nullspace vector failed independent re-verification")
        relations.append(rel)
    return RelationReport(tuple(relations), params, tuple(labels), f"exact rank {system.rank} of {ncols} columns")


# -- text formats -----------------------------------------------------------------

def series_to_text(s: TruncatedSeries) -> str:
    lines = [f"# precision {s.precision}"]
    for k, c in enumerate(s.coeffs):
        lines.append(f"{k} {c.numerator} {c.denominator}")
    return "\n".join(lines) + "\n"


def series_from_text(text: str) -> TruncatedSeries:
    precision = None
    coeffs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "precision":
                precision = int(parts[1])
            continue
        parts = line.split()
        if len(parts) != 3:
            raise SeriesFormatError(f"line {lineno}: expected 'index numerator denominator'")
        try:
            k, a, b = (int(x) for x in parts)
            coeffs[k] = Fraction(a, b)
        except (ValueError, ZeroDivisionError) as exc:
            raise SeriesFormatError(f"line {lineno}: {exc}") from None
    if precision is None:
        precision = max(coeffs, default=-1) + 1
    if any(k < 0 or k >= precision for k in coeffs):
        raise SeriesFormatError("coefficient index outside the declared precision")
    return TruncatedSeries(tuple(coeffs.get(k, 0) for k in range(precision)), precision)


def series_to_compact(s: TruncatedSeries) -> str:
    return f"{s.precision};" + ",".join(str(c) for c in s.coeffs)


def series_from_compact(text: str) -> TruncatedSeries:
    try:
        head, _, body = text.strip().partition(";")
        precision = int(head)
        coeffs = [Fraction(c) for c in body.split(",")] if body else []
    except (ValueError, ZeroDivisionError) as exc:
        raise SeriesFormatError(f"bad compact series: {exc}") from None
    if len(coeffs) > precision:
        raise SeriesFormatError("more coefficients than the declared precision")
    return TruncatedSeries(tuple(coeffs), precision)


def read_series(text: str) -> TruncatedSeries:
    """Accept either text format."""
    stripped = text.strip()
    if ";" in stripped.splitlines()[0] if stripped else False:
        return series_from_compact(stripped)
    return series_from_text(text)
