"""Exact linear algebra: sparse Gaussian elimination over Q, a modular rank
bound, and small dense matrices of rational functions."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .algebra import Poly, RatFun
from .errors import DivisionByZero, ShapeMismatch, SingularSystem

# -- sparse systems over Q --------------------------------------------------


class SparseSystem:
    """Linear system sum_j a_ij x_j = b_i accumulated row by row.

    Rows are kept in echelon form as they arrive: each stored row is
    normalized so that its smallest column carries coefficient 1.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, tuple[dict, Fraction]] = {}
        self.consistent = True

    def add_row(self, row: dict, rhs=0):
        row = {c: Fraction(v) for c, v in row.items() if v}
        rhs = Fraction(rhs)
        pivots = self.pivots
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                inv = 1 / row[c]
                if inv != 1:
                    row = {k: v * inv for k, v in row.items()}
                    rhs *= inv
                pivots[c] = (row, rhs)
                return
            prow, prhs = piv
            f = row[c]
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            rhs -= f * prhs
        if rhs:
            self.consistent = False

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def free_columns(self):
        return [c for c in range(self.ncols) if c not in self.pivots]

    def _back_substitute(self, fixed: dict, homogeneous: bool):
        x = dict(fixed)
        for c in sorted(self.pivots, reverse=True):
            row, rhs = self.pivots[c]
            acc = Fraction(0) if homogeneous else rhs
            for k, v in row.items():
                if k != c:
                    xk = x.get(k)
                    if xk:
                        acc -= v * xk
            x[c] = acc
        return [x.get(j, Fraction(0)) for j in range(self.ncols)]

    def solution(self):
        """A particular solution (free variables set to zero), or None."""
        if not self.consistent:
            return None
        return self._back_substitute({}, homogeneous=False)

    def nullspace(self):
        return [self._back_substitute({f: Fraction(1)}, homogeneous=True) for f in self.free_columns()]


def exact_nullspace(rows, ncols: int):
    """Nullspace basis of a matrix given as a list of (dense or sparse) rows."""
    system = SparseSystem(ncols)
    for r in rows:
        if isinstance(r, dict):
            system.add_row(r)
        else:
            system.add_row({j: v for j, v in enumerate(r) if v})
    return system.nullspace()


# -- modular rank -------------------------------------------------------------

_PRIMES = (2147483629, 2147483587, 2147483579)


def _to_mod(v, prime: int) -> int:
    v = Fraction(v)
    den = v.denominator % prime
    if den == 0:
        raise ZeroDivisionError
    return (v.numerator % prime) * pow(den, prime - 2, prime) % prime


def modular_rank(rows, ncols: int, prime: int = _PRIMES[0]):
    """Rank over GF(prime) together with the indices of a maximal set of
    independent rows.  The rank mod p is a lower bound for the rank over Q."""
    m = len(rows)
    mat = np.zeros((m, ncols), dtype=np.int64)
    for i, r in enumerate(rows):
        items = r.items() if isinstance(r, dict) else enumerate(r)
        for j, v in items:
            if v:
                mat[i, j] = _to_mod(v, prime)
    row_ids = np.arange(m)
    rank = 0
    for col in range(ncols):
        if rank == m:
            break
        nz = np.nonzero(mat[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            mat[[rank, piv]] = mat[[piv, rank]]
            row_ids[[rank, piv]] = row_ids[[piv, rank]]
        inv = pow(int(mat[rank, col]), prime - 2, prime)
        mat[rank] = (mat[rank] * inv) % prime
        below = mat[rank + 1:, col]
        idx = np.nonzero(below)[0]
        if idx.size:
            idx = idx + rank + 1
            # two-step product keeps int64 intermediates below 2**62
            factors = mat[idx, col][:, None]
            mat[idx] = (mat[idx] - (factors * mat[rank][None, :]) % prime) % prime
        rank += 1
    return rank, sorted(int(i) for i in row_ids[:rank])


# -- dense matrices of rational functions ----------------------------------

def as_ratfun_matrix(rows):
    if not rows or not all(isinstance(r, (list, tuple)) for r in rows):
        raise ShapeMismatch("matrix must be a nonempty list of rows")
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise ShapeMismatch("matrix rows have different lengths")
    return tuple(tuple(RatFun.coerce(x) for x in r) for r in rows)


def shape(M):
    return len(M), len(M[0])


def identity(n: int):
    return tuple(tuple(RatFun.coerce(1 if i == j else 0) for j in range(n)) for i in range(n))


def zeros(n: int, m: int | None = None):
    m = n if m is None else m
    return tuple(tuple(RatFun() for _ in range(m)) for _ in range(n))


def mat_mul(A, B):
    A, B = as_ratfun_matrix(A), as_ratfun_matrix(B)
    if len(A[0]) != len(B):
        raise ShapeMismatch(f"cannot multiply {shape(A)} by {shape(B)}")
    out = []
    for row in A:
        new = []
        for j in range(len(B[0])):
            acc = RatFun()
            for k, a in enumerate(row):
                if a and B[k][j]:
                    acc = acc + a * B[k][j]
            new.append(acc)
        out.append(tuple(new))
    return tuple(out)


def mat_add(A, B):
    if shape(A) != shape(B):
        raise ShapeMismatch(f"cannot add {shape(A)} and {shape(B)}")
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A, B):
    if shape(A) != shape(B):
        raise ShapeMismatch(f"cannot subtract {shape(A)} and {shape(B)}")
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_scale(c, A):
    c = RatFun.coerce(c)
    return tuple(tuple(c * a for a in r) for r in A)


def mat_map(f, A):
    return tuple(tuple(f(a) for a in r) for r in A)


def mat_det(A) -> RatFun:
    """Determinant by Gaussian elimination over Q(z)."""
    A = as_ratfun_matrix(A)
    n, m = shape(A)
    if n != m:
        raise ShapeMismatch("determinant of a non-square matrix")
    M = [list(r) for r in A]
    det = RatFun.coerce(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            return RatFun()
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        pv = M[col][col]
        det = det * pv
        inv = pv.inverse()
        for r in range(col + 1, n):
            if M[r][col]:
                f = M[r][col] * inv
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return det


def mat_inv(A):
    A = as_ratfun_matrix(A)
    n, m = shape(A)
    if n != m:
        raise ShapeMismatch("inverse of a non-square matrix")
    M = [list(r) + [RatFun.coerce(1 if i == j else 0) for j in range(n)] for i, r in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise SingularSystem("matrix is not invertible over Q(z)")
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col].inverse()
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return tuple(tuple(r[n:]) for r in M)


def common_denominator(entries) -> Poly:
    """Monic lcm of the denominators of an iterable of RatFun."""
    from .algebra import ONE, poly_lcm

    acc = ONE
    for e in entries:
        if not e.den.is_constant():
            acc = poly_lcm(acc, e.den)
    return acc


# -- characteristic polynomial (for root-power transforms) -----------------

def charpoly(M) -> list:
    """Characteristic polynomial det(xI - M) of a square Fraction matrix, as a
    coefficient list lowest degree first (Faddeev-LeVerrier)."""
    n = len(M)
    M = [[Fraction(x) for x in r] for r in M]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # Mk = M @ (Mk_prev + c_{n-k+1} I)
        prev = [row[:] for row in Mk]
        for i in range(n):
            prev[i][i] += coeffs[n - k + 1]
        Mk = [[sum(M[i][t] * prev[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(Mk[i][i] for i in range(n)) / k
    return coeffs


def root_power_poly(s: Poly, p: int) -> Poly:
    """Monic polynomial whose roots are the p-th powers of the roots of s."""
    if s.is_zero():
        raise DivisionByZero("root power transform of zero")
    s = s.monic()
    n = s.degree
    if n <= 0:
        return Poly.constant(1)
    comp = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n - 1):
        comp[i + 1][i] = Fraction(1)
    for i in range(n):
        comp[i][n - 1] = -s[i]
    power = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    base = comp
    e = p
    while e:
        if e & 1:
            power = [[sum(power[i][t] * base[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        e >>= 1
        if e:
            base = [[sum(base[i][t] * base[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
    return Poly(charpoly(power))
