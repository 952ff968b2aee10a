"""Exact univariate polynomials and rational functions over the rationals.

Polynomials are dense coefficient tuples indexed by degree.  Rational
functions are kept in a unique normal form (coprime numerator/denominator,
monic denominator) so that equality is a structural comparison.

The two operators the rest of the package is built on:

* ``mahler_substitute(f, p)``  -- f(z) -> f(z**p), implemented by index dilation
* ``theta_derive(f)``          -- the Euler derivation z*d/dz
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import DivisionByZero, InvalidArgument, ZeroInput

RatNum = Fraction

#: degree of the zero polynomial
DEG_ZERO = float("-inf")


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _trim(coeffs):
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


class Poly:
    """Dense polynomial in z with Fraction coefficients, lowest degree first.

    Instances are immutable; the coefficient tuple never has trailing zeros,
    and the zero polynomial is the empty tuple with degree ``DEG_ZERO``.
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs=()):
        if isinstance(coeffs, Poly):
            coeffs = coeffs.coeffs
        elif isinstance(coeffs, (int, Fraction)):
            coeffs = (coeffs,)
        object.__setattr__(self, "coeffs", _trim([_frac(c) for c in coeffs]))
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, coeffs):
        # trusted constructor: coeffs already Fractions
        obj = cls.__new__(cls)
        object.__setattr__(obj, "coeffs", _trim(coeffs))
        object.__setattr__(obj, "_hash", None)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def monomial(cls, k: int, c=1) -> "Poly":
        if k < 0:
            raise InvalidArgument("monomial degree must be nonnegative")
        return cls._raw([Fraction(0)] * k + [_frac(c)])

    @classmethod
    def constant(cls, c) -> "Poly":
        return cls._raw([_frac(c)])

    # -- basic queries -------------------------------------------------

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else DEG_ZERO

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def valuation(self) -> int:
        """Lowest index with a nonzero coefficient."""
        if not self.coeffs:
            raise ZeroInput("valuation of the zero polynomial")
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        raise AssertionError("unreachable")

    def __call__(self, x):
        acc = Fraction(0) if not isinstance(x, Poly) else Poly()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    # -- ring operations -------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly(other).coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(("Poly", self.coeffs)))
        return self._hash

    def __bool__(self):
        return bool(self.coeffs)

    def __neg__(self):
        return Poly._raw([-c for c in self.coeffs])

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly._raw(out)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = _frac(other)
            if not c:
                return Poly()
            return Poly._raw([c * x for x in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
        return Poly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise InvalidArgument("negative power of a polynomial")
        result = Poly.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, k: int) -> "Poly":
        """Multiply by z**k (k >= 0)."""
        if not self.coeffs or k == 0:
            return self
        return Poly._raw([Fraction(0)] * k + list(self.coeffs))

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        rem = list(self.coeffs)
        db = len(other.coeffs) - 1
        if len(rem) - 1 < db:
            return Poly(), self
        inv_lc = 1 / other.lc
        quo = [Fraction(0)] * (len(rem) - db)
        bc = other.coeffs
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k]
            if not c:
                continue
            q = c * inv_lc
            quo[k - db] = q
            base = k - db
            for j in range(db + 1):
                if bc[j]:
                    rem[base + j] -= q * bc[j]
        return Poly._raw(quo), Poly._raw(rem[:db])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        lc = self.lc
        if lc == 1:
            return self
        inv = 1 / lc
        return Poly._raw([c * inv for c in self.coeffs])

    def derivative(self) -> "Poly":
        return Poly._raw([k * c for k, c in enumerate(self.coeffs)][1:])

    def theta(self) -> "Poly":
        return Poly._raw([k * c for k, c in enumerate(self.coeffs)])

    def dilate(self, p: int) -> "Poly":
        """f(z) -> f(z**p): coefficient k moves to index p*k."""
        if not self.coeffs or p == 1:
            return self
        out = [Fraction(0)] * (p * (len(self.coeffs) - 1) + 1)
        for k, c in enumerate(self.coeffs):
            out[p * k] = c
        return Poly._raw(out)

    def strip_z(self):
        """Return (k, q) with self = z**k * q and q(0) != 0."""
        k = self.valuation()
        return k, Poly._raw(self.coeffs[k:])

    def squarefree(self) -> "Poly":
        if self.degree <= 0:
            return Poly.constant(1) if self.coeffs else self
        return self.exact_div(poly_gcd(self, self.derivative())).monic()

    # -- printing ------------------------------------------------------

    def to_str(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = str(a)
            else:
                mono = "z" if k == 1 else f"z^{k}"
                body = mono if a == 1 else f"{a}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Poly({self.to_str()!r})"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q (gcd(0, 0) = 0)."""
    while b:
        a, b = b, a % b
        if b:
            b = b.monic()
    return a.monic()


def poly_lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return Poly()
    return (a * b.exact_div(poly_gcd(a, b))).monic()


Z = Poly._raw([Fraction(0), Fraction(1)])
ONE = Poly._raw([Fraction(1)])


class RatFun:
    """Rational function num/den in lowest terms with a monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=1):
        num = num if isinstance(num, Poly) else Poly(num)
        den = den if isinstance(den, Poly) else Poly(den)
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        if num.is_zero():
            num, den = Poly(), ONE
        elif not den.is_constant():
            g = poly_gcd(num, den)
            if not g.is_constant():
                num, den = num.exact_div(g), den.exact_div(g)
        lc = den.lc
        if lc != 1:
            num, den = num * (1 / lc), den.monic()
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, num: Poly, den: Poly):
        # trusted: already normalized
        obj = cls.__new__(cls)
        object.__setattr__(obj, "num", num)
        object.__setattr__(obj, "den", den)
        object.__setattr__(obj, "_hash", None)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("RatFun is immutable")

    @classmethod
    def coerce(cls, x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        if isinstance(x, Poly):
            return cls._raw(x, ONE)
        return cls._raw(Poly.constant(_frac(x)), ONE)

    @classmethod
    def z_power(cls, k: int, c=1) -> "RatFun":
        if k >= 0:
            return cls._raw(Poly.monomial(k, c), ONE)
        return cls._raw(Poly.constant(c), Poly.monomial(-k))

    # -- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise InvalidArgument("not a constant rational function")
        return self.num[0]

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    @property
    def total_degree(self) -> int:
        """max(deg num, deg den), with 0 for constants."""
        return max(0, self.num.degree, self.den.degree)

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, RatFun):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, Poly)):
            return self == RatFun.coerce(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.num, self.den)))
        return self._hash

    # -- field operations ------------------------------------------------

    def __neg__(self):
        return RatFun._raw(-self.num, self.den)

    def __add__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RatFun(self.num + other.num, self.den)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return RatFun.coerce(other) - self

    def __mul__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return RatFun()
        # cross-cancel before multiplying keeps intermediate degrees small
        g1 = poly_gcd(self.num, other.den) if not other.den.is_constant() else ONE
        g2 = poly_gcd(other.num, self.den) if not self.den.is_constant() else ONE
        num = self.num.exact_div(g1) * other.num.exact_div(g2)
        den = self.den.exact_div(g2) * other.den.exact_div(g1)
        lc = den.lc
        if lc != 1:
            num, den = num * (1 / lc), den.monic()
        return RatFun._raw(num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.is_zero():
            raise DivisionByZero("inverse of the zero rational function")
        lc = self.num.lc
        return RatFun._raw(self.den * (1 / lc), self.num.monic())

    def __truediv__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RatFun.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFun._raw(self.num ** k, self.den ** k)

    # -- the two operators -----------------------------------------------

    def substitute(self, p: int) -> "RatFun":
        return mahler_substitute(self, p)

    def theta(self) -> "RatFun":
        return theta_derive(self)

    # -- local data at the origin --------------------------------------

    def ord_at_zero(self) -> int:
        return ord_at_zero(self)

    def value_at_zero(self) -> Fraction:
        if self.den[0] == 0:
            raise DivisionByZero("rational function has a pole at z = 0")
        return self.num[0] / self.den[0]

    def laurent(self, n_terms: int):
        """Return (v, coeffs) with self = z**v * sum(coeffs[k] z**k) + O(z**(v+n_terms))."""
        if self.is_zero():
            return 0, [Fraction(0)] * n_terms
        kn, num = self.num.strip_z()
        kd, den = self.den.strip_z()
        return kn - kd, series_divide(num.coeffs, den.coeffs, n_terms)

    def __str__(self):
        if self.den == ONE:
            return self.num.to_str()
        num = self.num.to_str()
        if len(self.num.coeffs) > 1 and sum(1 for c in self.num.coeffs if c) > 1:
            num = f"({num})"
        elif self.num.lc.denominator != 1 or self.num.lc < 0:
            num = f"({num})"
        den = self.den.to_str()
        if sum(1 for c in self.den.coeffs if c) > 1 or self.den.lc != 1:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"RatFun({str(self)!r})"


def _coerce_rf(x):
    if isinstance(x, RatFun):
        return x
    if isinstance(x, (Poly, int, Fraction)):
        return RatFun.coerce(x)
    return NotImplemented


def series_divide(num, den, n_terms):
    """First n_terms coefficients of num/den as a power series (den[0] != 0)."""
    if not den or not den[0]:
        raise DivisionByZero("series division needs a unit denominator")
    inv0 = 1 / Fraction(den[0])
    out = []
    dlen = len(den)
    for k in range(n_terms):
        acc = Fraction(num[k]) if k < len(num) else Fraction(0)
        for j in range(1, min(k, dlen - 1) + 1):
            if den[j]:
                acc -= den[j] * out[k - j]
        out.append(acc * inv0)
    return out


@dataclass(frozen=True)
class MonomialDecomposition:
    """a = c * z**m * l with l(0) = 1 and l a unit at the origin."""

    c: Fraction
    m: int
    l: RatFun

    def recompose(self) -> RatFun:
        return RatFun.z_power(self.m, self.c) * self.l


def mahler_substitute(f: RatFun, p: int) -> RatFun:
    if not isinstance(p, int) or p < 2:
        raise InvalidArgument(f"radix p must be an integer >= 2, got {p!r}")
    f = RatFun.coerce(f)
    # dilation preserves coprimality and monicity
    return RatFun._raw(f.num.dilate(p), f.den.dilate(p))


def theta_derive(f: RatFun) -> RatFun:
    f = RatFun.coerce(f)
    if f.is_constant():
        return RatFun()
    # z(n'd - nd')/d^2
    num = f.num.theta() * f.den - f.num * f.den.theta()
    return RatFun(num, f.den * f.den)


def ord_at_zero(f: RatFun) -> int:
    f = RatFun.coerce(f)
    if f.is_zero():
        raise ZeroInput("order at zero of the zero function")
    return f.num.valuation() - f.den.valuation()


def monomial_decompose(a: RatFun) -> MonomialDecomposition:
    a = RatFun.coerce(a)
    if a.is_zero():
        raise ZeroInput("monomial decomposition of zero")
    kn, num = a.num.strip_z()
    kd, den = a.den.strip_z()
    c = num[0] / den[0]
    # l = (num/num(0)) / (den/den(0)); den part stays monic after rescale
    l = RatFun(num * (1 / num[0]), den * (1 / den[0]))
    return MonomialDecomposition(c=c, m=kn - kd, l=l)


def is_monomial(f: RatFun) -> bool:
    f = RatFun.coerce(f)
    if f.is_zero():
        raise ZeroInput("is_monomial of zero")
    return sum(1 for c in f.num.coeffs if c) == 1 and sum(1 for c in f.den.coeffs if c) == 1


def z() -> RatFun:
    return RatFun._raw(Z, ONE)
