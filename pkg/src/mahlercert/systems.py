"""First-order Mahler systems phi(Y) = A Y and the two automatic-sequence
fixtures."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import RatFun, z
from .errors import InvalidArgument, SingularSystem
from .linalg import as_ratfun_matrix, mat_det, mat_inv


@dataclass(frozen=True)
class MahlerSystem:
    """phi(Y) = A Y with A invertible over Q(z) and radix p >= 2."""

    A: tuple
    p: int
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 2:
            raise InvalidArgument(f"radix p must be an integer >= 2, got {self.p!r}")
        A = as_ratfun_matrix(self.A)
        if len(A) != len(A[0]):
            raise InvalidArgument("system matrix must be square")
        object.__setattr__(self, "A", A)
        if self.det.is_zero():
            raise SingularSystem("det(A) = 0")

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def det(self) -> RatFun:
        if "det" not in self._cache:
            self._cache["det"] = mat_det(self.A)
        return self._cache["det"]

    @property
    def inverse(self):
        if "inv" not in self._cache:
            self._cache["inv"] = mat_inv(self.A)
        return self._cache["inv"]

    def matrix_text(self) -> str:
        return "[" + ",".join("[" + ",".join(str(e) for e in row) + "]" for row in self.A) + "]"


def baum_sweet_system() -> MahlerSystem:
    """Y = (f(z), f(z^2)) with f(z) = z f(z^2) + f(z^4)."""
    return MahlerSystem(((0, 1), (1, -z())), 2)


def rudin_shapiro_system() -> MahlerSystem:
    """Y = (f(z), f(-z)) for the Rudin-Shapiro generating series."""
    half = Fraction(1, 2)
    inv_z = z().inverse()
    return MahlerSystem(((half, half), (half * inv_z, -half * inv_z)), 2)
