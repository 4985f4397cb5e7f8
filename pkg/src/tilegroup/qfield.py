"""Exact arithmetic in a real quadratic field Q(sqrt(D)).

A :class:`QScalar` stores ``(p + q*sqrt(D)) / d`` with integers ``p, q, d``,
``d > 0`` and ``gcd(p, q, d) == 1``.  Keeping a common denominator makes the
hot paths (multiplication inside pose composition) run on plain ints.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering
from typing import Union


class FieldMismatchError(ValueError):
    pass


def _squarefree(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


Number = Union[int, Fraction, "QScalar"]


@total_ordering
class QScalar:
    __slots__ = ("_p", "_q", "_d", "_D", "_hash")

    def __init__(self, a: int | Fraction | str = 0, b: int | Fraction | str = 0, D: int = 5):
        if not _squarefree(D):
            raise ValueError(f"D must be a square-free integer > 1, got {D}")
        a = Fraction(a)
        b = Fraction(b)
        d = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        self._set(a.numerator * (d // a.denominator), b.numerator * (d // b.denominator), d, D)

    def _set(self, p: int, q: int, d: int, D: int) -> None:
        g = math.gcd(math.gcd(p, q), d)
        if g != 1:
            p //= g
            q //= g
            d //= g
        self._p = p
        self._q = q
        self._d = d
        self._D = D
        self._hash = None

    @classmethod
    def _raw(cls, p: int, q: int, d: int, D: int) -> QScalar:
        obj = object.__new__(cls)
        if d < 0:
            p, q, d = -p, -q, -d
        obj._set(p, q, d, D)
        return obj

    @classmethod
    def sqrt_d(cls, D: int) -> QScalar:
        return cls(0, 1, D)

    # -- accessors ---------------------------------------------------------
    @property
    def a(self) -> Fraction:
        return Fraction(self._p, self._d)

    @property
    def b(self) -> Fraction:
        return Fraction(self._q, self._d)

    @property
    def D(self) -> int:
        return self._D

    def is_rational(self) -> bool:
        return self._q == 0

    def is_zero(self) -> bool:
        return self._p == 0 and self._q == 0

    def conjugate(self) -> QScalar:
        return QScalar._raw(self._p, -self._q, self._d, self._D)

    def norm(self) -> Fraction:
        """Field norm a^2 - D b^2."""
        return Fraction(self._p * self._p - self._D * self._q * self._q, self._d * self._d)

    def sign(self) -> int:
        p, q = self._p, self._q
        if q == 0:
            return (p > 0) - (p < 0)
        if p == 0:
            return 1 if q > 0 else -1
        if (p > 0) == (q > 0):
            return 1 if p > 0 else -1
        # opposite signs: compare p^2 with D q^2
        lhs = p * p
        rhs = self._D * q * q
        if lhs > rhs:
            return 1 if p > 0 else -1
        return 1 if q > 0 else -1

    def __float__(self) -> float:
        return (self._p + self._q * math.sqrt(self._D)) / self._d

    # -- coercion ----------------------------------------------------------
    def _coerce(self, other: Number) -> QScalar:
        if isinstance(other, QScalar):
            if other._D != self._D:
                raise FieldMismatchError(f"Q(sqrt {self._D}) vs Q(sqrt {other._D})")
            return other
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return QScalar._raw(f.numerator, 0, f.denominator, self._D)
        return NotImplemented

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other: Number) -> QScalar:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self._d == o._d:
            return QScalar._raw(self._p + o._p, self._q + o._q, self._d, self._D)
        return QScalar._raw(
            self._p * o._d + o._p * self._d, self._q * o._d + o._q * self._d, self._d * o._d, self._D
        )

    __radd__ = __add__

    def __neg__(self) -> QScalar:
        return QScalar._raw(-self._p, -self._q, self._d, self._D)

    def __sub__(self, other: Number) -> QScalar:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self._d == o._d:
            return QScalar._raw(self._p - o._p, self._q - o._q, self._d, self._D)
        return QScalar._raw(
            self._p * o._d - o._p * self._d, self._q * o._d - o._q * self._d, self._d * o._d, self._D
        )

    def __rsub__(self, other: Number) -> QScalar:
        return -(self - other)

    def __mul__(self, other: Number) -> QScalar:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p1, q1, p2, q2 = self._p, self._q, o._p, o._q
        return QScalar._raw(
            p1 * p2 + q1 * q2 * self._D, p1 * q2 + p2 * q1, self._d * o._d, self._D
        )

    __rmul__ = __mul__

    def inverse(self) -> QScalar:
        if self.is_zero():
            raise ZeroDivisionError("division by zero in Q(sqrt D)")
        # 1/(p + q r)/d = d (p - q r) / (p^2 - D q^2)
        n = self._p * self._p - self._D * self._q * self._q
        return QScalar._raw(self._d * self._p, -self._d * self._q, n, self._D)

    def __truediv__(self, other: Number) -> QScalar:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: Number) -> QScalar:
        return self._coerce(other) / self

    def __pow__(self, n: int) -> QScalar:
        if n < 0:
            return self.inverse() ** (-n)
        result = QScalar._raw(1, 0, 1, self._D)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison --------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, QScalar):
            if other._D != self._D:
                # distinct fields only agree on rationals
                return self._q == 0 and other._q == 0 and self._p == other._p and self._d == other._d
            return self._p == other._p and self._q == other._q and self._d == other._d
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return self._q == 0 and self._p == f.numerator and self._d == f.denominator
        return NotImplemented

    def __lt__(self, other: Number) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).sign() < 0

    def cmp(self, other: Number) -> int:
        return (self - self._coerce(other)).sign()

    def __hash__(self) -> int:
        if self._hash is None:
            if self._q == 0:
                self._hash = hash(Fraction(self._p, self._d))
            else:
                self._hash = hash((self._p, self._q, self._d, self._D))
        return self._hash

    def key(self) -> tuple[Fraction, Fraction]:
        """Total order key (lexicographic on rational parts), for canonical sorting."""
        return (self.a, self.b)

    def __repr__(self) -> str:
        return f"QScalar({self.a}, {self.b}, D={self._D})"

    def __str__(self) -> str:
        a, b = self.a, self.b
        if b == 0:
            return str(a)
        rad = f"√{self._D}"
        bpart = rad if b == 1 else f"-{rad}" if b == -1 else f"{b}{rad}"
        if a == 0:
            return bpart
        sign = "+" if b > 0 else "-"
        mag = abs(b)
        return f"{a}{sign}{'' if mag == 1 else mag}{rad}"

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict[str, str]:
        return {"a": str(self.a), "b": str(self.b)}

    @classmethod
    def from_json(cls, obj, D: int) -> QScalar:
        if isinstance(obj, dict):
            return cls(Fraction(obj.get("a", "0")), Fraction(obj.get("b", "0")), D)
        if isinstance(obj, (list, tuple)) and len(obj) == 2:
            return cls(Fraction(obj[0]), Fraction(obj[1]), D)
        if isinstance(obj, str):
            return cls(Fraction(obj), 0, D)
        if isinstance(obj, int) and not isinstance(obj, bool):
            return cls(obj, 0, D)
        raise ValueError(f"cannot read an exact scalar from {obj!r}")


def scalar_arith(x: QScalar, y: QScalar, op: str):
    """Dispatch one of add/sub/mul/div/cmp on two field elements."""
    if x.D != y.D:
        raise FieldMismatchError(f"Q(sqrt {x.D}) vs Q(sqrt {y.D})")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    if op == "cmp":
        return x.cmp(y)
    raise ValueError(f"unknown op {op!r}")
