"""Exact planar rotations, isometries and similarities over Q(sqrt D).

Points are plain ``(x, y)`` tuples of :class:`QScalar`.

Reflection convention: an :class:`Isometry2` with ``reflect=True`` acts as
``v -> F @ R @ v + t`` where ``F = diag(1, -1)``, i.e. the reflection across the
first axis is applied after the rotation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .qfield import FieldMismatchError, QScalar

Point = tuple  # (QScalar, QScalar)


class DegeneratePolygonError(ValueError):
    pass


def point(x, y, D: int) -> Point:
    return (_q(x, D), _q(y, D))


def _q(v, D: int) -> QScalar:
    if isinstance(v, QScalar):
        return v
    return QScalar(Fraction(v), 0, D)


def sub(p: Point, q: Point) -> Point:
    return (p[0] - q[0], p[1] - q[1])


def add(p: Point, q: Point) -> Point:
    return (p[0] + q[0], p[1] + q[1])


def scale(p: Point, k) -> Point:
    return (p[0] * k, p[1] * k)


def dot(p: Point, q: Point) -> QScalar:
    return p[0] * q[0] + p[1] * q[1]


def cross(p: Point, q: Point) -> QScalar:
    return p[0] * q[1] - p[1] * q[0]


def orient(a: Point, b: Point, c: Point) -> int:
    """Exact sign of the turn a -> b -> c (+1 left, -1 right, 0 collinear)."""
    return cross(sub(b, a), sub(c, a)).sign()


def point_key(p: Point) -> tuple:
    x, y = p
    return (x._p, x._q, x._d, y._p, y._q, y._d)


def to_float(p: Point) -> tuple[float, float]:
    return (float(p[0]), float(p[1]))


@dataclass(frozen=True)
class Rotation2:
    c: QScalar
    s: QScalar

    def __post_init__(self):
        if self.c.D != self.s.D:
            raise FieldMismatchError("rotation entries from different fields")
        if self.c * self.c + self.s * self.s != 1:
            raise ValueError(f"not a rotation: c^2 + s^2 != 1 for ({self.c}, {self.s})")

    @classmethod
    def identity(cls, D: int) -> Rotation2:
        return cls._unchecked(QScalar(1, 0, D), QScalar(0, 0, D))

    @classmethod
    def of(cls, c, s, D: int) -> Rotation2:
        return cls(_q(c, D), _q(s, D))

    @classmethod
    def _unchecked(cls, c: QScalar, s: QScalar) -> Rotation2:
        obj = object.__new__(cls)
        object.__setattr__(obj, "c", c)
        object.__setattr__(obj, "s", s)
        return obj

    @property
    def D(self) -> int:
        return self.c.D

    def __matmul__(self, other: Rotation2) -> Rotation2:
        c1, s1, c2, s2 = self.c, self.s, other.c, other.s
        return Rotation2._unchecked(c1 * c2 - s1 * s2, s1 * c2 + c1 * s2)

    def inverse(self) -> Rotation2:
        return Rotation2._unchecked(self.c, -self.s)

    def __pow__(self, n: int) -> Rotation2:
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        out = Rotation2.identity(self.D)
        while n:
            if n & 1:
                out = out @ base
            base = base @ base
            n >>= 1
        return out

    def apply(self, v: Point) -> Point:
        x, y = v
        return (self.c * x - self.s * y, self.s * x + self.c * y)

    def is_identity(self) -> bool:
        return self.c == 1 and self.s.is_zero()

    def key(self) -> tuple:
        return (self.c.key(), self.s.key())

    def __str__(self) -> str:
        return f"rot({self.c}, {self.s})"

    def to_json(self) -> dict:
        return {"c": self.c.to_json(), "s": self.s.to_json()}


def _flip(v: Point) -> Point:
    return (v[0], -v[1])


@dataclass(frozen=True)
class Isometry2:
    rot: Rotation2
    reflect: bool
    trans: Point

    @classmethod
    def identity(cls, D: int) -> Isometry2:
        z = QScalar(0, 0, D)
        return cls(Rotation2.identity(D), False, (z, z))

    @classmethod
    def rotation(cls, r: Rotation2) -> Isometry2:
        z = QScalar(0, 0, r.D)
        return cls(r, False, (z, z))

    @classmethod
    def translation(cls, t: Point) -> Isometry2:
        return cls(Rotation2.identity(t[0].D), False, t)

    @property
    def D(self) -> int:
        return self.rot.D

    def linear(self, v: Point) -> Point:
        w = self.rot.apply(v)
        return _flip(w) if self.reflect else w

    def apply(self, v: Point) -> Point:
        w = self.linear(v)
        return (w[0] + self.trans[0], w[1] + self.trans[1])

    def __call__(self, v: Point) -> Point:
        return self.apply(v)

    def compose(self, h: Isometry2) -> Isometry2:
        """Return ``self o h``: first h, then self."""
        if h.rot.D != self.rot.D:
            raise FieldMismatchError("isometries over different fields")
        # F R_g F = R_g^{-1}
        rg = self.rot.inverse() if h.reflect else self.rot
        return Isometry2(rg @ h.rot, self.reflect != h.reflect, add(self.linear(h.trans), self.trans))

    def __matmul__(self, h: Isometry2) -> Isometry2:
        return self.compose(h)

    def inverse(self) -> Isometry2:
        if self.reflect:
            # (F R)^-1 = R^-1 F = F R
            t = _flip(self.rot.apply(self.trans))
            return Isometry2(self.rot, True, (-t[0], -t[1]))
        rinv = self.rot.inverse()
        t = rinv.apply(self.trans)
        return Isometry2(rinv, False, (-t[0], -t[1]))

    def conjugate_by_scaling(self, lam: QScalar) -> Isometry2:
        """S o self o S^-1 for the stretch S(v) = lam * v."""
        return Isometry2(self.rot, self.reflect, (self.trans[0] * lam, self.trans[1] * lam))

    def is_identity(self) -> bool:
        return (not self.reflect) and self.rot.is_identity() and self.trans[0].is_zero() and self.trans[1].is_zero()

    def key(self) -> tuple:
        return (self.reflect, self.rot.key(), self.trans[0].key(), self.trans[1].key())

    def __str__(self) -> str:
        flag = "F·" if self.reflect else ""
        return f"{flag}{self.rot} + ({self.trans[0]}, {self.trans[1]})"


@dataclass(frozen=True)
class Similarity2:
    """v -> iso.linear(scale * v) + iso.trans, with scale > 0."""

    iso: Isometry2
    scale: QScalar

    def __post_init__(self):
        if self.scale.sign() <= 0:
            raise ValueError("similarity scale must be positive")

    def apply(self, v: Point) -> Point:
        return self.iso.apply((v[0] * self.scale, v[1] * self.scale))

    def compose(self, other: Similarity2) -> Similarity2:
        # self(other(v)) = L1(s1 (L2(s2 v) + t2)) + t1 = L1 L2 (s1 s2 v) + L1(s1 t2) + t1
        inner = Isometry2(other.iso.rot, other.iso.reflect, scale(other.iso.trans, self.scale))
        return Similarity2(self.iso.compose(inner), self.scale * other.scale)

    def inverse(self) -> Similarity2:
        inv = self.iso.inverse()
        k = self.scale.inverse()
        return Similarity2(Isometry2(inv.rot, inv.reflect, scale(inv.trans, k)), k)


def compose_isometry(g: Isometry2, h: Isometry2) -> Isometry2:
    return g.compose(h)


# ---------------------------------------------------------------------------
# angle classification


@dataclass(frozen=True)
class RationalTurn:
    numerator: int
    denominator: int

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator} turn"


@dataclass(frozen=True)
class IrrationalTurn:
    provenance: str = "by-Niven-list"

    def __str__(self) -> str:
        return "irrational turn"


def classify_angle(r: Rotation2) -> RationalTurn | IrrationalTurn:
    """Decide whether ``r`` is a rational fraction of a full turn.

    With both entries in a quadratic field, the only roots of unity reachable
    are those of order 1, 2, 3, 4, 6, 8, 12; their cosines are
    0, +-1/2, +-1, +-sqrt2/2, +-sqrt3/2.  Anything else is irrational.
    """
    c, s = r.c, r.s
    D = c.D
    h = Fraction(1, 2)
    # (rational part, sqrt part) of cos -> turn for s >= 0, turn for s < 0
    table = {
        (1, 0): (Fraction(0), None),
        (-1, 0): (h, None),
        (0, 0): (Fraction(1, 4), Fraction(3, 4)),
        (h, 0): (Fraction(1, 6), Fraction(5, 6)),
        (-h, 0): (Fraction(1, 3), Fraction(2, 3)),
    }
    if D == 2:
        table[(0, h)] = (Fraction(1, 8), Fraction(7, 8))
        table[(0, -h)] = (Fraction(3, 8), Fraction(5, 8))
    if D == 3:
        table[(0, h)] = (Fraction(1, 12), Fraction(11, 12))
        table[(0, -h)] = (Fraction(5, 12), Fraction(7, 12))
    hit = table.get((c.a, c.b))
    if hit is not None:
        turn = hit[0] if s.sign() >= 0 else hit[1]
        return RationalTurn(turn.numerator, turn.denominator)
    return IrrationalTurn()


# ---------------------------------------------------------------------------
# polygons


def signed_area2(poly: Sequence[Point]) -> QScalar:
    """Twice the signed area (positive for counterclockwise)."""
    n = len(poly)
    acc = poly[0][0] * 0
    for i in range(n):
        acc = acc + cross(poly[i], poly[(i + 1) % n])
    return acc


def corners(poly: Sequence[Point]) -> list[Point]:
    """Drop vertices where the boundary goes straight through."""
    n = len(poly)
    return [poly[i] for i in range(n) if orient(poly[i - 1], poly[i], poly[(i + 1) % n]) != 0]


def is_convex(poly: Sequence[Point]) -> bool:
    cs = corners(poly)
    if len(cs) < 3:
        return False
    signs = {orient(cs[i - 1], cs[i], cs[(i + 1) % len(cs)]) for i in range(len(cs))}
    return len(signs) == 1


def on_segment(p: Point, a: Point, b: Point) -> bool:
    """p lies on the closed segment [a, b]."""
    if orient(a, b, p) != 0:
        return False
    return dot(sub(p, a), sub(p, b)).sign() <= 0


def point_in_polygon(p: Point, poly: Sequence[Point]) -> int:
    """+1 strictly inside, 0 on the boundary, -1 outside (simple polygon)."""
    n = len(poly)
    for i in range(n):
        if on_segment(p, poly[i], poly[(i + 1) % n]):
            return 0
    # crossing number along +x ray, exact
    inside = False
    px, py = p
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if (a[1] > py) != (b[1] > py):
            # x coordinate of crossing compared with px, without division
            o = orient(a, b, p)
            if (b[1] > a[1] and o > 0) or (b[1] < a[1] and o < 0):
                inside = not inside
    return 1 if inside else -1


def triangulate(poly: Sequence[Point]) -> list[tuple[Point, Point, Point]]:
    """Ear clipping on a counterclockwise simple polygon (collinear vertices dropped)."""
    pts = corners(poly)
    if signed_area2(pts).sign() < 0:
        pts = pts[::-1]
    tris = []
    guard = 0
    while len(pts) > 3:
        n = len(pts)
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            if orient(a, b, c) <= 0:
                continue
            if any(
                point_in_polygon(q, (a, b, c)) >= 0
                for q in pts
                if q is not a and q is not b and q is not c
            ):
                continue
            tris.append((a, b, c))
            del pts[i]
            break
        guard += 1
        if guard > 10 * len(poly) + 10:
            raise DegeneratePolygonError("ear clipping failed; polygon not simple")
    tris.append(tuple(pts))
    return tris


def _convex_interiors_overlap(P: Sequence[Point], Q: Sequence[Point]) -> bool:
    """Separating-axis test on convex CCW polygons; touching counts as disjoint."""
    for poly, other in ((P, Q), (Q, P)):
        n = len(poly)
        for i in range(n):
            a, b = poly[i], poly[(i + 1) % n]
            # everything of `other` on the non-left side of a->b separates
            if all(orient(a, b, q) <= 0 for q in other):
                return False
    return True


def interiors_overlap(P: Sequence[Point], Q: Sequence[Point]) -> bool:
    if is_convex(P) and is_convex(Q):
        return _convex_interiors_overlap(_ccw(corners(P)), _ccw(corners(Q)))
    return any(_convex_interiors_overlap(s, t) for s in triangulate(P) for t in triangulate(Q))


def _ccw(poly: list[Point]) -> list[Point]:
    return poly if signed_area2(poly).sign() > 0 else poly[::-1]


def polygon_congruence(P: Sequence[Point], Q: Sequence[Point], allow_reflection: bool) -> Isometry2 | None:
    """Find an isometry carrying P onto Q vertex-for-vertex (up to cyclic shift/reversal)."""
    P = list(P)
    Q = list(Q)
    for poly in (P, Q):
        if len(poly) < 3 or signed_area2(poly).is_zero():
            raise DegeneratePolygonError("polygon has zero area")
    if len(P) != len(Q):
        return None
    D = P[0][0].D
    n = len(P)
    modes = [False, True] if allow_reflection else [False]
    for reflect in modes:
        src = [_flip(p) for p in P] if reflect else P
        for seq in (src, src[::-1]):
            for shift in range(n):
                tgt = Q[shift:] + Q[:shift]
                g = _direct_match(seq, tgt, D)
                if g is None:
                    continue
                if reflect:
                    # g o F has linear part R_g F = F R_g^{-1}
                    g = Isometry2(g.rot.inverse(), True, g.trans)
                return g
    return None


def _direct_match(src: list[Point], tgt: list[Point], D: int) -> Isometry2 | None:
    u = sub(src[1], src[0])
    v = sub(tgt[1], tgt[0])
    uu = dot(u, u)
    if uu != dot(v, v):
        return None
    c = dot(u, v) / uu
    s = cross(u, v) / uu
    r = Rotation2._unchecked(c, s)
    t = sub(tgt[0], r.apply(src[0]))
    g = Isometry2(r, False, t)
    for p, q in zip(src, tgt):
        if g.apply(p) != q:
            return None
    return g
