"""Hausdorff tiling metric on finite patches, truncated to a finite horizon.

The distance between two patches is ``max over 1 <= n <= n_max`` of
``hausdorff(boundary of x in B_n, boundary of y in B_n) / n`` where ``B_n`` is the
closed disc of radius ``n`` about the origin. Finite patches cannot witness
larger discs, so every report carries the horizon it used.

Tile edges stay exact; only the circle-clipped endpoints (irrational in general)
and the Hausdorff value itself are floating point.
"""

from __future__ import annotations

import math
import re
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .geometry import Isometry2, Point, Rotation2, dot, point_in_polygon, sub
from .qfield import QScalar
from .segments import boundary_edges, merge_segments, polygon_edges
from .substitution import Patch, PlacedTile, SubstitutionSystem, iter_tile_polygons, substitute, supertile

FINITE_HORIZON_NOTE = "finite-horizon value: maximum over integer radii 1..n_max only"


# small per-patch memo; entries keep their patch alive so ids cannot be reused while cached
_PATCH_CACHE: OrderedDict = OrderedDict()
_PATCH_CACHE_SIZE = 64


def _remember(key, value) -> None:
    _PATCH_CACHE[key] = value
    _PATCH_CACHE.move_to_end(key)
    while len(_PATCH_CACHE) > _PATCH_CACHE_SIZE:
        _PATCH_CACHE.popitem(last=False)


class CoverageError(ValueError):
    """The patch does not cover the disc a computation needs."""


# ---------------------------------------------------------------------------
# exact distances from the origin


def _seg_dist_sq(a: Point, b: Point) -> QScalar:
    """Exact squared distance from the origin to segment ab."""
    d = sub(b, a)
    dd = dot(d, d)
    t = -dot(a, d) / dd
    if t.sign() <= 0:
        return dot(a, a)
    if t >= 1:
        return dot(b, b)
    p = (a[0] + d[0] * t, a[1] + d[1] * t)
    return dot(p, p)


def polygon_dist_sq(poly) -> QScalar:
    """Squared distance from the origin to a closed polygon (0 when it contains the origin)."""
    z = QScalar(0, 0, poly[0][0].D)
    if point_in_polygon((z, z), poly) >= 0:
        return z
    return min(_seg_dist_sq(a, b) for a, b in polygon_edges(poly))


def coverage_radius_sq(sys_: SubstitutionSystem, patch: Patch) -> QScalar | None:
    """Squared radius of the largest closed disc about the origin inside the patch, or None.

    Uses cancellation of oppositely oriented shared edges, so the patch must be
    face-to-face (every validated rule's supertiles are).
    """
    polys = list(iter_tile_polygons(sys_, patch))
    if not polys:
        return None
    z = QScalar(0, 0, sys_.field_D)
    if not any(point_in_polygon((z, z), p) >= 0 for p in polys):
        return None
    outer = boundary_edges([e for p in polys for e in polygon_edges(p)])
    return min(_seg_dist_sq(a, b) for a, b in outer)


def covers(sys_: SubstitutionSystem, patch: Patch, n) -> bool:
    key = ("coverage", id(sys_), id(patch))
    hit = _PATCH_CACHE.get(key)
    if hit is not None and hit[0] is patch:
        r2 = hit[1]
    else:
        r2 = coverage_radius_sq(sys_, patch)
        _remember(key, (patch, r2))
    return r2 is not None and r2 >= Fraction(n) ** 2


# ---------------------------------------------------------------------------
# boundaries clipped to a disc


@dataclass(frozen=True)
class BoundarySet:
    """Tile-edge union of a patch intersected with the closed disc of radius ``radius``.

    ``segments`` are the exact maximal edge segments meeting the disc; ``pieces`` is
    the float array (k, 2, 2) of their parts inside it.
    """

    radius: float
    segments: tuple
    pieces: np.ndarray = field(repr=False, compare=False)
    covered: bool = True

    def __len__(self) -> int:
        return len(self.pieces)

    def is_empty(self) -> bool:
        return len(self.pieces) == 0

    def length(self) -> float:
        return float(np.linalg.norm(self.pieces[:, 1] - self.pieces[:, 0], axis=1).sum())


def clip_to_disc(a, b, r: float):
    """Part of the float segment ab inside the closed disc of radius r, or None."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    qa = float(d @ d)
    qb = 2.0 * float(a @ d)
    qc = float(a @ a) - r * r
    disc = qb * qb - 4 * qa * qc
    if qa == 0.0 or disc < 0:
        return None
    root = math.sqrt(disc)
    t0 = max(0.0, (-qb - root) / (2 * qa))
    t1 = min(1.0, (-qb + root) / (2 * qa))
    if t0 > t1:
        return None
    return np.array([a + t0 * d, a + t1 * d])


def boundary_in_ball(sys_: SubstitutionSystem, patch: Patch, n, allow_partial: bool = False) -> BoundarySet:
    """Clip the patch's tile-edge union to the closed disc of radius ``n``.

    Raises CoverageError when the patch does not cover the disc, unless
    ``allow_partial`` is set, in which case the result is flagged ``covered=False``.
    """
    if n <= 0:
        raise ValueError("radius must be positive")
    ok = covers(sys_, patch, n)
    if not ok and not allow_partial:
        raise CoverageError(f"patch does not cover the disc of radius {n}")
    r = float(n)
    r2 = Fraction(n) ** 2
    edges, flt = _patch_edges(sys_, patch)
    dist = point_segment_distances(np.zeros((1, 2)), flt)[0] if len(flt) else np.zeros(0)
    cand = np.nonzero(dist <= r + 1e-9 * max(1.0, r))[0]
    near = [edges[i] for i in cand if _seg_dist_sq(*edges[i]) <= r2]
    merged = merge_segments(near)
    pieces, kept = [], []
    for a, b in merged:
        piece = clip_to_disc((float(a[0]), float(a[1])), (float(b[0]), float(b[1])), r)
        if piece is not None:
            pieces.append(piece)
            kept.append((a, b))
    arr = np.array(pieces, dtype=float).reshape(-1, 2, 2)
    return BoundarySet(r, tuple(kept), arr, ok)


def _patch_edges(sys_: SubstitutionSystem, patch: Patch) -> tuple[list, np.ndarray]:
    """Exact tile edges of a patch and their float copies, cached per patch object."""
    key = ("edges", id(sys_), id(patch))
    hit = _PATCH_CACHE.get(key)
    if hit is not None and hit[0] is patch:
        return hit[1], hit[2]
    edges = [e for poly in iter_tile_polygons(sys_, patch) for e in polygon_edges(poly)]
    flt = np.array([[[float(a[0]), float(a[1])], [float(b[0]), float(b[1])]] for a, b in edges]).reshape(-1, 2, 2)
    _remember(key, (patch, edges, flt))
    return edges, flt


# ---------------------------------------------------------------------------
# Hausdorff distance


def point_segment_distances(pts: np.ndarray, segs: np.ndarray) -> np.ndarray:
    """Distances from each of k points to each of m segments, shape (k, m)."""
    a = segs[None, :, 0, :]
    d = segs[None, :, 1, :] - a
    dd = (d * d).sum(-1)
    w = pts[:, None, :] - a
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(dd > 0, (w * d).sum(-1) / dd, 0.0)
    t = np.clip(t, 0.0, 1.0)
    diff = w - t[..., None] * d
    return np.sqrt((diff * diff).sum(-1))


def directed_hausdorff(A: np.ndarray, B: np.ndarray, tol: float = 1e-9) -> float:
    """``sup over p in A of dist(p, B)`` for segment arrays, to within ``tol`` below the truth.

    Branch and bound over sub-segments of A. The distance to each single segment of
    B is convex along a segment of A, so ``min_j max(endpoint values)`` bounds an
    interval from above; the 1-Lipschitz bound is used as well.
    """
    if len(A) == 0:
        return 0.0
    if len(B) == 0:
        return math.inf
    p0, p1 = A[:, 0].copy(), A[:, 1].copy()
    g0 = point_segment_distances(p0, B)
    g1 = point_segment_distances(p1, B)
    best = max(g0.min(1).max(), g1.min(1).max())
    keep = _upper(p0, p1, g0, g1) > best + tol
    p0, p1, g0, g1 = p0[keep], p1[keep], g0[keep], g1[keep]
    while len(p0):
        mid = 0.5 * (p0 + p1)
        gm = point_segment_distances(mid, B)
        best = max(best, float(gm.min(1).max()))
        p0 = np.concatenate([p0, mid])
        p1 = np.concatenate([mid, p1])
        g0, g1 = np.concatenate([g0, gm]), np.concatenate([gm, g1])
        keep = _upper(p0, p1, g0, g1) > best + tol
        p0, p1, g0, g1 = p0[keep], p1[keep], g0[keep], g1[keep]
    return float(best)


def _upper(p0, p1, g0, g1) -> np.ndarray:
    convex = np.maximum(g0, g1).min(1)
    length = np.linalg.norm(p1 - p0, axis=1)
    lipschitz = 0.5 * (g0.min(1) + g1.min(1) + length)
    return np.minimum(convex, lipschitz)


def _as_pieces(X) -> np.ndarray:
    return X.pieces if isinstance(X, BoundarySet) else np.asarray(X, dtype=float).reshape(-1, 2, 2)


def _canonical(pieces: np.ndarray) -> np.ndarray:
    # orient each piece, then sort rows, so identical sets compare equal
    flip = (pieces[:, 0, 0] > pieces[:, 1, 0]) | (
        (pieces[:, 0, 0] == pieces[:, 1, 0]) & (pieces[:, 0, 1] > pieces[:, 1, 1])
    )
    out = pieces.copy()
    out[flip] = out[flip][:, ::-1]
    flat = out.reshape(len(out), 4)
    return flat[np.lexsort(flat.T[::-1])]


def hausdorff(A, B, tol: float = 1e-9) -> float:
    """Hausdorff distance between two boundary sets (or raw segment arrays).

    Empty against empty is 0; empty against nonempty is ``inf``.
    """
    a, b = _as_pieces(A), _as_pieces(B)
    if len(a) == 0 and len(b) == 0:
        return 0.0
    if len(a) == 0 or len(b) == 0:
        return math.inf
    if a.shape == b.shape and np.array_equal(_canonical(a), _canonical(b)):
        return 0.0
    return max(directed_hausdorff(a, b, tol), directed_hausdorff(b, a, tol))


# ---------------------------------------------------------------------------
# tiling distance


@dataclass
class DistanceReport:
    value: float
    n_at: int | None
    per_n: list
    n_max: int
    tol: float
    note: str = FINITE_HORIZON_NOTE

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "achieved_at_n": self.n_at,
            "per_n": [{"n": n, "scaled_hausdorff": v} for n, v in self.per_n],
            "n_max": self.n_max,
            "tol": self.tol,
            "note": self.note,
        }

    def text(self) -> str:
        where = f" at n = {self.n_at}" if self.n_at is not None else ""
        return f"distance {self.value:.12g}{where} (n_max = {self.n_max}, tol = {self.tol:g}; {self.note})"


def tiling_distance(sys_: SubstitutionSystem, x: Patch, y: Patch, n_max: int, tol: float = 1e-9) -> DistanceReport:
    """``max over 1 <= n <= n_max`` of ``hausdorff(x in B_n, y in B_n) / n``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    for name, p in (("left", x), ("right", y)):
        if not covers(sys_, p, n_max):
            raise CoverageError(f"{name} patch does not cover the disc of radius {n_max}")
    per_n = []
    for n in range(1, n_max + 1):
        h = hausdorff(boundary_in_ball(sys_, x, n), boundary_in_ball(sys_, y, n), tol)
        per_n.append((n, h / n))
    value, n_at = 0.0, None
    for n, v in per_n:
        if v > value:
            value, n_at = v, n
    return DistanceReport(value, n_at, per_n, n_max, tol)


# ---------------------------------------------------------------------------
# agreement radius and contraction


def _tile_key(t: PlacedTile):
    return (t.proto, t.pose.key())


def agreement_radius_sq(sys_: SubstitutionSystem, x: Patch, y: Patch) -> QScalar | None:
    """Exact squared distance from the origin to the nearest tile in one patch but not the other.

    ``None`` means the tile sets coincide (infinite agreement radius).
    """
    kx = {_tile_key(t): t for t in x.tiles}
    ky = {_tile_key(t): t for t in y.tiles}
    differing = [kx[k] for k in kx.keys() - ky.keys()] + [ky[k] for k in ky.keys() - kx.keys()]
    if not differing:
        return None
    return min(polygon_dist_sq(sys_.tile_polygon(t)) for t in differing)


@dataclass
class ContractionStep:
    k: int
    radius_sq: QScalar | None
    growth_exact: bool | None
    distance: DistanceReport | None

    @property
    def radius(self) -> float:
        return math.inf if self.radius_sq is None else math.sqrt(float(self.radius_sq))

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "agreement_radius": None if self.radius_sq is None else self.radius,
            "agreement_radius_sq": None if self.radius_sq is None else str(self.radius_sq),
            "growth_exact": self.growth_exact,
            "distance": None if self.distance is None else self.distance.to_json(),
        }


@dataclass
class ContractionReport:
    expansion: QScalar
    steps: list

    @property
    def ok(self) -> bool:
        return all(s.growth_exact is not False for s in self.steps)

    def distances(self) -> list[float]:
        return [s.distance.value for s in self.steps if s.distance is not None]

    def to_json(self) -> dict:
        return {"expansion": str(self.expansion), "ok": self.ok, "steps": [s.to_json() for s in self.steps]}

    def text(self) -> str:
        lines = [f"expansion {self.expansion}; agreement radius grows exactly: {self.ok}"]
        for s in self.steps:
            d = "-" if s.distance is None else f"{s.distance.value:.6g}"
            lines.append(f"  k={s.k}: agreement radius {s.radius:.6g}, distance {d}")
        return "\n".join(lines)


def contraction_check(
    sys_: SubstitutionSystem,
    x: Patch,
    y: Patch,
    steps: int,
    n_max: int | None = None,
    tol: float = 1e-9,
) -> ContractionReport:
    """Substitute both patches ``steps`` times; check the agreement radius scales exactly by
    the expansion each time and, when ``n_max`` is given, tabulate the tiling distance."""
    lam2 = sys_.expansion * sys_.expansion
    out = []
    prev = None
    for k in range(steps + 1):
        if k:
            x, y = substitute(sys_, x), substitute(sys_, y)
        r2 = agreement_radius_sq(sys_, x, y)
        if k == 0:
            growth = None
        elif prev is None or r2 is None:
            growth = prev is None and r2 is None
        else:
            growth = r2 == prev * lam2
        dist = tiling_distance(sys_, x, y, n_max, tol) if n_max else None
        out.append(ContractionStep(k, r2, growth, dist))
        prev = r2
    return ContractionReport(sys_.expansion, out)


# ---------------------------------------------------------------------------
# patch construction


def translated(patch: Patch, t: Point) -> Patch:
    return patch.transform(Isometry2.translation(t))


def descendant_pose(sys_: SubstitutionSystem, pid: int, level: int, path) -> tuple[int, Isometry2]:
    """Type and pose of the level ``level - len(path)`` sub-supertile reached by child indices ``path``."""
    g = Isometry2.identity(sys_.field_D)
    cur = pid
    for depth, idx in enumerate(path):
        child = sys_.children[cur][idx]
        g = g.compose(child.pose.conjugate_by_scaling(sys_.expansion ** (level - 1 - depth)))
        cur = child.proto
    return cur, g


def sub_supertile_pair(sys_: SubstitutionSystem, pid: int, level: int, first, second) -> tuple[Patch, Patch]:
    """Two placements of the level-``level`` supertile that share a smaller sub-supertile.

    ``first`` and ``second`` are child indices (or equal-length paths of indices)
    leading to sub-supertiles of the same type. The second patch is moved so that
    the sub-supertile at ``second`` lands on the one at ``first``; elsewhere the two
    patches generally differ. Both are then translated so the vertex centroid of
    the shared sub-supertile sits at the origin. Substituting the pair gives the
    same construction one level up.
    """
    first = (first,) if isinstance(first, int) else tuple(first)
    second = (second,) if isinstance(second, int) else tuple(second)
    if len(first) != len(second) or not 0 < len(first) <= level:
        raise ValueError("paths must have equal length between 1 and the level")
    t1, g1 = descendant_pose(sys_, pid, level, first)
    t2, g2 = descendant_pose(sys_, pid, level, second)
    if t1 != t2:
        raise ValueError("the two sub-supertiles must have the same prototile")
    lam = sys_.expansion ** (level - len(first))
    verts = sys_.proto(t1).vertices
    k = len(verts)
    cx = sum((v[0] for v in verts[1:]), verts[0][0]) * lam / k
    cy = sum((v[1] for v in verts[1:]), verts[0][1]) * lam / k
    c = g1.apply((cx, cy))
    shift = Isometry2.translation((-c[0], -c[1]))
    base = supertile(sys_, pid, level)
    return base.transform(shift), base.transform(shift.compose(g1.compose(g2.inverse())))


_SPEC = re.compile(
    r"^supertile:(?P<proto>-?\d+):(?P<level>\d+)"
    r"(?::transform=rot\((?P<c>[^,()]+),(?P<s>[^,()]+)\)(?:,t=\((?P<x>[^,()]+),(?P<y>[^,()]+)\))?)?$"
)


class PatchSpecError(ValueError):
    pass


def parse_patchspec(sys_: SubstitutionSystem, text: str) -> Patch:
    """``supertile:<proto>:<level>[:transform=rot(c,s),t=(x,y)]`` with rational ``c, s, x, y``.

    The rotation is applied first, then the translation.
    """
    m = _SPEC.match(text.replace(" ", ""))
    if m is None:
        raise PatchSpecError(f"bad patch spec {text!r}; expected supertile:<proto>:<level>[:transform=rot(c,s),t=(x,y)]")
    D = sys_.field_D
    try:
        patch = supertile(sys_, int(m["proto"]), int(m["level"]))
    except KeyError as exc:
        raise PatchSpecError(str(exc)) from None
    if m["c"] is None:
        return patch
    try:
        c, s = Fraction(m["c"]), Fraction(m["s"])
        x = Fraction(m["x"]) if m["x"] is not None else Fraction(0)
        y = Fraction(m["y"]) if m["y"] is not None else Fraction(0)
    except (ValueError, ZeroDivisionError) as exc:
        raise PatchSpecError(f"bad number in patch spec: {exc}") from None
    if c * c + s * s != 1:
        raise PatchSpecError(f"rot({c},{s}) is not a rotation: c^2 + s^2 = {c * c + s * s}")
    rot = Rotation2.of(QScalar(c, 0, D), QScalar(s, 0, D), D)
    g = Isometry2(rot, False, (QScalar(x, 0, D), QScalar(y, 0, D)))
    return patch.transform(g)
