"""Exact edge bookkeeping: shared-edge cancellation and maximal collinear segments."""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

from .geometry import Point, cross, point_key, sub


def polygon_edges(poly: Sequence[Point]) -> list[tuple[Point, Point]]:
    n = len(poly)
    return [(poly[i], poly[(i + 1) % n]) for i in range(n)]


def edge_multiset(edges) -> dict:
    """Map an undirected edge key to [forward count, backward count, (a, b)]."""
    out: dict = {}
    for a, b in edges:
        ka, kb = point_key(a), point_key(b)
        if ka <= kb:
            key, fwd = (ka, kb), True
        else:
            key, fwd = (kb, ka), False
        slot = out.get(key)
        if slot is None:
            slot = out[key] = [0, 0, (a, b) if fwd else (b, a)]
        slot[0 if fwd else 1] += 1
    return {k: tuple(v) for k, v in out.items()}


def boundary_edges(edges) -> list[tuple[Point, Point]]:
    """Edges not cancelled by an oppositely oriented copy (outer boundary of a face-to-face union)."""
    out = []
    for fwd, back, (a, b) in edge_multiset(edges).values():
        net = fwd - back
        if fwd + back == 1 or net != 0:
            out.append((a, b) if net >= 0 else (b, a))
    return out


def line_of(a: Point, b: Point):
    """Canonical (direction, offset) of the line through a != b, plus a coordinate along it."""
    d = sub(b, a)
    if not d[0].is_zero():
        slope = d[1] / d[0]
        dn = (d[0] * 0 + 1, slope)
    else:
        dn = (d[0] * 0, d[0] * 0 + 1)
    offset = cross(dn, a)
    return (point_key(dn), _k(offset)), dn, offset


def _k(x):
    return (x._p, x._q, x._d)


def _param(p: Point, dn) -> object:
    return p[0] if not dn[0].is_zero() else p[1]


def _at(t, dn, offset) -> Point:
    if not dn[0].is_zero():
        return (t, offset + dn[1] * t)
    return (-offset, t)


def merge_segments(segments) -> tuple:
    """Union of segments as a canonical sorted tuple of maximal segments."""
    lines: dict = defaultdict(list)
    meta = {}
    for a, b in segments:
        if a == b:
            continue
        key, dn, off = line_of(a, b)
        meta[key] = (dn, off)
        ta, tb = _param(a, dn), _param(b, dn)
        if tb < ta:
            ta, tb = tb, ta
        lines[key].append((ta, tb))
    out = []
    for key, ivs in lines.items():
        dn, off = meta[key]
        ivs.sort(key=lambda iv: _SortKey(iv[0]))
        cur_a, cur_b = ivs[0]
        for a, b in ivs[1:]:
            if a <= cur_b:
                if b > cur_b:
                    cur_b = b
            else:
                out.append((_at(cur_a, dn, off), _at(cur_b, dn, off)))
                cur_a, cur_b = a, b
        out.append((_at(cur_a, dn, off), _at(cur_b, dn, off)))
    out.sort(key=lambda s: (point_key(s[0]), point_key(s[1])))
    return tuple(out)


class _SortKey:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return self.v < other.v
