"""Floating-point rotation matrices used to falsify exact verdicts, never to prove them."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .structure import Finite, Infinite, Presentation, order, presentation
from .words import GWord


def axis_rotation(axis: str, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    if axis == "x":
        return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    if axis == "y":
        return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def to_matrix(w: GWord, p: int, q: int) -> np.ndarray:
    """Product of R_x(2 pi e / p) and R_y(2 pi e / q) factors; the empty word is exactly I."""
    out = np.eye(3)
    for g, e in w.syllables:
        if g == "a":
            out = out @ axis_rotation("x", 2 * math.pi * (e % p) / p)
        else:
            out = out @ axis_rotation("y", 2 * math.pi * (e % q) / q)
    return out


def distance_to_identity(mats: np.ndarray) -> np.ndarray:
    """Frobenius norm of M - I, batched over the leading axis."""
    return np.linalg.norm(mats - np.eye(3), axis=(-2, -1))


def random_word(rng: random.Random, p: int, q: int, max_syllables: int = 8) -> GWord:
    n = rng.randint(1, max_syllables)
    first = rng.choice("ab")
    syl = []
    for i in range(n):
        g = first if i % 2 == 0 else ("b" if first == "a" else "a")
        mod = p if g == "a" else q
        syl.append((g, rng.randint(1, mod - 1)))
    return GWord.from_syllables(syl)


@dataclass
class SoundnessReport:
    p: int
    q: int
    words: int = 0
    finite: int = 0
    infinite: int = 0
    finite_failures: list = field(default_factory=list)
    infinite_failures: list = field(default_factory=list)
    min_infinite_distance: float = math.inf
    contradiction_tol: float = 1e-9

    @property
    def contradictions(self) -> list:
        """Infinite verdicts whose matrix power actually returns to I (to rounding error)."""
        return [f for f in self.infinite_failures if f[1] < self.contradiction_tol]

    @property
    def near_misses(self) -> list:
        """Infinite verdicts with some power inside the criterion's window but clearly not at I."""
        return [f for f in self.infinite_failures if f[1] >= self.contradiction_tol]

    @property
    def ok(self) -> bool:
        return not self.finite_failures and not self.infinite_failures

    def text(self) -> str:
        return (
            f"G({self.p},{self.q}): {self.words} words, {self.finite} finite, {self.infinite} infinite; "
            f"finite failures {len(self.finite_failures)}, infinite failures {len(self.infinite_failures)} "
            f"({len(self.near_misses)} near misses, {len(self.contradictions)} returns to I); "
            f"closest approach of an infinite-order power to I: {self.min_infinite_distance:.3g}"
        )


def check_soundness(
    p: int,
    q: int,
    count: int = 10_000,
    seed: int = 0,
    max_syllables: int = 8,
    max_power: int = 1000,
    finite_tol: float = 1e-6,
    minimal_tol: float = 1e-3,
    infinite_tol: float = 1e-3,
) -> SoundnessReport:
    """Compare exact order verdicts with powers of the floating matrices of ``count`` random words."""
    pres = presentation(p, q)
    rng = random.Random(seed)
    rep = SoundnessReport(p, q)
    inf_words, inf_mats = [], []
    for _ in range(count):
        w = random_word(rng, p, q, max_syllables)
        res = order(w, pres)
        m = to_matrix(w, p, q)
        rep.words += 1
        if isinstance(res, Finite):
            rep.finite += 1
            powers = _powers(m[None], res.n)[0]
            dist = distance_to_identity(powers)
            if dist[-1] >= finite_tol or (res.n > 1 and dist[:-1].min() <= minimal_tol):
                rep.finite_failures.append((str(w), res.n, float(dist[-1]), float(dist[:-1].min(initial=math.inf))))
        else:
            rep.infinite += 1
            inf_words.append(w)
            inf_mats.append(m)
    if inf_mats:
        dmin, kmin = _min_power_distance(np.stack(inf_mats), max_power)
        rep.min_infinite_distance = float(dmin.min())
        for w, d, k in zip(inf_words, dmin, kmin):
            if d <= infinite_tol:
                rep.infinite_failures.append((str(w), float(d), int(k)))
    return rep


def _powers(mats: np.ndarray, n: int) -> np.ndarray:
    """``out[i, k] = mats[i]^(k+1)`` for k < n."""
    out = np.empty((mats.shape[0], n, 3, 3))
    cur = mats.copy()
    for k in range(n):
        out[:, k] = cur
        cur = cur @ mats
    return out


def _min_power_distance(mats: np.ndarray, max_power: int) -> tuple[np.ndarray, np.ndarray]:
    """Smallest ``||M^k - I||`` over 1 <= k <= max_power per matrix, and the k attaining it."""
    best = np.full(mats.shape[0], np.inf)
    arg = np.zeros(mats.shape[0], dtype=int)
    cur = mats.copy()
    for k in range(1, max_power + 1):
        d = distance_to_identity(cur)
        better = d < best
        best = np.where(better, d, best)
        arg = np.where(better, k, arg)
        cur = cur @ mats
    return best, arg


def relator_residuals(p: int, q: int) -> list[tuple[str, float]]:
    """``||matrix(r) - I||`` for every relator, evaluated with the presentation's generator orders."""
    pres: Presentation = presentation(p, q)
    return [
        (str(r), float(distance_to_identity(to_matrix(r, pres.a_order, pres.b_order))))
        for r in pres.relations
    ]


def infinite_order_is_plausible(w: GWord, p: int, q: int, max_power: int = 1000, tol: float = 1e-3) -> bool:
    return bool(_min_power_distance(to_matrix(w, p, q)[None], max_power)[0][0] > tol)


__all__ = [
    "Finite",
    "Infinite",
    "axis_rotation",
    "check_soundness",
    "distance_to_identity",
    "random_word",
    "relator_residuals",
    "to_matrix",
]
