"""Finite-order spectra of G(p, q) and the obstruction they give to c-equivalence."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .structure import Finite, Presentation, UnsupportedPairError, order, presentation
from .words import GWord


def divisors(n: int) -> set[int]:
    return {d for d in range(1, n + 1) if n % d == 0}


def order_spectrum(p: int, q: int) -> set[int]:
    """Orders of the finite-order elements of G(p, q)."""
    if p < 3 or q < 3:
        raise UnsupportedPairError(f"G(p,q) needs p, q >= 3, got ({p}, {q})")
    if p % 4 == 0 and q % 4 == 0:
        return divisors(math.lcm(p, q)) | {3}
    return divisors(p) | divisors(q)


def spectrum_witnesses(p: int, q: int) -> dict[int, GWord]:
    """For each order in the spectrum, a word over the presentation's generators realising it."""
    pres = presentation(p, q)
    out: dict[int, GWord] = {}
    for d in sorted(divisors(pres.a_order)):
        out.setdefault(d, GWord.gen("a", pres.a_order // d))
    for d in sorted(divisors(pres.b_order)):
        out.setdefault(d, GWord.gen("b", pres.b_order // d))
    if pres.m is not None:
        # U S is a third of a turn about a cube diagonal
        out.setdefault(3, GWord.from_syllables([("a", pres.m // 4), ("b", 1)]))
    return out


def verify_witnesses(p: int, q: int) -> dict[int, bool]:
    """Check each witness with the exact order procedure."""
    pres = presentation(p, q)
    return {n: order(w, pres, frame="presentation") == Finite(n) for n, w in spectrum_witnesses(p, q).items()}


@dataclass(frozen=True)
class Obstruction:
    left: tuple
    right: tuple
    witness: int | None
    only_left: tuple
    only_right: tuple

    @property
    def found(self) -> bool:
        return self.witness is not None

    def witnesses(self) -> set[int]:
        """Smallest order on each side that the other side lacks."""
        out = set()
        if self.only_left:
            out.add(self.only_left[0])
        if self.only_right:
            out.add(self.only_right[0])
        return out

    def text(self) -> str:
        l, r = (f"({a},{b})" for a, b in (self.left, self.right))
        if not self.found:
            return f"G{l} and G{r}: spectra coincide; no obstruction found (this does not prove c-equivalence)"
        parts = []
        if self.only_left:
            parts.append(f"order {self.only_left[0]} occurs in G{l} but not in G{r}")
        if self.only_right:
            parts.append(f"order {self.only_right[0]} occurs in G{r} but not in G{l}")
        return f"G{l} and G{r} are not c-equivalent: " + "; ".join(parts)

    def to_json(self) -> dict:
        return {
            "left": list(self.left),
            "right": list(self.right),
            "witness": self.witness,
            "witnesses": sorted(self.witnesses()),
            "only_left": list(self.only_left),
            "only_right": list(self.only_right),
        }


def c_equivalence_obstruction(pq: tuple[int, int], pq2: tuple[int, int]) -> Obstruction:
    a = order_spectrum(*pq)
    b = order_spectrum(*pq2)
    only_a = tuple(sorted(a - b))
    only_b = tuple(sorted(b - a))
    diff = only_a + only_b
    return Obstruction(tuple(pq), tuple(pq2), min(diff) if diff else None, only_a, only_b)


def describe(pres: Presentation) -> str:
    return f"spectrum of G({pres.p},{pres.q}): {sorted(order_spectrum(pres.p, pres.q))}"
