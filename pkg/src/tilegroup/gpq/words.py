"""Words in the two generators ``a`` (alpha) and ``b`` (beta)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

GENERATORS = ("a", "b")

_SYLLABLE = re.compile(r"^([ab])(?:\^([+-]?\d+))?$")


class WordSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class GWord:
    """Alternating syllables ``(generator, exponent)``; the empty word is the identity."""

    syllables: tuple = ()

    @classmethod
    def parse(cls, text: str) -> GWord:
        """Read ``a^3 b^-1 a``; ``1``, ``e`` or an empty string mean the identity."""
        text = text.strip()
        if text in ("", "1", "e"):
            return cls()
        out = []
        for tok in text.split():
            m = _SYLLABLE.match(tok)
            if m is None:
                raise WordSyntaxError(f"bad syllable {tok!r}; expected a, b, a^n or b^-n")
            out.append((m.group(1), int(m.group(2) or 1)))
        return cls.from_syllables(out)

    @classmethod
    def from_syllables(cls, syl: Iterable[tuple[str, int]]) -> GWord:
        """Merge adjacent syllables of the same generator and drop zero exponents."""
        out: list[tuple[str, int]] = []
        for g, e in syl:
            if g not in GENERATORS:
                raise WordSyntaxError(f"unknown generator {g!r}")
            if out and out[-1][0] == g:
                e += out.pop()[1]
            if e:
                out.append((g, e))
        return cls(tuple(out))

    @classmethod
    def gen(cls, g: str, e: int = 1) -> GWord:
        return cls.from_syllables([(g, e)])

    def __mul__(self, other: GWord) -> GWord:
        return GWord.from_syllables(self.syllables + other.syllables)

    def __pow__(self, n: int) -> GWord:
        base = self if n >= 0 else self.inverse()
        return GWord.from_syllables(base.syllables * abs(n))

    def inverse(self) -> GWord:
        return GWord(tuple((g, -e) for g, e in reversed(self.syllables)))

    def reduced(self, a_order: int, b_order: int) -> GWord:
        """Exponents taken to residues in ``(0, order)``; repeats until no syllable vanishes."""
        mods = {"a": a_order, "b": b_order}
        cur = self
        while True:
            nxt = GWord.from_syllables((g, e % mods[g]) for g, e in cur.syllables)
            if nxt == cur:
                return cur
            cur = nxt

    def swap_generators(self) -> GWord:
        return GWord(tuple(("b" if g == "a" else "a", e) for g, e in self.syllables))

    def letters(self) -> list[tuple[str, int]]:
        return list(self.syllables)

    def __len__(self) -> int:
        return len(self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables

    def __str__(self) -> str:
        if not self.syllables:
            return "1"
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.syllables)


def word(text: str) -> GWord:
    return GWord.parse(text)
