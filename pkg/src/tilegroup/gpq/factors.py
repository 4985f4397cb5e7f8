"""Finite groups used as factors of the amalgamated products.

Elements are plain hashable values so that normal forms compare by equality:
cyclic elements are ints mod n, dihedral elements are pairs ``(r, f)`` standing
for ``rot^r refl^f``, and cube-group elements are 3x3 signed permutation
matrices flattened to 9-tuples.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Cyclic:
    n: int

    def identity(self):
        return 0

    def mul(self, x, y):
        return (x + y) % self.n

    def inv(self, x):
        return (-x) % self.n

    def order(self, x) -> int:
        return self.n // math.gcd(x, self.n)

    def power(self, e: int):
        return e % self.n

    def preference(self, x):
        return (x,)


@dataclass(frozen=True)
class Dihedral:
    """Order ``2n``: ``(r, f)`` is ``rot^r`` followed by ``f`` reflections, with ``refl rot refl = rot^-1``."""

    n: int

    def identity(self):
        return (0, 0)

    def mul(self, x, y):
        r1, f1 = x
        r2, f2 = y
        return ((r1 + (-r2 if f1 else r2)) % self.n, f1 ^ f2)

    def inv(self, x):
        r, f = x
        return (r, 1) if f else ((-r) % self.n, 0)

    def order(self, x) -> int:
        r, f = x
        return 2 if f else self.n // math.gcd(r, self.n)

    def rot(self, e: int):
        return (e % self.n, 0)

    def preference(self, x):
        # rotations before reflections, then smallest angle
        return (x[1], x[0])


Matrix = tuple  # 9 ints, row-major


def mat_mul(x: Matrix, y: Matrix) -> Matrix:
    return tuple(sum(x[3 * i + k] * y[3 * k + j] for k in range(3)) for i in range(3) for j in range(3))


def mat_transpose(x: Matrix) -> Matrix:
    return tuple(x[3 * j + i] for i in range(3) for j in range(3))


I3: Matrix = (1, 0, 0, 0, 1, 0, 0, 0, 1)
# quarter turns about the first and second coordinate axes
U_MAT: Matrix = (1, 0, 0, 0, 0, -1, 0, 1, 0)
S_MAT: Matrix = (0, 0, 1, 0, 1, 0, -1, 0, 0)


@dataclass(frozen=True)
class CubeGroup:
    """Rotation group of the cube, generated by ``U`` (x-axis) and ``S`` (y-axis) quarter turns."""

    words: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if not self.words:
            self.words.update(_cube_words())

    def identity(self):
        return I3

    def mul(self, x, y):
        return mat_mul(x, y)

    def inv(self, x):
        return mat_transpose(x)

    def order(self, x) -> int:
        return cube_order(x)

    def elements(self) -> list:
        return list(self.words)

    def word(self, x) -> tuple:
        """Shortest word in ``U``, ``S`` (as ``(letter, exponent)`` pairs) for ``x``."""
        return self.words[x]

    def preference(self, x):
        return (len(self.words[x]), self.words[x])


def _cube_words() -> dict:
    """Breadth-first enumeration of all 24 elements with shortest words in U, S and their inverses."""
    gens = [("U", 1, U_MAT), ("S", 1, S_MAT), ("U", -1, mat_transpose(U_MAT)), ("S", -1, mat_transpose(S_MAT))]
    words = {I3: ()}
    queue = deque([I3])
    while queue:
        x = queue.popleft()
        for name, e, g in gens:
            y = mat_mul(x, g)
            if y not in words:
                w = list(words[x])
                if w and w[-1][0] == name:
                    w[-1] = (name, w[-1][1] + e)
                else:
                    w.append((name, e))
                words[y] = tuple(w)
                queue.append(y)
    if len(words) != 24:
        raise AssertionError(f"cube group enumeration found {len(words)} elements")
    return words


def cube_order(x: Matrix) -> int:
    k, y = 1, x
    while y != I3:
        y = mat_mul(y, x)
        k += 1
    return k


def cube_power(x: Matrix, e: int) -> Matrix:
    out = I3
    for _ in range(e % cube_order(x)):
        out = mat_mul(out, x)
    return out
