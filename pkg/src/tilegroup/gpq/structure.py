"""Presentations, normal forms and element orders for G(p, q).

``G(p, q)`` is the subgroup of SO(3) generated by ``a = R_x(2pi/p)`` and
``b = R_y(2pi/q)``.  Every case of its presentation is an amalgamated free
product of two finite groups over a common subgroup:

=====================  ==============================  =====================
case                   factors                         amalgamated subgroup
=====================  ==============================  =====================
a  p, q odd            Z_p * Z_q                       trivial
b  p even, q odd       Z_p * D_q                       <a^(p/2)>
c  p even, q = 2s      D_p * D_q                       <a^(p/2), b^s>
e  G(m, 4), 4 | m      D_m * cube group                <U, S^2>
=====================  ==============================  =====================

(in case e, ``T = a`` and ``S = b`` are the generators, ``U = T^(m/4)``.)
When 4 divides both p and q the group equals ``G(lcm, 4)`` and is handled
as case e.  Words reduce to a unique normal form ``c_1 ... c_n h``: each
``c_i`` is a fixed representative of a non-trivial left coset of the
amalgamated subgroup in its factor, neighbours come from different factors,
and ``h`` lies in the amalgamated subgroup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .factors import I3, S_MAT, U_MAT, CubeGroup, Cyclic, Dihedral, cube_power, mat_mul, mat_transpose
from .words import GWord

Letter = tuple  # (side, element): side 0 is the a-factor, 1 the b-factor


class UnsupportedPairError(ValueError):
    pass


# ---------------------------------------------------------------------------
# amalgam engine


@dataclass
class Amalgam:
    factors: tuple  # (A, B)
    sub_gens: tuple  # pairs (element of A, element of B) generating the common subgroup
    word_of: tuple  # per side: element -> GWord over the presentation's generators
    preferred: tuple = (None, None)  # per side: optional ordered list of coset representatives
    sub_a_to_b: dict = field(default_factory=dict)
    sub_b_to_a: dict = field(default_factory=dict)

    def __post_init__(self):
        A, B = self.factors
        pairs = {(A.identity(), B.identity())}
        frontier = list(pairs)
        while frontier:
            x, y = frontier.pop()
            for gx, gy in self.sub_gens:
                z = (A.mul(x, gx), B.mul(y, gy))
                if z not in pairs:
                    pairs.add(z)
                    frontier.append(z)
        for x, y in pairs:
            if self.sub_a_to_b.setdefault(x, y) != y or self.sub_b_to_a.setdefault(y, x) != x:
                raise AssertionError("amalgamated subgroup generators do not define an isomorphism")

    # -- the common subgroup, stored as an element of the a-factor ----------
    def sub_in(self, side: int, h):
        return h if side == 0 else self.sub_a_to_b[h]

    def sub_of(self, side: int, x):
        """The subgroup element equal to ``x`` (a side-``side`` element), or None."""
        if side == 0:
            return x if x in self.sub_a_to_b else None
        return self.sub_b_to_a.get(x)

    def split(self, side: int, z) -> tuple:
        """``z = rep * h`` with ``rep`` the fixed coset representative (None when z is in the subgroup)."""
        G = self.factors[side]
        h = self.sub_of(side, z)
        if h is not None:
            return None, h
        coset = [G.mul(z, self.sub_in(side, s)) for s in self.sub_a_to_b]
        pref = self.preferred[side]
        if pref is not None:
            rep = next(c for c in pref if c in coset)
        else:
            rep = min(coset, key=G.preference)
        return rep, self.sub_of(side, G.mul(G.inv(rep), z))

    # -- normal forms -------------------------------------------------------
    def identity(self) -> tuple:
        return ((), self.factors[0].identity())

    def multiply(self, nf: tuple, letter: Letter) -> tuple:
        reps, h = nf
        side, x = letter
        G = self.factors[side]
        z = G.mul(self.sub_in(side, h), x)
        if reps and reps[-1][0] == side:
            z = G.mul(reps[-1][1], z)
            reps = reps[:-1]
        rep, h2 = self.split(side, z)
        if rep is not None:
            reps = reps + ((side, rep),)
        return (reps, h2)

    def normal_form(self, letters) -> tuple:
        nf = self.identity()
        for letter in letters:
            nf = self.multiply(nf, letter)
        return nf

    def to_word(self, nf: tuple) -> GWord:
        reps, h = nf
        out: list = []
        for side, x in reps:
            out.extend(self.word_of[side](x).syllables)
        out.extend(self.word_of[0](h).syllables)
        return GWord.from_syllables(out)

    # -- orders -------------------------------------------------------------
    def cyclic_core(self, nf: tuple) -> list:
        """Cyclically reduced conjugate as alternating factor elements (trailing h absorbed)."""
        reps, h = nf
        if not reps:
            return [(0, h)] if h != self.factors[0].identity() else []
        seq = list(reps)
        side, x = seq[-1]
        seq[-1] = (side, self.factors[side].mul(x, self.sub_in(side, h)))
        while len(seq) >= 2 and seq[0][0] == seq[-1][0]:
            side = seq[0][0]
            G = self.factors[side]
            z = G.mul(seq[-1][1], seq[0][1])
            rest = seq[1:-1]
            hz = self.sub_of(side, z)
            if hz is None:
                seq = [(side, z)] + rest
            else:
                s2, x2 = rest[0]
                seq = [(s2, self.factors[s2].mul(self.sub_in(s2, hz), x2))] + rest[1:]
        return seq

    def order(self, nf: tuple) -> int | None:
        """Element order, or None for infinite order."""
        core = self.cyclic_core(nf)
        if not core:
            return 1
        if len(core) >= 2:
            return None
        side, x = core[0]
        return self.factors[side].order(x)


# ---------------------------------------------------------------------------
# presentations


@dataclass
class Presentation:
    """Normalised presentation of G(p, q) over generators ``a``, ``b``.

    ``a_order``/``b_order`` are the orders of the presentation's generators;
    words given for the original pair ``(p, q)`` are translated by
    :meth:`from_input` (letter swap, or the embedding into ``G(m, 4)``).
    """

    p: int
    q: int
    case_tag: str
    a_order: int
    b_order: int
    relations: tuple
    swapped: bool = False
    s: int | None = None
    m: int | None = None
    engine: Amalgam | None = field(default=None, repr=False)
    _encode_input: Callable | None = field(default=None, repr=False)

    def encode(self, w: GWord) -> list:
        """Letters of a word over the presentation's generators."""
        out = []
        for g, e in w.syllables:
            out.extend(self._letter(g, e))
        return out

    def encode_input(self, w: GWord) -> list:
        return self._encode_input(w)

    def from_input(self, w: GWord) -> GWord:
        """A word over the presentation's generators equal to ``w`` read in ``G(p, q)``."""
        if self.case_tag == "d-then-e":
            return self.engine.to_word(self.engine.normal_form(self.encode_input(w)))
        return w.swap_generators() if self.swapped else w

    def _letter(self, g: str, e: int) -> list:
        if self.case_tag in ("a", "b"):
            if g == "a":
                return [(0, e % self.a_order)]
            B = self.engine.factors[1]
            return [(1, e % self.b_order if isinstance(B, Cyclic) else B.rot(e))]
        if self.case_tag == "c":
            return [(0, self.engine.factors[0].rot(e))] if g == "a" else [(1, self.engine.factors[1].rot(e))]
        # case e
        if g == "a":
            return [(0, self.engine.factors[0].rot(e))]
        return [(1, cube_power(S_MAT, e))]

    def summary(self) -> str:
        rels = ", ".join(str(r) for r in self.relations)
        head = f"G({self.p},{self.q}): case {self.case_tag}"
        if self.swapped:
            head += f" (generators swapped: a has order {self.a_order}, b has order {self.b_order})"
        if self.case_tag == "d-then-e":
            head += f" as G({self.m},4)"
        return f"{head}\n<a, b : {rels}>"

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "case": self.case_tag,
            "a_order": self.a_order,
            "b_order": self.b_order,
            "swapped": self.swapped,
            "s": self.s,
            "m": self.m,
            "relations": [str(r) for r in self.relations],
        }


def _g(text: str) -> GWord:
    return GWord.parse(text)


def _cyclic_word(g: str) -> Callable:
    return lambda x: GWord.gen(g, x)


def _dihedral_word(g: str, refl: GWord) -> Callable:
    return lambda x: GWord.gen(g, x[0]) * (refl if x[1] else GWord())


_CUBE = CubeGroup()
US_MAT = mat_mul(U_MAT, S_MAT)
S2_MAT = mat_mul(S_MAT, S_MAT)
# conjugator carrying the x axis to the y axis: U S U^-1, a quarter turn about z
V_MAT = mat_mul(mat_mul(U_MAT, S_MAT), mat_transpose(U_MAT))


def _cube_word(m: int) -> Callable:
    fixed = {I3: GWord(), S_MAT: _g("b"), US_MAT: GWord.gen("a", m // 4) * _g("b")}

    def f(x):
        if x in fixed:
            return fixed[x]
        syl = [("a", e * (m // 4)) if n == "U" else ("b", e) for n, e in _CUBE.word(x)]
        return GWord.from_syllables(syl)

    return f


def _case_e_engine(m: int) -> Amalgam:
    Dm = Dihedral(m)
    return Amalgam(
        (Dm, _CUBE),
        (((m // 4, 0), U_MAT), ((0, 1), S2_MAT)),
        (_dihedral_word("a", GWord.gen("b", 2)), _cube_word(m)),
        preferred=(None, [I3, S_MAT, US_MAT]),
    )


def normalize_pair(p: int, q: int) -> tuple[int, int, bool]:
    """Order the pair so that a listed case applies; returns (p', q', swapped)."""
    if p < 3 or q < 3:
        raise UnsupportedPairError(f"G(p,q) needs p, q >= 3, got ({p}, {q})")
    if p % 2 == 1 and q % 2 == 0:
        return q, p, True
    if p % 4 == 2 and q % 4 == 0:
        return q, p, True
    return p, q, False


def presentation(p: int, q: int) -> Presentation:
    p0, q0 = p, q
    if p % 4 == 0 and q % 4 == 0:
        m = math.lcm(p, q)
        tag = "e" if q == 4 else "d-then-e"
        eng = _case_e_engine(m)
        rels = (
            GWord.gen("a", m),
            GWord.gen("b", 4),
            GWord.from_syllables([("a", m // 2), ("b", 1)]) ** 2,
            GWord.from_syllables([("a", 1), ("b", 2)]) ** 2,
            GWord.from_syllables([("a", m // 4), ("b", 1)]) ** 3,
        )
        pres = Presentation(p0, q0, tag, m, 4, rels, False, None, m, eng)
        pres._encode_input = _case_d_encoder(pres, p0, q0) if tag != "e" else pres.encode
        return pres
    p, q, swapped = normalize_pair(p, q)
    half = GWord.gen("a", p // 2) if p % 2 == 0 else None
    if p % 2 == 1:
        eng = Amalgam((Cyclic(p), Cyclic(q)), (), (_cyclic_word("a"), _cyclic_word("b")))
        pres = Presentation(p0, q0, "a", p, q, (GWord.gen("a", p), GWord.gen("b", q)), swapped, None, None, eng)
    elif q % 2 == 1:
        eng = Amalgam((Cyclic(p), Dihedral(q)), ((p // 2, (0, 1)),), (_cyclic_word("a"), _dihedral_word("b", half)))
        rels = (GWord.gen("a", p), GWord.gen("b", q), GWord.from_syllables([("a", p // 2), ("b", 1)]) ** 2)
        pres = Presentation(p0, q0, "b", p, q, rels, swapped, None, None, eng)
    elif (q // 2) % 2 == 1:
        s = q // 2
        eng = Amalgam(
            (Dihedral(p), Dihedral(q)),
            (((p // 2, 0), (0, 1)), ((0, 1), (s, 0))),
            (_dihedral_word("a", GWord.gen("b", s)), _dihedral_word("b", half)),
        )
        rels = (
            GWord.gen("a", p),
            GWord.gen("b", q),
            GWord.from_syllables([("a", p // 2), ("b", 1)]) ** 2,
            GWord.from_syllables([("a", 1), ("b", s)]) ** 2,
        )
        pres = Presentation(p0, q0, "c", p, q, rels, swapped, s, None, eng)
    else:  # pragma: no cover - normalisation makes this unreachable
        raise UnsupportedPairError(f"no case applies to ({p}, {q})")
    if swapped:
        pres._encode_input = lambda w, pr=pres: pr.encode(w.swap_generators())
    else:
        pres._encode_input = pres.encode
    return pres


def _case_d_encoder(pres: Presentation, p: int, q: int) -> Callable:
    """a -> T^(m/p); b -> V T^(m/q) V^-1 with V the quarter turn about z."""
    m = pres.m
    Dm = pres.engine.factors[0]

    def enc(w: GWord) -> list:
        out = []
        for g, e in w.syllables:
            if g == "a":
                out.append((0, Dm.rot(e * (m // p))))
            else:
                out.extend([(1, V_MAT), (0, Dm.rot(e * (m // q))), (1, mat_transpose(V_MAT))])
        return out

    return enc


# ---------------------------------------------------------------------------
# public operations


@dataclass(frozen=True)
class Finite:
    n: int

    def __str__(self) -> str:
        return f"finite, order {self.n}"


@dataclass(frozen=True)
class Infinite:
    def __str__(self) -> str:
        return "infinite"


OrderResult = Finite | Infinite


def _letters(w: GWord, pres: Presentation, frame: str) -> list:
    if frame == "input":
        return pres.encode_input(w)
    if frame == "presentation":
        return pres.encode(w)
    raise ValueError(f"unknown frame {frame!r}")


def normal_form(w: GWord, pres: Presentation, frame: str = "input") -> GWord:
    """Canonical word over the presentation's generators.

    ``frame="input"`` reads ``w`` in the generators of ``G(p, q)``;
    ``frame="presentation"`` reads it in the presentation's own generators
    (use this to re-normalise an output).
    """
    eng = pres.engine
    return eng.to_word(eng.normal_form(_letters(w, pres, frame)))


def equal(w1: GWord, w2: GWord, pres: Presentation, frame: str = "input") -> bool:
    eng = pres.engine
    return eng.normal_form(_letters(w1, pres, frame)) == eng.normal_form(_letters(w2, pres, frame))


def order(w: GWord, pres: Presentation, frame: str = "input") -> OrderResult:
    """Order of ``w``; case e uses the cube-group coset procedure, the rest the half-turn reduction."""
    nf = pres.engine.normal_form(_letters(w, pres, frame))
    if pres.m is not None:
        n = case_e_order(case_e_form(nf, pres), pres)
    else:
        n = pres.engine.order(nf)
    return Infinite() if n is None else Finite(n)


def order_by_amalgam(w: GWord, pres: Presentation, frame: str = "input") -> OrderResult:
    """Order via cyclic reduction in the amalgamated product; used to cross-check :func:`order`."""
    n = pres.engine.order(pres.engine.normal_form(_letters(w, pres, frame)))
    return Infinite() if n is None else Finite(n)


# ---------------------------------------------------------------------------
# case e: the W S T^a1 ... S T^an E form


H1 = "H1"
H1S = "H1S"
H1SU = "H1SU"


def _g44_table() -> dict:
    table = {}
    for tag, tail in ((H1, I3), (H1S, S_MAT), (H1SU, mat_mul(S_MAT, U_MAT))):
        for a in (0, 1):
            for b in range(4):
                table[mat_mul(mat_mul(cube_power(S2_MAT, a), cube_power(U_MAT, b)), tail)] = (tag, a, b)
    if len(table) != 24:
        raise AssertionError("H1, H1 S, H1 S U do not partition the cube group")
    return table


_G44 = _g44_table()


def g44_decompose(e) -> tuple[str, int, int]:
    """``e = (S^2)^a U^b t`` with ``t`` in {1, S, SU}; returns (coset tag, a, b)."""
    return _G44[e]


def g44_coset(e) -> str:
    """Right coset of H1 = <U, S^2> containing the cube element ``e`` (a matrix or a word in S, U)."""
    if isinstance(e, str):
        e = cube_element(e)
    return g44_decompose(e)[0]


def cube_element(text: str):
    """Evaluate a word such as ``S^2 U`` or ``S U`` in the cube group."""
    out = I3
    for name, e in _parse_su(text):
        out = mat_mul(out, cube_power(U_MAT if name == "U" else S_MAT, e))
    return out


def _parse_su(text: str) -> list:
    out = []
    for tok in text.split():
        name, _, exp = tok.partition("^")
        if name not in ("S", "U"):
            raise ValueError(f"cube words use S and U, got {tok!r}")
        out.append((name, int(exp) if exp else 1))
    return out


@dataclass(frozen=True)
class CaseEForm:
    """``W S T^a1 S T^a2 ... S T^an E`` with W, E cube elements and each a_j not a multiple of m/4."""

    W: tuple
    exponents: tuple
    E: tuple

    @property
    def n(self) -> int:
        return len(self.exponents)

    def letters(self, m: int) -> list:
        out = [(1, self.W)]
        for a in self.exponents:
            out += [(1, S_MAT), (0, (a % m, 0))]
        out.append((1, self.E))
        return out

    def coset(self) -> str:
        """Coset tag of E W, the trailing factor after conjugating W away."""
        return g44_coset(mat_mul(self.E, self.W))


def case_e_form(nf: tuple, pres: Presentation) -> CaseEForm:
    m = pres.m
    quarter = m // 4
    reps, h = nf
    W = None
    exps: list[int] = []
    acc = I3
    for side, x in reps:
        if side == 1:
            acc = mat_mul(acc, x)
            continue
        r = x[0]  # representatives of D_m cosets are pure rotations
        lead = mat_mul(acc, mat_transpose(S_MAT))  # acc = lead * S
        if W is None:
            W = lead
        else:
            # lead must be a power of U, which joins the previous T exponent
            j = next(j for j in range(4) if cube_power(U_MAT, j) == lead)
            exps[-1] += j * quarter
        exps.append(r)
        acc = I3
    h_cube = mat_mul(cube_power(U_MAT, h[0] // quarter), cube_power(S2_MAT, h[1]))
    E = mat_mul(acc, h_cube)
    if W is None:
        return CaseEForm(I3, (), E)
    return CaseEForm(W, tuple(e % m for e in exps), E)


def reduce_h1s(form: CaseEForm, pres: Presentation) -> CaseEForm:
    """One conjugation step lowering n (possibly by more than one) when E W lies in H1 S (requires n >= 2)."""
    m = pres.m
    E = mat_mul(form.E, form.W)
    tag, a, b = g44_decompose(E)
    if tag != H1S or form.n < 2:
        raise ValueError("reduction applies only to n >= 2 with E in H1 S")
    a1, *rest = form.exponents
    sign_a = -1 if a else 1
    rest[-1] = rest[-1] + sign_a * b * (m // 4) - sign_a * a1
    letters = []
    for x in rest:
        letters += [(1, S_MAT), (0, (x % m, 0))]
    letters.append((1, cube_power(S2_MAT, a + 1)))
    return case_e_form(pres.engine.normal_form(letters), pres)


def case_e_order(form: CaseEForm, pres: Presentation) -> int | None:
    m = pres.m
    while True:
        if form.n == 0:
            return _CUBE.order(mat_mul(form.W, form.E))
        tag, a, b = g44_decompose(mat_mul(form.E, form.W))
        if tag != H1S:
            return None
        if form.n == 1:
            c = form.exponents[0] + (-1 if a else 1) * b * (m // 4)
            d = (a + 1) % 2
            return 2 if d else m // math.gcd(c, m)
        form = reduce_h1s(form, pres)
