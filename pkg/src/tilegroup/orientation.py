"""Relative tile orientations and the rotation group they generate.

For a fixed anchor tile ``a`` of type ``j``, the relative orientation of
another type-``j`` tile ``x`` is the rotation carrying ``a`` parallel to
``x``.  Chirality is part of the type, so only tiles whose pose has the same
reflection flag as the anchor are compared and every relative orientation is a
proper rotation.

Rotations with rational entries whose denominators are powers of 5 are
canonicalised as ``q^k * rho^m`` where ``q`` is the quarter turn and
``rho = rot(3/5, 4/5)``; the subgroup they generate is then recorded as an
integer lattice of ``(k, m)`` coordinates, which makes group equality exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import Isometry2, RationalTurn, Rotation2, classify_angle
from .qfield import QScalar
from .substitution import Patch, PlacedTile, SubstitutionSystem, orientation_classes

BASIS_NAME = "quarter-turn, rho=rot(3/5,4/5)"


class NoTileOfTypeError(ValueError):
    pass


def _quarter(D: int) -> Rotation2:
    return Rotation2.of(0, 1, D)


def _rho(D: int) -> Rotation2:
    return Rotation2.of(Fraction(3, 5), Fraction(4, 5), D)


def relative_rotation(anchor: Isometry2, other: Isometry2) -> Rotation2:
    """Linear part of ``other o anchor^-1`` for two poses with the same reflection flag."""
    if anchor.reflect != other.reflect:
        raise ValueError("relative orientation between tiles of opposite chirality")
    r = other.rot @ anchor.rot.inverse()
    # F R_x R_a^-1 F = (R_x R_a^-1)^-1
    return r.inverse() if anchor.reflect else r


# ---------------------------------------------------------------------------
# orientation sets


@dataclass(frozen=True)
class OrientationSet:
    proto_id: int
    base_tile: PlacedTile
    rotations: frozenset
    skipped_opposite_chirality: int = 0

    @property
    def D(self) -> int:
        return self.base_tile.pose.D

    def sorted(self) -> list[Rotation2]:
        return sorted(self.rotations, key=Rotation2.key)

    def __len__(self) -> int:
        return len(self.rotations)


def _select_anchor(patch: Patch, j: int, a) -> PlacedTile:
    if isinstance(a, PlacedTile):
        if a.proto != j:
            raise ValueError(f"anchor tile has type {a.proto}, expected {j}")
        return a
    typed = [t for t in patch.tiles if t.proto == j]
    if not typed:
        raise NoTileOfTypeError(f"patch has no tile of type {j}")
    if a is None:
        return typed[0]
    if isinstance(a, int):
        tile = patch.tiles[a]
        if tile.proto != j:
            raise ValueError(f"tile {a} has type {tile.proto}, expected {j}")
        return tile
    raise TypeError(f"cannot select an anchor tile from {a!r}")


def relative_orientations(patch: Patch, j: int, a: int | PlacedTile | None = None) -> OrientationSet:
    """Relative rotations of every type-``j`` tile of ``patch`` with respect to the anchor ``a``.

    ``a`` is an index into ``patch.tiles``, a placed tile, or ``None`` for the
    first type-``j`` tile.  The anchor need not belong to the patch.
    """
    anchor = _select_anchor(patch, j, a)
    out = {Rotation2.identity(anchor.pose.D)}
    skipped = 0
    for t in patch.tiles:
        if t.proto != j:
            continue
        if t.pose.reflect != anchor.pose.reflect:
            skipped += 1
            continue
        out.add(relative_rotation(anchor.pose, t.pose))
    return OrientationSet(j, anchor, frozenset(out), skipped)


def anchor_chain(sys_: SubstitutionSystem, pid: int, n: int, j: int | None = None) -> PlacedTile:
    """The level-``n`` anchor: start from the level-0 tile and follow the first type-``j`` child.

    ``j`` defaults to ``pid``.  Raises if some tile on the chain has no type-``j`` child.
    """
    j = pid if j is None else j
    tile = PlacedTile(pid, Isometry2.identity(sys_.field_D))
    for _ in range(n):
        kids = [c for c in sys_.children[tile.proto] if c.proto == j]
        if not kids:
            raise NoTileOfTypeError(f"prototile {tile.proto} has no child of type {j}")
        g = tile.pose.conjugate_by_scaling(sys_.expansion)
        tile = PlacedTile(j, g.compose(kids[0].pose))
    if tile.proto != j:
        raise NoTileOfTypeError(f"anchor at level 0 has type {pid}, expected {j}")
    return tile


def supertile_orientations(sys_: SubstitutionSystem, pid: int, n: int, j: int | None = None) -> OrientationSet:
    """Orientation set of type-``j`` tiles in the level-``n`` supertile, anchored by :func:`anchor_chain`.

    Relative rotations depend only on each tile's linear part, so this works from the
    distinct (type, reflection, rotation) classes and never builds the patch. Here
    ``skipped_opposite_chirality`` counts classes, not tiles.
    """
    j = pid if j is None else j
    anchor = anchor_chain(sys_, pid, n, j)
    D = sys_.field_D
    z = QScalar(0, 0, D)
    out = {Rotation2.identity(D)}
    skipped = 0
    for t, refl, rot in orientation_classes(sys_, pid, n):
        if t != j:
            continue
        if refl != anchor.pose.reflect:
            skipped += 1
            continue
        out.add(relative_rotation(anchor.pose, Isometry2(rot, refl, (z, z))))
    return OrientationSet(j, anchor, frozenset(out), skipped)


# ---------------------------------------------------------------------------
# decomposition in <quarter-turn, rho>


@dataclass(frozen=True)
class Decomposition:
    k: int
    m: int

    def recompose(self, D: int) -> Rotation2:
        return (_quarter(D) ** self.k) @ (_rho(D) ** self.m)

    def __str__(self) -> str:
        return f"(k={self.k}, m={self.m})"


@dataclass(frozen=True)
class DecompositionFailure:
    reason: str

    def __bool__(self) -> bool:
        return False


def _five_power(n: int) -> int | None:
    h = 0
    while n % 5 == 0:
        n //= 5
        h += 1
    return h if n == 1 else None


def decompose_in_basis(r: Rotation2) -> Decomposition | DecompositionFailure:
    """Write ``r`` as ``q^k rho^m`` exactly, or return a failure tag.

    Works on the Gaussian integer ``z = 5^h (c + i s)``: multiplying by
    ``3 - 4i`` (that is, by ``rho^-1``) or by ``3 + 4i`` lowers the height
    ``h`` by one whenever ``r`` is in the group, and at height 0 ``z`` is a unit.
    """
    if not (r.c.is_rational() and r.s.is_rational()):
        return DecompositionFailure(f"{r} has irrational entries")
    c, s = r.c.a, r.s.a
    den = math.lcm(c.denominator, s.denominator)
    h = _five_power(den)
    if h is None:
        return DecompositionFailure(f"{r} has a denominator that is not a power of 5")
    x, y = int(c * den), int(s * den)
    m = 0
    while h > 0:
        # z * (3 - 4i) and z * (3 + 4i)
        down = (3 * x + 4 * y, 3 * y - 4 * x)
        up = (3 * x - 4 * y, 3 * y + 4 * x)
        if down[0] % 25 == 0 and down[1] % 25 == 0:
            x, y = down[0] // 25, down[1] // 25
            m += 1
        elif up[0] % 25 == 0 and up[1] % 25 == 0:
            x, y = up[0] // 25, up[1] // 25
            m -= 1
        else:
            return DecompositionFailure(f"{r} cannot be reduced below 5-adic height {h}")
        h -= 1
    units = {(1, 0): 0, (0, 1): 1, (-1, 0): 2, (0, -1): 3}
    k = units.get((x, y))
    if k is None:
        return DecompositionFailure(f"{r} reduces to a non-unit")
    return Decomposition(k, m)


# ---------------------------------------------------------------------------
# lattice of coordinates


@dataclass(frozen=True)
class CoordinateLattice:
    """Lattice ``{(k, m)}`` in Z^2 containing (4, 0), stored in echelon form.

    Basis: ``(step_k, 0)`` and ``(offset_k, step_m)`` with ``step_k | 4`` and
    ``0 <= offset_k < step_k``; ``step_m = 0`` means no irrational part.
    """

    step_k: int
    offset_k: int
    step_m: int

    def contains(self, d: Decomposition) -> bool:
        if self.step_m == 0:
            return d.m == 0 and d.k % self.step_k == 0
        if d.m % self.step_m:
            return False
        return (d.k - (d.m // self.step_m) * self.offset_k) % self.step_k == 0

    @property
    def torsion_order(self) -> int:
        """Order of the finite part of the generated group."""
        return 4 // self.step_k

    def to_json(self) -> dict:
        return {"step_k": self.step_k, "offset_k": self.offset_k, "step_m": self.step_m}


def _ext_gcd_combo(values: Sequence[int]) -> tuple[int, list[int]]:
    """gcd of ``values`` with integer coefficients realising it."""
    g, coeffs = 0, [0] * len(values)
    for i, v in enumerate(values):
        if v == 0:
            continue
        if g == 0:
            g, coeffs = abs(v), [0] * len(values)
            coeffs[i] = 1 if v > 0 else -1
            continue
        # extended Euclid on (g, v)
        a, b, x0, x1, y0, y1 = g, v, 1, 0, 0, 1
        while b:
            qt = a // b
            a, b = b, a - qt * b
            x0, x1 = x1, x0 - qt * x1
            y0, y1 = y1, y0 - qt * y1
        if a < 0:
            a, x0, y0 = -a, -x0, -y0
        coeffs = [c * x0 for c in coeffs]
        coeffs[i] += y0
        g = a
    return g, coeffs


def coordinate_lattice(points: Iterable[Decomposition]) -> CoordinateLattice:
    pts = [(d.k, d.m) for d in points]
    g, coeffs = _ext_gcd_combo([m for _, m in pts])
    if g == 0:
        t = math.gcd(4, *[k for k, _ in pts]) if pts else 4
        return CoordinateLattice(t, 0, 0)
    k0 = sum(c * k for c, (k, _) in zip(coeffs, pts))
    t = math.gcd(4, *[k - (m // g) * k0 for k, m in pts])
    return CoordinateLattice(t, k0 % t, g)


# ---------------------------------------------------------------------------
# descriptor


@dataclass(frozen=True)
class GroupDescriptor:
    torsion_order: int
    free_generators: tuple
    decomposition_basis: str | None
    coordinates: tuple = ()
    lattice: CoordinateLattice | None = None
    undecomposed: tuple = ()
    rational_turns: tuple = ()
    size: int = 0

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "torsion_order": self.torsion_order,
            "rational_turns": [str(t) for t in self.rational_turns],
            "free_generators": [g.to_json() for g in self.free_generators],
            "decomposition_basis": self.decomposition_basis,
            "lattice": self.lattice.to_json() if self.lattice else None,
            "generated_torsion_order": self.lattice.torsion_order if self.lattice else None,
            "coordinates": [
                {"rotation": r.to_json(), "k": d.k, "m": d.m} for r, d in self.coordinates
            ],
            "undecomposed": [r.to_json() for r in self.undecomposed],
        }

    def text(self) -> str:
        lines = [
            f"orientations: {self.size}",
            f"torsion order (rational turns in the set): {self.torsion_order}",
        ]
        if self.lattice is not None:
            lat = self.lattice
            lines.append(f"basis: {self.decomposition_basis}; all {len(self.coordinates)} rotations decompose")
            lines.append(
                f"generated lattice: ({lat.step_k}, 0), ({lat.offset_k}, {lat.step_m});"
                f" finite part of order {lat.torsion_order}"
            )
        else:
            lines.append(f"no common basis: {len(self.undecomposed)} rotations did not decompose")
        gens = ", ".join(str(g) for g in self.free_generators) or "none"
        lines.append(f"free generators: {gens}")
        return "\n".join(lines)


def group_descriptor(rs: OrientationSet | Iterable[Rotation2]) -> GroupDescriptor:
    rots = sorted(set(rs.rotations if isinstance(rs, OrientationSet) else rs), key=Rotation2.key)
    if not rots:
        raise ValueError("empty orientation set")
    D = rots[0].D
    turns = []
    irrational = []
    for r in rots:
        cls = classify_angle(r)
        if isinstance(cls, RationalTurn):
            turns.append(cls)
        else:
            irrational.append(r)
    torsion = math.lcm(*[t.denominator for t in turns]) if turns else 1
    coords, failed = [], []
    for r in rots:
        d = decompose_in_basis(r)
        if isinstance(d, Decomposition):
            coords.append((r, d))
        else:
            failed.append(r)
    if failed:
        return GroupDescriptor(
            torsion, tuple(irrational), None, tuple(coords), None, tuple(failed), tuple(sorted(set(turns), key=lambda t: (t.denominator, t.numerator))), len(rots)
        )
    lat = coordinate_lattice(d for _, d in coords)
    gens = ()
    if lat.step_m:
        gens = ((_quarter(D) ** lat.offset_k) @ (_rho(D) ** lat.step_m),)
    return GroupDescriptor(
        torsion,
        gens,
        BASIS_NAME,
        tuple(coords),
        lat,
        (),
        tuple(sorted(set(turns), key=lambda t: (t.denominator, t.numerator))),
        len(rots),
    )


def compare_descriptors(d1: GroupDescriptor, d2: GroupDescriptor) -> str:
    """``"equal"``, ``"distinct"`` or ``"undecided"``; only a common basis decides."""
    if d1.lattice is None or d2.lattice is None:
        return "undecided"
    return "equal" if d1.lattice == d2.lattice else "distinct"


@dataclass(frozen=True)
class ComparisonReport:
    verdict: str
    left: str
    right: str
    generator_product: str | None
    note: str | None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "left": self.left,
            "right": self.right,
            "generator_product": self.generator_product,
            "note": self.note,
        }

    def text(self) -> str:
        out = [f"comparison {self.left} vs {self.right}: {self.verdict}"]
        if self.generator_product:
            out.append(self.generator_product)
        if self.note:
            out.append(f"note: {self.note}")
        return "\n".join(out)


# generators commonly cited for the two pinwheel-family systems, as (cos, sin)
_CITED = {
    "pinwheel": (Fraction(3, 5), Fraction(4, 5)),  # 2 arctan(1/2)
    "pinwheel_variant": (Fraction(4, 5), Fraction(3, 5)),  # 2 arctan(1/3)
}


def compare_systems(name1: str, d1: GroupDescriptor, name2: str, d2: GroupDescriptor) -> ComparisonReport:
    verdict = compare_descriptors(d1, d2)
    product = note = None
    if {name1, name2} == set(_CITED):
        a = Rotation2.of(*_CITED["pinwheel"], 5)
        b = Rotation2.of(*_CITED["pinwheel_variant"], 5)
        prod = a @ b
        product = f"exact product of the cited generators: {a} * {b} = {prod}"
        if prod == _quarter(5):
            note = (
                "these systems are usually credited with the groups <pi/2, 2 arctan(1/2)> and "
                "<pi/2, 2 arctan(1/3)> and said to differ, but the two cited irrational generators "
                "differ by a quarter turn, so together with pi/2 they generate the same subgroup "
                f"of SO(2); the computed verdict here is '{verdict}'"
            )
    return ComparisonReport(verdict, name1, name2, product, note)


# ---------------------------------------------------------------------------
# finite-level inclusion checks


@dataclass
class InclusionReport:
    proto: int
    j: int
    k: int
    n: int
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "proto": self.proto,
            "j": self.j,
            "k": self.k,
            "n": self.n,
            "checked": self.checked,
            "violations": [{"rotation": r.to_json(), "detail": d} for r, d in self.violations],
            "ok": self.ok,
        }

    def text(self) -> str:
        head = f"type {self.j} at level {self.n} -> type {self.k} at level {self.n + 1}"
        if self.ok:
            return f"{head}: {self.checked} relative orientations, all included"
        first = self.violations[0]
        return f"{head}: {len(self.violations)} of {self.checked} missing, e.g. {first[0]} ({first[1]})"


def _type_rotations(classes: set, j: int, reflect: bool) -> set:
    return {r for t, refl, r in classes if t == j and refl == reflect}


def inclusion_check(sys_: SubstitutionSystem, j: int, k: int, n: int, proto: int | None = None) -> InclusionReport:
    """Check that relative orientations of type-``j`` tiles at level ``n`` reappear among type-``k`` tiles at level ``n+1``.

    Both levels are supertiles of ``proto`` (default ``j``).  Relative
    orientations are taken over all ordered pairs of same-chirality tiles, so
    the check does not depend on an anchor.
    """
    proto = j if proto is None else proto
    lo = orientation_classes(sys_, proto, n)
    hi = orientation_classes(sys_, proto, n + 1)
    report = InclusionReport(proto, j, k, n)
    for reflect in (False, True):
        src = _type_rotations(lo, j, reflect)
        if not src:
            continue
        tgt = _type_rotations(hi, k, reflect)
        tgt_pairs = {x @ y.inverse() for x in tgt for y in tgt}
        # the difference set is closed under inversion, so mirrored tiles need no special case
        seen = set()
        for x in src:
            for y in src:
                r = x @ y.inverse()
                if r in seen:
                    continue
                seen.add(r)
                report.checked += 1
                if r not in tgt_pairs:
                    report.violations.append((r, f"between tiles at rotations {x} and {y}"))
    return report


def monotonicity_check(sys_: SubstitutionSystem, pid: int, n: int, j: int | None = None) -> list[Rotation2]:
    """Rotations in the anchored set at level ``n`` that are missing at level ``n+1``."""
    lo = supertile_orientations(sys_, pid, n, j)
    hi = supertile_orientations(sys_, pid, n + 1, j)
    return sorted(lo.rotations - hi.rotations, key=Rotation2.key)
