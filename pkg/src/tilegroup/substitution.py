"""Substitution tiling systems: rule files, validation, supertile generation."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .geometry import (
    DegeneratePolygonError,
    Isometry2,
    Point,
    Rotation2,
    interiors_overlap,
    is_convex,
    on_segment,
    orient,
    point_in_polygon,
    point_key,
    signed_area2,
)
from .qfield import QScalar
from .segments import boundary_edges, edge_multiset, merge_segments, polygon_edges

DEFAULT_MAX_TILES = 200_000
DEFAULT_PARALLEL_CAP = 8


class RuleFileError(ValueError):
    """Rule document could not be parsed."""


class RuleValidationError(ValueError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        failed = ", ".join(f"condition {c}" for c in report.failed())
        super().__init__(f"rule fails {failed}")


class ResourceCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class Prototile:
    id: int
    label: str
    vertices: tuple
    chirality: str = "base"

    def __post_init__(self):
        if self.chirality not in ("base", "reflected"):
            raise ValueError(f"chirality must be base or reflected, got {self.chirality!r}")
        if len(self.vertices) < 3:
            raise DegeneratePolygonError(f"prototile {self.id} has fewer than 3 vertices")
        if signed_area2(self.vertices).sign() <= 0:
            raise DegeneratePolygonError(
                f"prototile {self.id} must be counterclockwise with positive area"
            )


@dataclass(frozen=True)
class Child:
    proto: int
    pose: Isometry2


@dataclass(frozen=True)
class PlacedTile:
    proto: int
    pose: Isometry2

    def transformed(self, g: Isometry2) -> PlacedTile:
        return PlacedTile(self.proto, g.compose(self.pose))


@dataclass(frozen=True)
class Patch:
    tiles: tuple
    level_hint: int | None = None

    def __len__(self) -> int:
        return len(self.tiles)

    def __iter__(self):
        return iter(self.tiles)

    def transform(self, g: Isometry2) -> Patch:
        return Patch(tuple(t.transformed(g) for t in self.tiles), self.level_hint)

    def counts(self) -> Counter:
        return Counter(t.proto for t in self.tiles)


@dataclass
class SubstitutionSystem:
    field_D: int
    alphabet: tuple
    expansion: QScalar
    children: dict
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def proto(self, pid: int) -> Prototile:
        for p in self.alphabet:
            if p.id == pid:
                return p
        raise KeyError(f"prototile id {pid} not in alphabet")

    @property
    def ids(self) -> list[int]:
        return [p.id for p in self.alphabet]

    def tile_polygon(self, tile: PlacedTile) -> list[Point]:
        verts = self.proto(tile.proto).vertices
        pts = [tile.pose.apply(v) for v in verts]
        # a reflected pose reverses orientation; keep polygons counterclockwise
        return pts[::-1] if tile.pose.reflect else pts

    def scaled_prototile(self, pid: int, power: int = 1) -> list[Point]:
        lam = self.expansion ** power
        return [(x * lam, y * lam) for x, y in self.proto(pid).vertices]

    def child_polygons(self, pid: int) -> list[list[Point]]:
        return [self.tile_polygon(PlacedTile(c.proto, c.pose)) for c in self.children[pid]]

    def substitution_matrix(self) -> dict[int, Counter]:
        return {pid: Counter(c.proto for c in self.children[pid]) for pid in self.ids}


# ---------------------------------------------------------------------------
# rule files


def _scalar(obj, D: int) -> QScalar:
    try:
        return QScalar.from_json(obj, D)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise RuleFileError(f"bad exact number {obj!r}: {exc}") from exc


def _point(obj, D: int) -> Point:
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise RuleFileError(f"a point needs two coordinates, got {obj!r}")
    return (_scalar(obj[0], D), _scalar(obj[1], D))


def parse_system(doc: dict, name: str = "") -> SubstitutionSystem:
    """Build a system from a decoded rule document without validating it."""
    try:
        D = int(doc["field_d"])
        expansion = _scalar(doc["expansion"], D)
        protos = []
        for entry in doc["prototiles"]:
            if any(isinstance(c, float) for v in entry["vertices"] for c in _flat(v)):
                raise RuleFileError("floating point numbers are not allowed in rule files")
            protos.append(
                Prototile(
                    int(entry["id"]),
                    str(entry.get("label", entry["id"])),
                    tuple(_point(v, D) for v in entry["vertices"]),
                    entry.get("chirality", "base"),
                )
            )
        ids = {p.id for p in protos}
        if len(ids) != len(protos):
            raise RuleFileError("duplicate prototile ids")
        children: dict[int, tuple] = {}
        for key, kids in doc["children"].items():
            pid = int(key)
            row = []
            for kid in kids:
                cid = int(kid.get("id", kid.get("child")))
                if cid not in ids:
                    raise RuleFileError(f"child id {cid} of parent {pid} not in alphabet")
                rot = kid["rotation"]
                r = Rotation2(_scalar(rot["c"], D), _scalar(rot["s"], D))
                pose = Isometry2(r, bool(kid.get("reflect", False)), _point(kid["translation"], D))
                row.append(Child(cid, pose))
            children[pid] = tuple(row)
        missing = ids - set(children)
        if missing:
            raise RuleFileError(f"no substitution given for prototiles {sorted(missing)}")
    except RuleFileError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise RuleFileError(f"malformed rule document: {exc!r}") from exc
    return SubstitutionSystem(D, tuple(protos), expansion, children, name=doc.get("name") or name)


def _flat(v):
    if isinstance(v, (list, tuple)):
        for x in v:
            yield from _flat(x)
    elif isinstance(v, dict):
        yield from v.values()
    else:
        yield v


def load_system(document, validate: bool = True, parallel_cap: int = DEFAULT_PARALLEL_CAP) -> SubstitutionSystem:
    """Load a rule file (path, JSON text or decoded dict); validate unless told not to."""
    name = ""
    if isinstance(document, dict):
        doc = document
    else:
        text = None
        if isinstance(document, Path) or (isinstance(document, str) and not document.lstrip().startswith("{")):
            path = Path(document)
            name = path.stem
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise RuleFileError(f"cannot read {path}: {exc}") from exc
        else:
            text = document
        try:
            doc = json.loads(text, parse_float=_reject_float)
        except json.JSONDecodeError as exc:
            raise RuleFileError(f"invalid JSON: {exc}") from exc
    sys_ = parse_system(doc, name=name)
    if validate:
        report = validate_rule(sys_, parallel_cap=parallel_cap)
        if not report.ok:
            raise RuleValidationError(report)
    return sys_


def _reject_float(s: str):
    raise RuleFileError(f"floating point literal {s} in rule file; use rational strings")


def bundled_rule_path(name: str) -> Path:
    fname = name if name.endswith(".json") else f"{name}.json"
    return Path(str(resources.files("tilegroup") / "rules" / fname))


def bundled_system(name: str) -> SubstitutionSystem:
    key = ("bundled", name)
    if key not in _BUNDLED:
        _BUNDLED[key] = load_system(bundled_rule_path(name))
    return _BUNDLED[key]


_BUNDLED: dict = {}


def system_to_json(sys_: SubstitutionSystem) -> dict:
    def pt(p):
        return [[str(p[0].a), str(p[0].b)], [str(p[1].a), str(p[1].b)]]

    return {
        "name": sys_.name,
        "field_d": sys_.field_D,
        "expansion": sys_.expansion.to_json(),
        "prototiles": [
            {"id": p.id, "label": p.label, "chirality": p.chirality, "vertices": [pt(v) for v in p.vertices]}
            for p in sys_.alphabet
        ],
        "children": {
            str(pid): [
                {
                    "id": c.proto,
                    "rotation": c.pose.rot.to_json(),
                    "reflect": c.pose.reflect,
                    "translation": pt(c.pose.trans),
                }
                for c in kids
            ]
            for pid, kids in sys_.children.items()
        },
    }


# ---------------------------------------------------------------------------
# substitution


def substitute(sys_: SubstitutionSystem, patch: Patch) -> Patch:
    """Replace every tile by its children under the conjugated pose; canonically ordered."""
    lam = sys_.expansion
    out = []
    for tile in patch.tiles:
        try:
            kids = sys_.children[tile.proto]
        except KeyError:
            raise KeyError(f"prototile id {tile.proto} not in alphabet") from None
        g = tile.pose.conjugate_by_scaling(lam)
        for c in kids:
            out.append(PlacedTile(c.proto, g.compose(c.pose)))
    out.sort(key=_tile_key)
    level = None if patch.level_hint is None else patch.level_hint + 1
    return Patch(tuple(out), level)


def _tile_key(t: PlacedTile):
    p = t.pose
    r = p.rot
    return (t.proto, p.reflect, _qk(r.c), _qk(r.s), _qk(p.trans[0]), _qk(p.trans[1]))


def _qk(x: QScalar):
    # cross-multiplied comparison key on (a, b) without building Fractions
    return (Fraction(x._p, x._d), Fraction(x._q, x._d))


def predicted_counts(sys_: SubstitutionSystem, pid: int, n: int) -> Counter:
    counts = Counter({pid: 1})
    mat = sys_.substitution_matrix()
    for _ in range(n):
        nxt: Counter = Counter()
        for t, k in counts.items():
            for c, m in mat[t].items():
                nxt[c] += k * m
        counts = nxt
    return counts


def supertile(sys_: SubstitutionSystem, pid: int, n: int, max_tiles: int = DEFAULT_MAX_TILES) -> Patch:
    """The level-n supertile of type ``pid``, anchored at the prototile's own frame."""
    if n < 0:
        raise ValueError("level must be >= 0")
    sys_.proto(pid)
    total = sum(predicted_counts(sys_, pid, n).values())
    if total > max_tiles:
        raise ResourceCapError(f"level {n} supertile has {total} tiles, cap is {max_tiles}")
    key = ("supertile", pid, n)
    cached = sys_._cache.get(key)
    if cached is not None:
        return cached
    if n == 0:
        patch = Patch((PlacedTile(pid, Isometry2.identity(sys_.field_D)),), 0)
    else:
        patch = substitute(sys_, supertile(sys_, pid, n - 1, max_tiles))
    sys_._cache[key] = patch
    return patch


# ---------------------------------------------------------------------------
# validation


@dataclass
class ConditionResult:
    passed: bool
    detail: str
    data: dict = field(default_factory=dict)


@dataclass
class ValidationReport:
    conditions: dict

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.conditions.values())

    def failed(self) -> list[str]:
        return [k for k, r in self.conditions.items() if not r.passed]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "conditions": {
                k: {"passed": r.passed, "detail": r.detail, **r.data} for k, r in self.conditions.items()
            },
        }

    def text(self) -> str:
        lines = []
        for k, r in self.conditions.items():
            lines.append(f"condition {k}: {'PASS' if r.passed else 'FAIL'} - {r.detail}")
        return "\n".join(lines)


def validate_rule(sys_: SubstitutionSystem, parallel_cap: int = DEFAULT_PARALLEL_CAP) -> ValidationReport:
    conds = {
        "i": _check_expansion(sys_),
        "ii": _check_partition(sys_),
        "iii": _check_all_types(sys_),
        "v": _check_parallel(sys_, parallel_cap),
    }
    return ValidationReport(conds)


def _check_expansion(sys_: SubstitutionSystem) -> ConditionResult:
    lam = sys_.expansion
    if lam.cmp(1) <= 0:
        return ConditionResult(False, f"expansion {lam} is not > 1")
    # equivariance of substitute under a fixed non-trivial pose, exact
    D = sys_.field_D
    g = Isometry2(Rotation2.of(Fraction(3, 5), Fraction(4, 5), D), False, (QScalar(1, 0, D), QScalar(-2, 0, D)))
    for p in sys_.alphabet:
        base = Patch((PlacedTile(p.id, Isometry2.identity(D)),))
        lhs = substitute(sys_, base.transform(g))
        rhs = substitute(sys_, base).transform(g.conjugate_by_scaling(lam))
        if set(lhs.tiles) != set(rhs.tiles):
            return ConditionResult(False, f"substitution not equivariant for prototile {p.id}")
    return ConditionResult(True, f"expansion {lam} > 1; substitution equivariant")


def _contained(child: Sequence[Point], parent: Sequence[Point]) -> bool:
    if any(point_in_polygon(v, parent) < 0 for v in child):
        return False
    if is_convex(parent):
        return True
    n, m = len(child), len(parent)
    for i in range(n):
        a, b = child[i], child[(i + 1) % n]
        for j in range(m):
            c, d = parent[j], parent[(j + 1) % m]
            if orient(a, b, c) * orient(a, b, d) < 0 and orient(c, d, a) * orient(c, d, b) < 0:
                return False
    return True


def _check_partition(sys_: SubstitutionSystem) -> ConditionResult:
    problems = []
    lam2 = sys_.expansion * sys_.expansion
    for p in sys_.alphabet:
        parent = sys_.scaled_prototile(p.id)
        kids = sys_.child_polygons(p.id)
        tag = f"prototile {p.id}"
        for k, poly in enumerate(kids):
            if not _contained(poly, parent):
                problems.append(f"{tag}: child {k} leaves the scaled parent")
        for i in range(len(kids)):
            for j in range(i + 1, len(kids)):
                if interiors_overlap(kids[i], kids[j]):
                    problems.append(f"{tag}: children {i} and {j} overlap")
        area = sum((signed_area2(poly) for poly in kids), QScalar(0, 0, sys_.field_D))
        if area != signed_area2(p.vertices) * lam2:
            problems.append(f"{tag}: child areas sum to {area / 2}, expected {signed_area2(p.vertices) * lam2 / 2}")
        edges = [e for poly in kids for e in polygon_edges(poly)]
        if merge_segments(boundary_edges(edges)) != merge_segments(polygon_edges(parent)):
            problems.append(f"{tag}: union boundary differs from the scaled parent (gap or overlap)")
        problems.extend(f"{tag}: {msg}" for msg in _face_to_face(edges, parent))
    if not problems:
        # full faces must also persist one level further down
        for p in sys_.alphabet:
            try:
                patch = supertile(sys_, p.id, 2, max_tiles=20_000)
            except ResourceCapError:
                continue
            edges = [e for t in patch.tiles for e in polygon_edges(sys_.tile_polygon(t))]
            msgs = _face_to_face(edges, sys_.scaled_prototile(p.id, 2))
            problems.extend(f"prototile {p.id} level 2: {m}" for m in msgs)
    if problems:
        return ConditionResult(False, "; ".join(problems[:6]), {"problems": problems})
    return ConditionResult(True, "children partition each scaled prototile exactly and meet full face to full face")


def _face_to_face(edges: list, parent: Sequence[Point]) -> list[str]:
    """Every edge is either on the parent's boundary or shared exactly with one other edge."""
    msgs = []
    counts = edge_multiset(edges)
    pn = len(parent)
    for (ka, kb), (fwd, back, pts) in counts.items():
        if fwd + back == 2 and fwd == 1 and back == 1:
            continue
        if fwd + back == 1:
            a, b = pts
            if any(on_segment(a, parent[j], parent[(j + 1) % pn]) and on_segment(b, parent[j], parent[(j + 1) % pn]) for j in range(pn)):
                continue
            msgs.append(f"edge {_fmt(a)}-{_fmt(b)} is not a full face of a neighbour")
        else:
            msgs.append(f"edge {_fmt(pts[0])}-{_fmt(pts[1])} is used {fwd + back} times")
        if len(msgs) >= 4:
            break
    return msgs


def _fmt(p: Point) -> str:
    return f"({p[0]}, {p[1]})"


def _check_all_types(sys_: SubstitutionSystem) -> ConditionResult:
    ids = set(sys_.ids)
    missing = {pid: sorted(ids - {c.proto for c in sys_.children[pid]}) for pid in sys_.ids}
    missing = {k: v for k, v in missing.items() if v}
    if missing:
        return ConditionResult(
            False,
            "; ".join(f"substitute of {k} lacks types {v}" for k, v in missing.items()),
            {"missing": {str(k): v for k, v in missing.items()}},
        )
    return ConditionResult(True, "every substituted prototile contains every type")


def orientation_classes(sys_: SubstitutionSystem, pid: int, n: int) -> set:
    """Distinct (type, reflect, rotation) triples of the tiles of the level-n supertile."""
    key = ("classes", pid, n)
    if key in sys_._cache:
        return sys_._cache[key]
    if n == 0:
        out = {(pid, False, Rotation2.identity(sys_.field_D))}
    else:
        out = set()
        for t, refl, r in orientation_classes(sys_, pid, n - 1):
            for c in sys_.children[t]:
                rr = r.inverse() if c.pose.reflect else r
                g_rot = rr @ c.pose.rot
                out.add((c.proto, refl != c.pose.reflect, g_rot))
    sys_._cache[key] = out
    return out


def _check_parallel(sys_: SubstitutionSystem, cap: int) -> ConditionResult:
    found = {}
    for p in sys_.alphabet:
        ident = Rotation2.identity(sys_.field_D)
        found[p.id] = None
        for n in range(1, cap + 1):
            if (p.id, False, ident) in orientation_classes(sys_, p.id, n):
                found[p.id] = n
                break
    data = {"n_a": {str(k): v for k, v in found.items()}, "cap": cap}
    missing = [k for k, v in found.items() if v is None]
    if missing:
        return ConditionResult(False, f"no parallel same-type tile within level {cap} for {missing}", data)
    return ConditionResult(True, "parallel same-type tile at levels " + ", ".join(f"{k}: {v}" for k, v in found.items()), data)


def iter_tile_polygons(sys_: SubstitutionSystem, patch: Patch) -> Iterable[list[Point]]:
    for t in patch.tiles:
        yield sys_.tile_polygon(t)


def union_matches_scaled_prototile(sys_: SubstitutionSystem, pid: int, n: int, patch: Patch | None = None) -> bool:
    """Exact check that the union of the level-n supertile is |phi|^n times the prototile."""
    patch = patch or supertile(sys_, pid, n)
    edges = []
    area = QScalar(0, 0, sys_.field_D)
    for poly in iter_tile_polygons(sys_, patch):
        edges.extend(polygon_edges(poly))
        area = area + signed_area2(poly)
    target = sys_.scaled_prototile(pid, n)
    if area != signed_area2(target):
        return False
    counts = edge_multiset(edges)
    if any(f + b > 2 or (f + b == 2 and f != 1) for f, b, _ in counts.values()):
        return False
    return merge_segments(boundary_edges(edges)) == merge_segments(polygon_edges(target))


def point_keys(poly: Sequence[Point]) -> list:
    return [point_key(v) for v in poly]


def face_to_face_defects(sys_: SubstitutionSystem, patch: Patch) -> int:
    """Edges used more than twice or twice in the same direction (0 for a face-to-face patch)."""
    edges = [e for poly in iter_tile_polygons(sys_, patch) for e in polygon_edges(poly)]
    return sum(1 for f, b, _ in edge_multiset(edges).values() if f + b > 2 or f > 1 or b > 1)
