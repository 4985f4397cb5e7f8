"""Regenerate the bundled rule files from child triangles drawn in the expanded frame.

The expanded parent is laid out with its hypotenuse on the x-axis from (0, 0) to
(h, 0) and its right-angle corner above; each child triangle is listed by its
three corners.  Child poses are recovered by exact congruence and then moved
into the frame where the parent is |phi| times the prototile in standard position.

    python scripts/build_rules.py            # rewrite src/tilegroup/rules/*.json
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

from tilegroup.geometry import Isometry2, Rotation2, corners, polygon_congruence
from tilegroup.qfield import QScalar
from tilegroup.substitution import Child, Prototile, SubstitutionSystem, system_to_json, validate_rule

OUT = Path(__file__).resolve().parents[1] / "src" / "tilegroup" / "rules"


def _pt(x, y, D):
    return (QScalar(Fraction(x), 0, D), QScalar(Fraction(y), 0, D))


def _mirror(verts):
    flipped = [(x, -y) for x, y in verts][::-1]
    # start from the origin corner for readability
    i = next(k for k, (x, y) in enumerate(flipped) if x.is_zero() and y.is_zero())
    return flipped[i:] + flipped[:i]


def build(name, D, long_leg, triangles, frame):
    """long_leg: length of the long leg (short leg is 1); frame: corners P, Q, R of the expanded parent."""
    lam = QScalar(0, 1, D)
    base = [_pt(k, 0, D) for k in range(long_leg + 1)] + [_pt(long_leg, 1, D)]
    protos = [
        Prototile(0, f"{name}-base", tuple(base), "base"),
        Prototile(1, f"{name}-mirror", tuple(_mirror(base)), "reflected"),
    ]

    def match(tri):
        for p in protos:
            g = polygon_congruence(corners(p.vertices), tri, allow_reflection=False)
            if g is not None:
                return p.id, g
        raise ValueError(f"triangle {tri} matches no prototile")

    frame_pts = [_pt(x, y, D) for x, y in frame]
    scaled = {p.id: [(x * lam, y * lam) for x, y in corners(p.vertices)] for p in protos}
    parent_id, h = None, None
    for pid, poly in scaled.items():
        h = polygon_congruence(poly, frame_pts, allow_reflection=False)
        if h is not None:
            parent_id = pid
            break
    if h is None:
        raise ValueError("expanded frame is not similar to a prototile")
    hinv = h.inverse()
    kids = []
    for tri in triangles:
        cid, g = match([_pt(x, y, D) for x, y in tri])
        kids.append(Child(cid, hinv.compose(g)))
    # the other parent is the mirror image: F g F on direct poses, chirality swapped
    mirrored = []
    for c in kids:
        r = c.pose.rot
        t = c.pose.trans
        mirrored.append(Child(1 - c.proto, Isometry2(Rotation2(r.c, -r.s), False, (t[0], -t[1]))))
    children = {parent_id: tuple(kids), 1 - parent_id: tuple(mirrored)}
    return SubstitutionSystem(D, tuple(protos), lam, children, name=name)


PINWHEEL = dict(
    name="pinwheel",
    D=5,
    long_leg=2,
    frame=[(0, 0), (5, 0), (4, 2)],
    triangles=[
        [(0, 0), (2, 0), (2, 1)],
        [(2, 1), (2, 0), (4, 0)],
        [(2, 1), (4, 0), (4, 1)],
        [(2, 1), (4, 1), (4, 2)],
        [(4, 2), (4, 0), (5, 0)],
    ],
)

VARIANT = dict(
    name="pinwheel_variant",
    D=10,
    long_leg=3,
    frame=[(0, 0), (10, 0), (9, 3)],
    triangles=[
        [(0, 0), (3, 0), (3, 1)],
        [(3, 0), (6, 0), (6, 1)],
        [(6, 0), (9, 0), (9, 1)],
        [(3, 0), (3, 1), (6, 1)],
        [(6, 0), (6, 1), (9, 1)],
        [(3, 1), (6, 1), (6, 2)],
        [(6, 1), (9, 1), (6, 2)],
        [(9, 1), (9, 2), (6, 2)],
        [(6, 2), (9, 2), (9, 3)],
        [(9, 3), (9, 0), (10, 0)],
    ],
)


def _dump(doc: dict) -> str:
    """JSON with one prototile or child per line."""
    one = lambda x: json.dumps(x, separators=(", ", ": "))
    lines = ["{"]
    for key in ("name", "field_d", "expansion"):
        lines.append(f'  "{key}": {one(doc[key])},')
    lines.append('  "prototiles": [')
    lines.append(",\n".join(f"    {one(p)}" for p in doc["prototiles"]))
    lines.append("  ],")
    lines.append('  "children": {')
    blocks = []
    for pid, kids in doc["children"].items():
        body = ",\n".join(f"      {one(c)}" for c in kids)
        blocks.append(f'    "{pid}": [\n{body}\n    ]')
    lines.append(",\n".join(blocks))
    lines.append("  }")
    extra = {k: v for k, v in doc.items() if k not in ("name", "field_d", "expansion", "prototiles", "children")}
    if extra:
        lines[-1] += ","
        lines.append(",\n".join(f'  "{k}": {one(v)}' for k, v in extra.items()))
    lines.append("}")
    return "\n".join(lines) + "\n"


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    for spec in (PINWHEEL, VARIANT):
        sys_ = build(**spec)
        report = validate_rule(sys_)
        print(spec["name"])
        print(report.text())
        if not report.ok:
            return 1
        path = OUT / f"{spec['name']}.json"
        path.write_text(_dump(system_to_json(sys_)), encoding="utf-8")
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
